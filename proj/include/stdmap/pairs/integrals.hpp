#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "stdmap/errors.hpp"
#include "stdmap/numeric/quadrature.hpp"
#include "stdmap/observables.hpp"
#include "stdmap/pairs/curve.hpp"

namespace stdmap::pairs {

// Integral of phi(x, h(x)) rho(x) over the pair (coordinates reduced mod 1).
inline double integrate_observable(const MeasurePair& pair, const std::function<double(double, double)>& phi,
                                   double abs_tol = 1e-10) {
  CurveEvaluator ev(pair.node);
  const Interval d = pair.domain();
  auto integrand = [&](double x) {
    const PointJet j = ev.jet(x);
    return phi(numeric::frac(x), numeric::frac(j.h)) * j.rho();
  };
  // Split at integers so that the reduction of x stays smooth on each piece.
  double total = 0.0;
  double a = d.lo;
  while (a < d.hi) {
    const double b = std::min(d.hi, std::floor(a) + 1.0);
    total += numeric::integrate_adaptive(integrand, a, b, 0.5 * abs_tol).value;
    a = b;
  }
  return total;
}

inline double integrate_observable(const MeasurePair& pair, const Observable& phi, double abs_tol = 1e-10) {
  return integrate_observable(pair, [&](double x, double) { return phi(x); }, abs_tol);
}

// Checks that phi has zero mean on the circle.
inline void require_mean_zero(const Observable& phi, double tol = 1e-10) {
  const double mean = numeric::integrate_adaptive([&](double x) { return phi(x); }, 0.0, 1.0, 1e-13).value;
  if (std::fabs(mean) > tol) throw NotMeanZero("observable mean " + std::to_string(mean) + " is not zero");
}

struct PushforwardOptions {
  double node_cap = 2e9;     // Gauss-Legendre nodes
  double panel_factor = 1.0; // multiplies the oscillation-resolving panel count
  bool check_mean_zero = true;
};

struct PushforwardResult {
  double value = 0.0;
  double nodes = 0.0;
};

// Integral of phi(pi_x hat-F^n(x, h(x))) rho(x) over the pair, by composite
// 10-point Gauss-Legendre with one panel per oscillation of the integrand.
inline PushforwardResult pair_pushforward_integral(const MeasurePair& seed, const Observable& phi, int n,
                                                    const PushforwardOptions& opt = {}) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (opt.check_mean_zero) require_mean_zero(phi);
  const double L = seed.L();
  const Interval d = seed.domain();
  double panels = std::max(1.0, static_cast<double>(phi.max_frequency()));
  for (int i = 0; i < n; ++i) panels *= kTwoPi * L + 3.0;
  panels = std::ceil(panels * d.length() * opt.panel_factor);
  const double nodes = 10.0 * panels;
  if (nodes > opt.node_cap) {
    throw ResolutionExceeded("n = " + std::to_string(n) + " at L = " + std::to_string(L) + " needs " +
                             std::to_string(nodes) + " nodes, above the cap of " + std::to_string(opt.node_cap));
  }
  auto orbit_x = [&](double x, double y) {
    for (int i = 0; i < n; ++i) {
      const double xn = numeric::frac(2.0 * x + L * std::sin(kTwoPi * x) - y);
      y = x;
      x = xn;
    }
    return x;
  };
  PushforwardResult r;
  r.nodes = nodes;
  if (seed.node->depth == 0 && seed.node->root_density->is_uniform()) {
    const double y0 = seed.node->y0;
    r.value = numeric::integrate_composite([&](double x) { return phi(orbit_x(numeric::frac(x), y0)); }, d.lo, d.hi,
                                           static_cast<std::size_t>(panels));
  } else {
    CurveEvaluator ev(seed.node);
    r.value = numeric::integrate_composite(
        [&](double x) {
          const PointJet j = ev.jet(x);
          return phi(orbit_x(numeric::frac(x), numeric::frac(j.h))) * j.rho();
        },
        d.lo, d.hi, static_cast<std::size_t>(panels));
  }
  r.value *= seed.mass;
  return r;
}

}  // namespace stdmap::pairs
