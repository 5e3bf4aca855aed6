#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "stdmap/errors.hpp"

namespace stdmap::numeric {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

// Non-adaptive 15-point Kronrod rule with its error estimate mapped back to
// [a, b] (boost reports it on the reference interval).
template <class F>
double kronrod_panel(F& f, double a, double b, double& error, double& l1) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0;
  double abs_int = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err, &abs_int);
  error = err * 0.5 * (b - a);
  l1 = abs_int;
  return v;
}

template <class F>
double adaptive_kronrod(F& f, double a, double b, double tol, double rel_tol, unsigned depth, double& error,
                        double& l1) {
  double err = 0.0;
  double abs_int = 0.0;
  const double v = kronrod_panel(f, a, b, err, abs_int);
  const double floor = 16.0 * 2.220446049250313e-16 * abs_int;
  if (depth == 0 || err <= std::max({tol, rel_tol * abs_int, floor})) {
    error += err;
    l1 += abs_int;
    return v;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_kronrod(f, a, mid, 0.5 * tol, rel_tol, depth - 1, error, l1) +
         adaptive_kronrod(f, mid, b, 0.5 * tol, rel_tol, depth - 1, error, l1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (15 point) on [a, b].  Panels are bisected until the
// absolute target (or rel_tol times the L1 norm) is met; throws
// QuadratureFailure if that has not happened at max_depth.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 0.0,
                                    unsigned max_depth = 30) {
  if (b <= a) return {};
  QuadratureResult r;
  double l1 = 0.0;
  r.value = detail::adaptive_kronrod(f, a, b, abs_tol, rel_tol, max_depth, r.error, l1);
  const double target = std::max({abs_tol, rel_tol * l1, 64.0 * 2.220446049250313e-16 * l1});
  if (!(r.error <= target) || !std::isfinite(r.value)) {
    throw QuadratureFailure("error estimate " + num(r.error) + " above target " + num(target) + " on [" + num(a) +
                            ", " + num(b) + "]");
  }
  return r;
}

// Single 15-point Kronrod rule without adaptivity; for smooth short panels.
template <class F>
double integrate_fixed(F&& f, double a, double b) {
  if (b <= a) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  return GK::integrate(f, a, b, 0, 0.0);
}

// Composite 10-point Gauss-Legendre on `panels` equal panels.
template <class F>
double integrate_composite(F&& f, double a, double b, std::size_t panels) {
  using GL = boost::math::quadrature::gauss<double, 10>;
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + h * static_cast<double>(i);
    const double hi = i + 1 == panels ? b : lo + h;
    const double v = GL::integrate(f, lo, hi) - comp;
    const double t = total + v;
    comp = (t - total) - v;
    total = t;
  }
  return total;
}

}  // namespace stdmap::numeric
