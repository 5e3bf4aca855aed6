#pragma once

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <utility>

#include "stdmap/errors.hpp"

namespace stdmap::numeric {

// Bisection on a sign change of g over [lo, hi] until the bracket is below tol.
template <class G>
double bisect_root(G&& g, double lo, double hi, double tol = 1e-14) {
  const double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo < 0.0) == (ghi < 0.0)) throw BracketError("no sign change on bracket");
  auto done = [tol](double a, double b) { return std::fabs(b - a) <= tol; };
  const auto [a, b] = boost::math::tools::bisect(g, lo, hi, done);
  return 0.5 * (a + b);
}

// Solves g(x) = target on [lo, hi] for monotone g.  Newton steps, falling back
// to bisection whenever a step leaves the current bracket.
template <class G, class DG>
double solve_monotone(G&& g, DG&& dg, double target, double lo, double hi, double residual_tol = 1e-12,
                      int max_iter = 200) {
  double rlo = g(lo) - target;
  double rhi = g(hi) - target;
  if (rlo == 0.0) return lo;
  if (rhi == 0.0) return hi;
  if ((rlo < 0.0) == (rhi < 0.0)) throw BracketError("target not enclosed by bracket");
  const bool increasing = rhi > 0.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double r = g(x) - target;
    if (std::fabs(r) <= residual_tol) return x;
    if ((r > 0.0) == increasing) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = dg(x);
    double next = x - r / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4e-16 * std::fabs(x)) return x;
    x = next;
  }
  return x;
}

}  // namespace stdmap::numeric
