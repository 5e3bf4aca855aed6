#pragma once

// Critical strips, cones and the derivative of hat-F.

#include <array>
#include <cmath>
#include <string>

#include "stdmap/core_maps.hpp"
#include "stdmap/errors.hpp"
#include "stdmap/numeric/root_finding.hpp"

namespace stdmap {

// Closed interval of x-values.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
  [[nodiscard]] bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Horizontal expansion |f'(x)| of hat-F.
inline double expansion(double x, double L) {
  return std::fabs(2.0 + kTwoPi * L * numeric::cos_2pi(x).value());
}

struct CriticalStrips {
  double L = 0.0;
  double eta = 0.0;
  std::array<Interval, 2> intervals{};  // around 1/4 and 3/4

  [[nodiscard]] double threshold() const { return 2.0 * std::pow(L, eta); }
  [[nodiscard]] double total_measure() const { return intervals[0].length() + intervals[1].length(); }
  [[nodiscard]] bool contains(double x) const { return intervals[0].contains(x) || intervals[1].contains(x); }
};

// The range of cos(2 pi x) on which |2 + 2 pi L cos| <= 2 L^eta.
inline Interval strip_cosine_window(double L, double eta) {
  const double t = 2.0 * std::pow(L, eta);
  return {(-t - 2.0) / (kTwoPi * L), (t - 2.0) / (kTwoPi * L)};
}

inline CriticalStrips critical_intervals(double L, double eta) {
  if (!(L > 0.0)) throw InvalidArgument("L must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0, 1)");
  const double t = 2.0 * std::pow(L, eta);
  if (!(t < kTwoPi * L - 2.0)) {
    throw StripDegenerate("2 L^eta >= 2 pi L - 2: strips merge at L = " + std::to_string(L) +
                          ", eta = " + std::to_string(eta));
  }
  const Interval c = strip_cosine_window(L, eta);
  auto cos_minus = [](double level) {
    return [level](double x) { return numeric::cos_2pi(x).value() - level; };
  };
  CriticalStrips s{L, eta, {}};
  // cos(2 pi x) decreases on [0, 1/2] and increases on [1/2, 1].
  s.intervals[0] = {numeric::bisect_root(cos_minus(c.hi), 0.0, 0.5), numeric::bisect_root(cos_minus(c.lo), 0.0, 0.5)};
  s.intervals[1] = {numeric::bisect_root(cos_minus(c.lo), 0.5, 1.0), numeric::bisect_root(cos_minus(c.hi), 0.5, 1.0)};
  return s;
}

inline bool in_strip(double x, const CriticalStrips& strips) {
  return expansion(x, strips.L) <= strips.threshold();
}

// ---------------------------------------------------------------------------

struct Vec2 {
  double u = 0.0;
  double w = 0.0;
};

struct Cone {
  double xi = 0.0;
};

inline bool cone_contains(const Cone& cone, const Vec2& v) {
  if (v.u == 0.0 && v.w == 0.0) throw ZeroVector("cone membership of the zero vector");
  return std::fabs(v.w) <= cone.xi * std::fabs(v.u);
}

struct TangentMatrix {
  double a = 0.0, b = 0.0;
  double c = 0.0, d = 0.0;

  [[nodiscard]] double determinant() const { return a * d - b * c; }
  [[nodiscard]] Vec2 apply(const Vec2& v) const { return {a * v.u + b * v.w, c * v.u + d * v.w}; }
};

// D hat-F = [[f'(x), -1], [1, 0]].
template <MapReal Real>
TangentMatrix jacobian_hatF(const TorusPoint<Real>& p, double L) {
  const double x = detail::as_dd(p.x).value();
  return {2.0 + kTwoPi * L * numeric::cos_2pi(x).value(), -1.0, 1.0, 0.0};
}

inline double pushed_cone_aperture(double xi, double eta, double L) {
  const double l_eta = std::pow(L, eta);
  if (!(xi > 0.0)) throw ApertureDomain("aperture must be positive");
  if (!(xi <= l_eta)) throw ApertureDomain("aperture exceeds L^eta");
  if (!(2.0 * l_eta > xi)) throw ApertureDomain("2 L^eta must exceed the aperture");
  return 1.0 / (2.0 * l_eta - xi);
}

}  // namespace stdmap
