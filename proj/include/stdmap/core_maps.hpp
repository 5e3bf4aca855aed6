#pragma once

// The map families: the Chirikov standard map F_L, its sheared form
// hat-F(x, y) = (f(x) - y mod 1, x) with f(x) = 2x + L sin(2 pi x), the lifted
// map that skips the final reduction, and the slow-fast map G = S o T on the
// cylinder.
//
// Every map is a template over the state precision (double or DoubleDouble).
// Internally the kick L sin(2 pi x) is always formed in double-double and
// reduced mod 1 before it meets the O(1) terms, so the reduced outputs are
// accurate to ~1e-16 for L up to 2^40 regardless of the state precision.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "stdmap/errors.hpp"
#include "stdmap/numeric/double_double.hpp"

namespace stdmap {

using numeric::DoubleDouble;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Largest multiplier for which reduced map outputs keep 1e-12 accuracy.
inline constexpr double kPrecisionLimit = 0x1.0p40;
inline constexpr double kDefaultLMin = 100.0;

template <class Real>
concept MapReal = std::same_as<Real, double> || std::same_as<Real, DoubleDouble>;

template <MapReal Real = double>
struct TorusPoint {
  Real x{};
  Real y{};
};

// An unreduced real split as integer + fraction, fraction in [0, 1).  At
// L ~ 2^40 a plain double would keep only ~1e-4 of the fractional part.
struct Unreduced {
  double integer = 0.0;
  DoubleDouble fraction{};

  [[nodiscard]] double value() const { return integer + fraction.value(); }
  [[nodiscard]] double fractional_part() const { return numeric::frac_to_double(fraction); }
};

template <MapReal Real = double>
struct LiftedPoint {
  Unreduced x{};
  Real y{};
};

// Slow-fast state; z is carried as an unevaluated sum, which is the
// compensated accumulator for z_0 + eps * sum sin(2 pi x_n).
template <MapReal Real = double>
struct CylinderState {
  Real x{};
  DoubleDouble z{};
};

namespace detail {

template <MapReal Real>
Real round_reduced(DoubleDouble v) {
  if constexpr (std::same_as<Real, double>) {
    return numeric::frac_to_double(v);
  } else {
    return numeric::frac(v);
  }
}

template <MapReal Real>
Real round_value(DoubleDouble v) {
  if constexpr (std::same_as<Real, double>) {
    return v.value();
  } else {
    return v;
  }
}

inline DoubleDouble as_dd(double v) { return DoubleDouble(v); }
inline DoubleDouble as_dd(DoubleDouble v) { return v; }

// L * sin(2 pi x) with its nearest integer removed (exactly).
inline DoubleDouble kick_centered(DoubleDouble x, DoubleDouble L, double& removed) {
  const DoubleDouble p = L * numeric::sin_2pi(x);
  removed = std::nearbyint(p.hi);
  return p - removed;
}

// f(x) = 2x + L sin(2 pi x) split into integer + [0,1) fraction.
inline Unreduced f_split(DoubleDouble x, DoubleDouble L) {
  double removed = 0.0;
  const DoubleDouble r = kick_centered(x, L, removed) + x * 2.0;
  const DoubleDouble m = numeric::floor(r);
  Unreduced out;
  out.integer = removed + m.hi + m.lo;
  out.fraction = numeric::frac(r - m);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar pieces of f.

// f(x) = 2x + L sin(2 pi x), unreduced.
inline Unreduced eval_f(double x, double L) { return detail::f_split(x, L); }

// f in plain double arithmetic (absolute error ~ L * 1e-16); used where the
// lifted value itself, not its fractional part, is what matters.
inline double f_lifted(double x, double L) { return 2.0 * x + L * std::sin(kTwoPi * x); }

// f'(x) = 2 + 2 pi L cos(2 pi x)
inline double f_dot(double x, double L) { return 2.0 + kTwoPi * L * std::cos(kTwoPi * x); }

// f''(x) = -4 pi^2 L sin(2 pi x)
inline double f_ddot(double x, double L) { return -kTwoPi * kTwoPi * L * std::sin(kTwoPi * x); }

// ---------------------------------------------------------------------------
// Torus maps.

template <MapReal Real>
TorusPoint<Real> step_hatF(const TorusPoint<Real>& p, DoubleDouble L) {
  const DoubleDouble x = detail::as_dd(p.x);
  const Unreduced f = detail::f_split(x, L);
  return {detail::round_reduced<Real>(f.fraction - detail::as_dd(p.y)), p.x};
}

// F_L(x, y) = (x + y + L sin(2 pi x), y + L sin(2 pi x)) mod 1
template <MapReal Real>
TorusPoint<Real> step_F(const TorusPoint<Real>& p, DoubleDouble L) {
  const DoubleDouble x = detail::as_dd(p.x);
  double removed = 0.0;
  const DoubleDouble y_new = numeric::frac(detail::kick_centered(x, L, removed) + detail::as_dd(p.y));
  return {detail::round_reduced<Real>(x + y_new), detail::round_reduced<Real>(y_new)};
}

// (x, y) -> (x, x - y); intertwines F_L and hat-F and is an involution.
template <MapReal Real>
TorusPoint<Real> conjugate(const TorusPoint<Real>& p) {
  return {p.x, detail::round_reduced<Real>(detail::as_dd(p.x) - detail::as_dd(p.y))};
}

// hat-F without the final reduction of the x-coordinate.
template <MapReal Real>
LiftedPoint<Real> step_lifted(const TorusPoint<Real>& p, DoubleDouble L) {
  Unreduced f = detail::f_split(detail::as_dd(p.x), L);
  DoubleDouble r = f.fraction - detail::as_dd(p.y);  // (-1, 1)
  if (r.hi < 0.0) {
    r = r + 1.0;
    f.integer -= 1.0;
  }
  f.fraction = numeric::frac(r);
  return {f, p.x};
}

template <MapReal Real>
LiftedPoint<Real> step_lifted(const LiftedPoint<Real>& p, DoubleDouble L) {
  return step_lifted(TorusPoint<Real>{detail::round_reduced<Real>(p.x.fraction), p.y}, L);
}

// ---------------------------------------------------------------------------
// Slow-fast parameters.

struct MapParams {
  double L = 0.0;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::int64_t> N_of_L;
  double l_min = kDefaultLMin;

  // floor() that tolerates the representation error of decimal inputs, so
  // that eps = 0.05 gives floor(eps^-2) = 400 rather than 399.
  static std::int64_t robust_floor(double v) {
    return static_cast<std::int64_t>(std::floor(v * (1.0 + 1e-12)));
  }

  static MapParams from_L(double L, std::optional<double> alpha = std::nullopt) {
    if (!(L > 0.0)) throw InvalidArgument("L must be positive");
    MapParams p;
    p.L = L;
    if (alpha) {
      if (!(*alpha > 0.0)) throw InvalidArgument("alpha must be positive");
      p.alpha = alpha;
      p.beta = 2.0 / *alpha;
      p.N_of_L = robust_floor(std::pow(L, *p.beta));
    }
    return p;
  }

  static MapParams from_slow_fast(double epsilon, double alpha) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    MapParams p;
    p.epsilon = epsilon;
    p.alpha = alpha;
    p.beta = 2.0 / alpha;
    p.L = p.slow_fast_L().value();
    p.N_of_L = robust_floor(1.0 / (epsilon * epsilon));
    return p;
  }

  [[nodiscard]] bool has_slow_fast() const { return epsilon.has_value() && alpha.has_value(); }

  // eps^-(1+alpha), the shear factor of S.
  [[nodiscard]] double shear() const {
    require_slow_fast();
    return std::pow(*epsilon, -(1.0 + *alpha));
  }

  // The standard-map parameter implied by G: shear * eps, formed exactly so
  // that eps^-alpha sin and shear * (eps sin) agree to double-double accuracy.
  [[nodiscard]] DoubleDouble slow_fast_L() const {
    require_slow_fast();
    return numeric::two_prod(shear(), *epsilon);
  }

  // Slow coordinate z = eps^(1+alpha) y, formed as y / shear so that the
  // shear maps it back to y to double-double accuracy.
  [[nodiscard]] DoubleDouble slow_from_torus(DoubleDouble y) const { return y / DoubleDouble(shear()); }

  [[nodiscard]] bool in_precision_domain() const { return !has_slow_fast() || shear() <= kPrecisionLimit; }

  [[nodiscard]] bool asymptotic_regime() const { return L >= l_min; }

 private:
  void require_slow_fast() const {
    if (!has_slow_fast()) throw InvalidArgument("slow-fast parameters (epsilon, alpha) not set");
  }
};

// ---------------------------------------------------------------------------
// Slow-fast map G = S o T.

inline void check_precision_domain(const MapParams& params) {
  if (!params.in_precision_domain()) {
    throw PrecisionDomainExceeded("eps^-(1+alpha) = " + std::to_string(params.shear()) +
                                  " exceeds 2^40; use the conjugated standard-map route");
  }
}

// T(x, z) = (x, z + eps sin(2 pi x))
template <MapReal Real>
CylinderState<Real> tilt(const CylinderState<Real>& s, const MapParams& params) {
  return {s.x, s.z + numeric::sin_2pi(detail::as_dd(s.x)) * *params.epsilon};
}

// S(x, z) = (x + eps^-(1+alpha) z mod 1, z)
template <MapReal Real>
CylinderState<Real> shear(const CylinderState<Real>& s, const MapParams& params) {
  check_precision_domain(params);
  const DoubleDouble p = s.z * params.shear();
  const double removed = std::nearbyint(p.hi);
  return {detail::round_reduced<Real>(detail::as_dd(s.x) + (p - removed)), s.z};
}

template <MapReal Real>
CylinderState<Real> step_slowfast(const CylinderState<Real>& s, const MapParams& params) {
  check_precision_domain(params);
  return shear(tilt(s, params), params);
}

// The one-line form (x + eps^-alpha sin(2 pi x) + eps^-(1+alpha) z, z + eps sin(2 pi x)).
template <MapReal Real>
CylinderState<Real> step_slowfast_direct(const CylinderState<Real>& s, const MapParams& params) {
  check_precision_domain(params);
  const DoubleDouble x = detail::as_dd(s.x);
  const DoubleDouble sn = numeric::sin_2pi(x);
  const DoubleDouble kick = params.slow_fast_L() * sn;
  const DoubleDouble drift = s.z * params.shear();
  const DoubleDouble k_red = kick - std::nearbyint(kick.hi);
  const DoubleDouble d_red = drift - std::nearbyint(drift.hi);
  return {detail::round_reduced<Real>(x + k_red + d_red), s.z + sn * *params.epsilon};
}

// ---------------------------------------------------------------------------
// Orbits.

enum class TorusMap { HatF, StandardF };

template <MapReal Real>
std::vector<TorusPoint<Real>> trajectory(TorusPoint<Real> p, DoubleDouble L, std::size_t n, TorusMap which) {
  std::vector<TorusPoint<Real>> out;
  out.reserve(n + 1);
  out.push_back(p);
  for (std::size_t i = 0; i < n; ++i) {
    p = which == TorusMap::HatF ? step_hatF(p, L) : step_F(p, L);
    out.push_back(p);
  }
  return out;
}

template <MapReal Real>
std::vector<CylinderState<Real>> trajectory(CylinderState<Real> s, const MapParams& params, std::size_t n) {
  check_precision_domain(params);
  std::vector<CylinderState<Real>> out;
  out.reserve(n + 1);
  out.push_back(s);
  for (std::size_t i = 0; i < n; ++i) {
    s = step_slowfast(s, params);
    out.push_back(s);
  }
  return out;
}

// Distance on the circle.
inline double circle_distance(double a, double b) {
  const double d = std::fabs(numeric::frac(a - b));
  return std::min(d, 1.0 - d);
}

inline double circle_distance(DoubleDouble a, DoubleDouble b) {
  const double d = numeric::frac(a - b).value();
  return std::min(d, 1.0 - d);
}

}  // namespace stdmap
