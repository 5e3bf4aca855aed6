#pragma once

// Unevaluated-sum ("double-double") arithmetic and the trigonometric kernels
// that the large-parameter maps need.  A DoubleDouble carries roughly 106 bits
// of significand, which is what it takes to keep L * sin(2 pi x) mod 1 exact to
// 1e-12 when L is as large as 2^40.

#include <array>
#include <cmath>
#include <cstdint>

namespace stdmap::numeric {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(implicit)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  [[nodiscard]] constexpr double value() const { return hi + lo; }
};

// Error-free transforms.

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator+(DoubleDouble a, double b) {
  DoubleDouble s = two_sum(a.hi, b);
  s.lo += a.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator+(double a, DoubleDouble b) { return b + a; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }
inline DoubleDouble operator-(DoubleDouble a, double b) { return a + (-b); }
inline DoubleDouble operator-(double a, DoubleDouble b) { return (-b) + a; }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  DoubleDouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator*(DoubleDouble a, double b) {
  DoubleDouble p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator*(double a, DoubleDouble b) { return b * a; }

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  return quick_two_sum(q1, q2) + q3;
}

inline DoubleDouble operator/(DoubleDouble a, double b) {
  return a / DoubleDouble(b);
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }

inline bool operator<(DoubleDouble a, DoubleDouble b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator==(DoubleDouble a, DoubleDouble b) {
  return a.hi == b.hi && a.lo == b.lo;
}

inline DoubleDouble floor(DoubleDouble a) {
  double f = std::floor(a.hi);
  if (f == a.hi) {
    return quick_two_sum(f, std::floor(a.lo));
  }
  return {f, 0.0};
}

// Representative of a in [0, 1).
inline DoubleDouble frac(DoubleDouble a) {
  DoubleDouble r = a - floor(a);
  if (r.hi < 0.0) r = r + 1.0;
  if (r.hi >= 1.0) {
    r = r - 1.0;
    if (r.hi < 0.0) r = {0.0, 0.0};
  }
  return r;
}

// Round to the nearest double and reduce into [0, 1).  A value that rounds up
// to exactly 1 is the torus point 0.
inline double frac_to_double(DoubleDouble a) {
  const DoubleDouble r = frac(a);
  const double v = r.hi + r.lo;
  return v >= 1.0 ? 0.0 : v;
}

inline double frac(double x) {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

namespace detail {

inline constexpr DoubleDouble kTwoPi{0x1.921FB54442D18p2, 0x1.1A62633145C07p-52};

inline constexpr int kSeriesTerms = 30;

// 1/k! for k = 0..kSeriesTerms, each to double-double precision.
inline const std::array<DoubleDouble, kSeriesTerms + 1>& inverse_factorials() {
  static const auto table = [] {
    std::array<DoubleDouble, kSeriesTerms + 1> t{};
    t[0] = DoubleDouble(1.0);
    for (int k = 1; k <= kSeriesTerms; ++k) {
      t[k] = t[k - 1] / static_cast<double>(k);
    }
    return t;
  }();
  return table;
}

// Taylor series, valid to ~1e-32 for |a| <= pi/4.
inline DoubleDouble sin_series(DoubleDouble a) {
  const auto& inv = inverse_factorials();
  const DoubleDouble a2 = a * a;
  // sin(a)/a = sum_j (-1)^j a^(2j) / (2j+1)!, j = 0..13
  DoubleDouble p = -inv[27];
  for (int j = 12; j >= 0; --j) {
    const DoubleDouble c = (j % 2 == 0) ? inv[2 * j + 1] : -inv[2 * j + 1];
    p = p * a2 + c;
  }
  return a * p;
}

inline DoubleDouble cos_series(DoubleDouble a) {
  const auto& inv = inverse_factorials();
  const DoubleDouble a2 = a * a;
  DoubleDouble p = inv[28];
  for (int j = 13; j >= 0; --j) {
    const DoubleDouble c = (j % 2 == 0) ? inv[2 * j] : -inv[2 * j];
    p = p * a2 + c;
  }
  return p;
}

inline DoubleDouble two_pi_times(double t) {
  DoubleDouble p = two_prod(kTwoPi.hi, t);
  p.lo += kTwoPi.lo * t;
  return quick_two_sum(p.hi, p.lo);
}

}  // namespace detail

// sin(2 pi x) to double-double accuracy.  The reduction only uses exact
// operations (subtraction of nearest integers and Sterbenz-exact folds), so
// sin vanishes exactly at x in {0, 1/2} and cos at x in {1/4, 3/4}.
inline DoubleDouble sin_2pi(double x) {
  double t = x - std::nearbyint(x);  // [-1/2, 1/2]
  if (t > 0.25) {
    t = 0.5 - t;
  } else if (t < -0.25) {
    t = -0.5 - t;
  }
  const double at = std::fabs(t);
  if (at <= 0.125) {
    return detail::sin_series(detail::two_pi_times(t));
  }
  const DoubleDouble c = detail::cos_series(detail::two_pi_times(0.25 - at));
  return t < 0.0 ? -c : c;
}

inline DoubleDouble cos_2pi(double x) {
  double t = std::fabs(x - std::nearbyint(x));  // [0, 1/2]
  bool negate = false;
  if (t > 0.25) {
    t = 0.5 - t;
    negate = true;
  }
  DoubleDouble c = t <= 0.125 ? detail::cos_series(detail::two_pi_times(t))
                              : detail::sin_series(detail::two_pi_times(0.25 - t));
  return negate ? -c : c;
}

// Double-double argument: expand around the leading part.
inline DoubleDouble sin_2pi(DoubleDouble x) {
  if (x.lo == 0.0) return sin_2pi(x.hi);
  const DoubleDouble s = sin_2pi(x.hi);
  const DoubleDouble c = cos_2pi(x.hi);
  const DoubleDouble d = detail::kTwoPi * x.lo;
  const DoubleDouble half_d2 = d * d * 0.5;
  return s - s * half_d2 + c * d;
}

inline DoubleDouble cos_2pi(DoubleDouble x) {
  if (x.lo == 0.0) return cos_2pi(x.hi);
  const DoubleDouble s = sin_2pi(x.hi);
  const DoubleDouble c = cos_2pi(x.hi);
  const DoubleDouble d = detail::kTwoPi * x.lo;
  const DoubleDouble half_d2 = d * d * 0.5;
  return c - c * half_d2 - s * d;
}

}  // namespace stdmap::numeric
