#pragma once

// u-curves and measure pairs in pullback form.
//
// A curve is a node in a tree rooted at a horizontal line y = y0.  A child is
// the image under the lifted map of a piece P of its parent, translated by an
// integer shift so that its domain starts in [0, 1).  Its height function is
// the inverse branch h(x) = f_parent^{-1}(x + shift) restricted to P.
//
// Evaluating a depth-d curve at x means finding the backward orbit
// x_0, ..., x_{d-1} with
//     f(x_k) - x_{k-1} - s_{k+1} = x_{k+1},   x_{-1} = y0,  x_d = x,
// a tridiagonal system that is strongly diagonally dominant off the critical
// strips.  The jets (h, h', h'', log rho, d log rho) then follow from one
// forward sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "stdmap/core_maps.hpp"
#include "stdmap/errors.hpp"
#include "stdmap/geometry.hpp"
#include "stdmap/numeric/quadrature.hpp"
#include "stdmap/numeric/root_finding.hpp"

namespace stdmap::pairs {

inline constexpr double kC0 = 8.0 * std::numbers::pi * std::numbers::pi;
inline constexpr double kDefaultA0 = 1.0 / 16.0;
// Relative accuracy for density integrals over curve pieces.
inline constexpr double kRhoRelTol = 1e-9;

enum class Regularity { FullCrossing, Standard, Substandard };
enum class PairClass { L, I, J, E };

inline const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::FullCrossing: return "full";
    case Regularity::Standard: return "standard";
    case Regularity::Substandard: return "substandard";
  }
  return "?";
}

inline const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::L: return "L";
    case PairClass::I: return "I";
    case PairClass::J: return "J";
    case PairClass::E: return "E";
  }
  return "?";
}

// Density of the root pair on [0, 1), given by an unnormalized log density.
struct RootDensity {
  std::function<double(double)> log_density;   // empty: uniform
  std::function<double(double)> dlog_density;
  double log_norm = 0.0;
  double log_derivative_bound = 0.0;

  static RootDensity uniform() { return {}; }

  // Normalizes by quadrature; `bound` must dominate |d log rho / dx|.
  static RootDensity from_log(std::function<double(double)> log_rho, std::function<double(double)> dlog_rho,
                              double bound) {
    RootDensity d{std::move(log_rho), std::move(dlog_rho), 0.0, bound};
    const auto& lr = d.log_density;
    const double z = numeric::integrate_adaptive([&](double x) { return std::exp(lr(x)); }, 0.0, 1.0, 1e-14).value;
    d.log_norm = std::log(z);
    return d;
  }

  [[nodiscard]] bool is_uniform() const { return !log_density; }
};

struct CurveNode {
  std::shared_ptr<const CurveNode> parent;
  std::shared_ptr<const RootDensity> root_density;
  double L = 0.0;
  double y0 = 0.0;                // root height
  Interval preimage{};            // piece of the parent domain
  double shift = 0.0;             // integer translation of the image
  Interval domain{0.0, 1.0};      // lifted; lo in [0, 1)
  int orientation = 1;            // sign of f_parent' on the preimage
  double log_rel_mass = 0.0;      // log of the parent mass fraction carried
  Regularity regularity = Regularity::FullCrossing;
  double log_derivative_bound = 0.0;
  int depth = 0;
  std::vector<double> ref_orbit;  // backward orbit at ref_point
  double ref_point = 0.5;

  [[nodiscard]] double length() const { return domain.length(); }
  [[nodiscard]] bool fully_crossing() const { return std::fabs(domain.length() - 1.0) <= 1e-12; }
};

using NodePtr = std::shared_ptr<const CurveNode>;

inline NodePtr make_root(double L, double y0 = 0.0, RootDensity density = RootDensity::uniform()) {
  if (!(L > 0.0)) throw InvalidArgument("L must be positive");
  auto n = std::make_shared<CurveNode>();
  n->L = L;
  n->y0 = y0;
  n->log_derivative_bound = density.log_derivative_bound;
  n->root_density = std::make_shared<const RootDensity>(std::move(density));
  return n;
}

// Values of the curve and its density at one point.
struct PointJet {
  double x = 0.0;
  double h = 0.0;
  double h_dot = 0.0;
  double h_ddot = 0.0;
  double log_rho = 0.0;
  double dlog_rho = 0.0;

  [[nodiscard]] double rho() const { return std::exp(log_rho); }
};

// f_gamma = f - h and its first two derivatives.
struct FGamma {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class CurveEvaluator {
 public:
  explicit CurveEvaluator(NodePtr node) : node_(std::move(node)) {
    chain_.resize(static_cast<std::size_t>(node_->depth) + 1);
    const CurveNode* c = node_.get();
    for (int k = node_->depth; k >= 0; --k) {
      chain_[static_cast<std::size_t>(k)] = c;
      c = c->parent.get();
    }
    orbit_ = node_->ref_orbit;
    const std::size_t d = orbit_.size();
    diag_.resize(d);
    rhs_.resize(d);
    cprime_.resize(d);
    sin_.resize(d);
    cos_.resize(d);
  }

  [[nodiscard]] const CurveNode& node() const { return *node_; }
  [[nodiscard]] const NodePtr& node_ptr() const { return node_; }

  // Backward orbit x_0..x_{d-1} from the last evaluation.
  [[nodiscard]] const std::vector<double>& orbit() const { return orbit_; }

  PointJet jet(double x) {
    solve(x);
    const CurveNode& root = *chain_.front();
    const double x0 = orbit_.empty() ? x : orbit_.front();
    PointJet j;
    j.x = x;
    j.h = root.y0;
    if (!root.root_density->is_uniform()) {
      j.log_rho = root.root_density->log_density(x0) - root.root_density->log_norm;
      j.dlog_rho = root.root_density->dlog_density(x0);
    }
    const double L = node_->L;
    const std::size_t d = orbit_.size();
    for (std::size_t k = 0; k < d; ++k) {
      const double fg1 = 2.0 + kTwoPi * L * cos_[k] - j.h_dot;
      const double fg2 = -kTwoPi * kTwoPi * L * sin_[k] - j.h_ddot;
      const double inv = 1.0 / fg1;
      j.dlog_rho = j.dlog_rho * inv - fg2 * inv * inv;
      j.log_rho = j.log_rho - std::log(std::fabs(fg1)) - chain_[k + 1]->log_rel_mass;
      j.h = orbit_[k];
      j.h_dot = inv;
      j.h_ddot = -fg2 * inv * inv * inv;
    }
    return j;
  }

  FGamma f_gamma(double x) {
    const PointJet j = jet(x);
    return f_gamma_from(j);
  }

  [[nodiscard]] double L() const { return node_->L; }

  FGamma f_gamma_from(const PointJet& j) const {
    const double L = node_->L;
    const double s = std::sin(kTwoPi * j.x);
    const double c = std::cos(kTwoPi * j.x);
    return {2.0 * j.x + L * s - j.h, 2.0 + kTwoPi * L * c - j.h_dot, -kTwoPi * kTwoPi * L * s - j.h_ddot};
  }

 private:
  void trig(std::size_t k) {
    sin_[k] = std::sin(kTwoPi * orbit_[k]);
    cos_[k] = std::cos(kTwoPi * orbit_[k]);
  }

  double residuals(double x) {
    const double L = node_->L;
    const std::size_t d = orbit_.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      trig(k);
      const double prev = k == 0 ? chain_[0]->y0 : orbit_[k - 1];
      const double next = k + 1 == d ? x : orbit_[k + 1];
      const double r = 2.0 * orbit_[k] + L * sin_[k] - prev - chain_[k + 1]->shift - next;
      rhs_[k] = -r;
      diag_[k] = 2.0 + kTwoPi * L * cos_[k];
      worst = std::max(worst, std::fabs(r));
    }
    return worst;
  }

  void clamp(std::size_t k) {
    const Interval& p = chain_[k + 1]->preimage;
    orbit_[k] = std::clamp(orbit_[k], p.lo, p.hi);
  }

  bool newton(double x, int max_iter) {
    const std::size_t d = orbit_.size();
    const double tol = 64.0 * 2.220446049250313e-16 * (node_->L + 4.0);
    bool polish = false;
    for (int it = 0; it < max_iter; ++it) {
      const double worst = residuals(x);
      if (worst <= tol) {
        // one more step takes the residual down to rounding level
        if (polish || worst <= 4.0 * 2.220446049250313e-16 * (node_->L + 4.0)) return true;
        polish = true;
      }
      // Thomas algorithm for diag_ on the diagonal and -1 off it.
      cprime_[0] = -1.0 / diag_[0];
      rhs_[0] = rhs_[0] / diag_[0];
      for (std::size_t k = 1; k < d; ++k) {
        const double m = diag_[k] + cprime_[k - 1];
        cprime_[k] = -1.0 / m;
        rhs_[k] = (rhs_[k] + rhs_[k - 1]) / m;
      }
      for (std::size_t k = d - 1; k-- > 0;) rhs_[k] -= cprime_[k] * rhs_[k + 1];
      double step = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        orbit_[k] += rhs_[k];
        clamp(k);
        step = std::max(step, std::fabs(rhs_[k]));
      }
      if (step <= 1e-16) {
        residuals(x);
        return true;
      }
    }
    return residuals(x) <= 1e3 * tol;
  }

  // Top-down sweep of one-dimensional monotone solves.
  void sweep(double x) {
    const double L = node_->L;
    const std::size_t d = orbit_.size();
    for (std::size_t k = d; k-- > 0;) {
      const double prev = k == 0 ? chain_[0]->y0 : orbit_[k - 1];
      const double next = k + 1 == d ? x : orbit_[k + 1];
      const double target = next + chain_[k + 1]->shift + prev;
      const Interval& p = chain_[k + 1]->preimage;
      auto g = [L](double t) { return 2.0 * t + L * std::sin(kTwoPi * t); };
      auto dg = [L](double t) { return 2.0 + kTwoPi * L * std::cos(kTwoPi * t); };
      const double glo = g(p.lo);
      const double ghi = g(p.hi);
      if ((target - glo) * (target - ghi) >= 0.0) {
        orbit_[k] = std::fabs(target - glo) < std::fabs(target - ghi) ? p.lo : p.hi;
      } else {
        orbit_[k] = numeric::solve_monotone(g, dg, target, p.lo, p.hi, 1e-13 * (L + 4.0));
      }
    }
  }

  void solve(double x) {
    if (orbit_.empty()) return;
    if (newton(x, 12)) return;
    for (int pass = 0; pass < 20; ++pass) {
      sweep(x);
      if (newton(x, 12)) return;
    }
    throw InvariantViolation("backward orbit solve did not converge at x = " + std::to_string(x));
  }

  NodePtr node_;
  std::vector<const CurveNode*> chain_;
  std::vector<double> orbit_;
  std::vector<double> diag_, rhs_, cprime_, sin_, cos_;
};

// ---------------------------------------------------------------------------
// Views.

class UCurve {
 public:
  explicit UCurve(NodePtr node) : node_(std::move(node)) {}

  [[nodiscard]] const Interval& domain() const { return node_->domain; }
  [[nodiscard]] bool fully_crossing() const { return node_->fully_crossing(); }
  [[nodiscard]] bool is_root() const { return node_->parent == nullptr; }
  [[nodiscard]] const NodePtr& node() const { return node_; }

  PointJet jet(double x) const { return evaluator().jet(x); }
  double h(double x) const { return jet(x).h; }
  double h_dot(double x) const { return jet(x).h_dot; }
  double h_ddot(double x) const { return jet(x).h_ddot; }

  CurveEvaluator evaluator() const { return CurveEvaluator(node_); }

 private:
  NodePtr node_;
};

class PairDensity {
 public:
  explicit PairDensity(NodePtr node) : node_(std::move(node)) {}

  double log_density(double x) const { return CurveEvaluator(node_).jet(x).log_rho; }
  double density(double x) const { return std::exp(log_density(x)); }
  double dlog_density(double x) const { return CurveEvaluator(node_).jet(x).dlog_rho; }
  [[nodiscard]] double log_derivative_bound() const { return node_->log_derivative_bound; }

  // Integral of the density over the domain.
  double normalization() const {
    CurveEvaluator ev(node_);
    return numeric::integrate_adaptive([&](double x) { return ev.jet(x).rho(); }, node_->domain.lo,
                                       node_->domain.hi, 0.0, kRhoRelTol)
        .value;
  }

 private:
  NodePtr node_;
};

struct MeasurePair {
  NodePtr node;
  double mass = 1.0;

  [[nodiscard]] UCurve curve() const { return UCurve(node); }
  [[nodiscard]] PairDensity density() const { return PairDensity(node); }
  [[nodiscard]] Regularity regularity() const { return node->regularity; }
  [[nodiscard]] const Interval& domain() const { return node->domain; }
  [[nodiscard]] double length() const { return node->length(); }
  [[nodiscard]] double L() const { return node->L; }
  [[nodiscard]] int depth() const { return node->depth; }
};

inline MeasurePair root_pair(double L, double y0 = 0.0, RootDensity density = RootDensity::uniform()) {
  return {make_root(L, y0, std::move(density)), 1.0};
}

// ---------------------------------------------------------------------------
// f_gamma and its inverse.

inline void require_in_domain(const CurveNode& n, double x) {
  if (!(x >= n.domain.lo - 1e-15 && x <= n.domain.hi + 1e-15)) {
    throw DomainError("x = " + std::to_string(x) + " outside the curve domain");
  }
}

inline FGamma f_gamma(const MeasurePair& pair, double x) {
  require_in_domain(*pair.node, x);
  return CurveEvaluator(pair.node).f_gamma(x);
}

inline FGamma f_gamma(const UCurve& curve, double x) {
  require_in_domain(*curve.node(), x);
  return CurveEvaluator(curve.node()).f_gamma(x);
}

// Solves f_gamma(x) = target on a bracket where f_gamma is monotone.
inline double invert_f_gamma(CurveEvaluator& ev, double target, Interval bracket) {
  auto g = [&](double x) { return ev.f_gamma(x).value; };
  auto dg = [&](double x) { return ev.f_gamma(x).d1; };
  const double tol = std::max(1e-12, 16.0 * 2.220446049250313e-16 * std::fabs(target));
  return numeric::solve_monotone(g, dg, target, bracket.lo, bracket.hi, tol);
}

inline double invert_f_gamma(const UCurve& curve, double target, Interval bracket) {
  CurveEvaluator ev(curve.node());
  return invert_f_gamma(ev, target, bracket);
}

inline double invert_f_gamma(const MeasurePair& pair, double target, Interval bracket) {
  return invert_f_gamma(pair.curve(), target, bracket);
}

// Analytic distortion bound after one step with strip exponent eta.
inline double propagated_bound(double old_bound, double L, double eta) {
  return std::pow(L, -eta) * old_bound + kC0 * std::pow(L, 1.0 - 2.0 * eta);
}

// ---------------------------------------------------------------------------
// Children.

// Builds the child whose image is the lifted interval [img_lo, img_hi] with
// preimage `pre` in the parent domain.
inline NodePtr make_child(CurveEvaluator& parent_ev, Interval pre, int orientation, double img_lo, double img_hi,
                          double rel_mass, Regularity regularity, double eta) {
  const CurveNode& parent = parent_ev.node();
  auto n = std::make_shared<CurveNode>();
  n->parent = parent_ev.node_ptr();
  n->root_density = parent.root_density;
  n->L = parent.L;
  n->y0 = parent.y0;
  n->preimage = pre;
  n->shift = std::floor(img_lo);
  n->domain = {img_lo - n->shift, img_hi - n->shift};
  n->orientation = orientation;
  n->log_rel_mass = std::log(rel_mass);
  n->regularity = regularity;
  n->log_derivative_bound = propagated_bound(parent.log_derivative_bound, parent.L, eta);
  n->depth = parent.depth + 1;
  // reference orbit at the middle of the new domain
  const double mid_img = 0.5 * (img_lo + img_hi);
  const double xp = invert_f_gamma(parent_ev, mid_img, pre);
  parent_ev.jet(xp);
  n->ref_orbit = parent_ev.orbit();
  n->ref_orbit.push_back(xp);
  n->ref_point = mid_img - n->shift;
  return n;
}

// Transports the density of `pair` to the image piece [img_lo, img_hi], which
// must come from a monotone, strip-free part of the curve.
inline MeasurePair transport_density(const MeasurePair& pair, Interval image, double eta = 0.5,
                                     Regularity regularity = Regularity::Standard) {
  CurveEvaluator ev(pair.node);
  const Interval& d = pair.domain();
  const CriticalStrips strips = critical_intervals(pair.L(), eta);
  // Find the monotone component of the domain containing the image piece.
  std::vector<double> cuts{d.lo};
  for (int m = 0; m <= 1; ++m) {
    for (const auto& s : strips.intervals) {
      for (double e : {s.lo + m, s.hi + m}) {
        if (e > d.lo && e < d.hi) cuts.push_back(e);
      }
    }
  }
  cuts.push_back(d.hi);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double mid = numeric::frac(0.5 * (lo + hi));
    const bool in_strip_part = strips.contains(mid);
    const double ylo = ev.f_gamma(lo).value;
    const double yhi = ev.f_gamma(hi).value;
    const double imin = std::min(ylo, yhi);
    const double imax = std::max(ylo, yhi);
    if (image.lo >= imin - 1e-12 && image.hi <= imax + 1e-12) {
      if (in_strip_part) throw StripOverlap("preimage of the requested piece meets the critical strip");
      const int orient = yhi > ylo ? 1 : -1;
      const double x1 = invert_f_gamma(ev, std::max(image.lo, imin), {lo, hi});
      const double x2 = invert_f_gamma(ev, std::min(image.hi, imax), {lo, hi});
      const Interval pre{std::min(x1, x2), std::max(x1, x2)};
      const double total = numeric::integrate_adaptive([&](double x) { return ev.jet(x).rho(); }, d.lo, d.hi, 0.0, kRhoRelTol)
                               .value;
      const double part = numeric::integrate_adaptive([&](double x) { return ev.jet(x).rho(); }, pre.lo,
                                                      pre.hi, 0.0, kRhoRelTol)
                              .value;
      auto child = make_child(ev, pre, orient, image.lo, image.hi, part / total, regularity, eta);
      return {child, pair.mass * part / total};
    }
  }
  throw StripOverlap("requested image piece is not the image of a single strip-free component");
}

}  // namespace stdmap::pairs
