#pragma once

// One-step decompositions of a measure pair into L / I / J / E classes.
//
// The domain of the pair is cut into consecutive segments, each with a class
// and (for L, I, J) the image piece it maps onto.  Runs of whole unit pieces
// are kept as a single "bundle" segment and only expanded into curves on
// request.  Segment masses are fractions of the pair's own mass, normalized
// so that they sum to one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "stdmap/geometry.hpp"
#include "stdmap/numeric/quadrature.hpp"
#include "stdmap/pairs/curve.hpp"

namespace stdmap::pairs {

struct CutConfig {
  double a0 = kDefaultA0;
  bool materialize_bundles = true;
  bool check_invariants = true;
};

enum class CutKind { Standard, Substandard, Full };

inline CutKind cut_kind_for(Regularity r) {
  switch (r) {
    case Regularity::FullCrossing: return CutKind::Full;
    case Regularity::Standard: return CutKind::Standard;
    case Regularity::Substandard: return CutKind::Substandard;
  }
  return CutKind::Standard;
}

struct Segment {
  Interval pre{};          // piece of the domain
  PairClass cls = PairClass::E;
  Interval image{};        // lifted image (lo < hi); unused for E
  int orientation = 1;
  double eta = 0.5;
  long bundle_first = 0;   // unit pieces [first + i, first + i + 1], i < bundle_count
  long bundle_count = 0;
  double mass = 0.0;       // fraction of the pair's mass

  [[nodiscard]] bool is_bundle() const { return bundle_count > 0; }
  [[nodiscard]] std::size_t children() const {
    if (cls == PairClass::E) return 0;
    return is_bundle() ? static_cast<std::size_t>(bundle_count) : 1;
  }
};

struct ClassMasses {
  double L = 0.0, I = 0.0, J = 0.0, E = 0.0;
  std::size_t count_L = 0, count_I = 0, count_J = 0;

  [[nodiscard]] double total() const { return L + I + J + E; }
  [[nodiscard]] double of(PairClass c) const {
    switch (c) {
      case PairClass::L: return L;
      case PairClass::I: return I;
      case PairClass::J: return J;
      case PairClass::E: return E;
    }
    return 0.0;
  }
};

struct SegmentPlan {
  CutKind kind = CutKind::Standard;
  std::vector<Segment> segments;
  ClassMasses masses;           // fractions; sum to one
  double raw_total = 0.0;       // integral of rho over the domain
  std::size_t free_components = 0;
};

// ---------------------------------------------------------------------------
// Invariants.

inline double strip_overlap(const Interval& lifted, const CriticalStrips& strips) {
  double overlap = 0.0;
  for (int m = -1; m <= 2; ++m) {
    for (const auto& s : strips.intervals) {
      const double lo = std::max(lifted.lo, s.lo + m);
      const double hi = std::min(lifted.hi, s.hi + m);
      overlap += std::max(0.0, hi - lo);
    }
  }
  return overlap;
}

// Cheap class checks: lengths, the analytic distortion bound and strip
// disjointness.  Throws InvariantViolation.
inline void check_regularity(const CurveNode& n, double a0) {
  const double L = n.L;
  const double len = n.length();
  auto fail = [&](const std::string& what) {
    throw InvariantViolation(std::string(to_string(n.regularity)) + " pair: " + what);
  };
  switch (n.regularity) {
    case Regularity::FullCrossing:
      if (!n.fully_crossing()) fail("domain length " + std::to_string(len) + " != 1");
      if (n.log_derivative_bound > 3.0 * kC0 * (1.0 + 1e-12)) fail("log-derivative bound above 3 C0");
      break;
    case Regularity::Standard:
      if (!(len > a0 && len <= 1.0 + 1e-12)) fail("length " + std::to_string(len) + " outside (a0, 1]");
      if (n.log_derivative_bound > 3.0 * kC0 * (1.0 + 1e-12)) fail("log-derivative bound above 3 C0");
      break;
    case Regularity::Substandard: {
      if (!(len >= std::pow(L, -0.5) * (1.0 - 1e-12) && len <= a0 * (1.0 + 1e-12))) {
        fail("length " + std::to_string(len) + " outside [L^-1/2, a0]");
      }
      if (n.log_derivative_bound > 2.0 * kC0 * std::sqrt(L) * (1.0 + 1e-12)) {
        fail("log-derivative bound above 2 C0 L^1/2");
      }
      if (strip_overlap(n.domain, critical_intervals(L, 0.5)) > 1e-12) fail("curve meets S_1/2");
      break;
    }
  }
}

struct SampledCheck {
  double max_h_dot = 0.0;
  double max_h_ddot = 0.0;
  double max_dlog_rho = 0.0;
  bool ok = true;
  std::string failure;
};

// u-curve and distortion bounds checked at `samples` points.
inline SampledCheck sample_invariants(const NodePtr& node, int samples = 1000) {
  CurveEvaluator ev(node);
  SampledCheck r;
  const Interval d = node->domain;
  for (int i = 0; i < samples; ++i) {
    const double x = d.lo + (d.hi - d.lo) * (static_cast<double>(i) + 0.5) / samples;
    const PointJet j = ev.jet(x);
    r.max_h_dot = std::max(r.max_h_dot, std::fabs(j.h_dot));
    r.max_h_ddot = std::max(r.max_h_ddot, std::fabs(j.h_ddot));
    r.max_dlog_rho = std::max(r.max_dlog_rho, std::fabs(j.dlog_rho));
  }
  if (r.max_h_dot > 0.1) {
    r.ok = false;
    r.failure = "|h'| > 1/10";
  } else if (r.max_h_ddot > node->L) {
    r.ok = false;
    r.failure = "|h''| > L";
  } else if (r.max_dlog_rho > node->log_derivative_bound * (1.0 + 1e-9) + 1e-12) {
    r.ok = false;
    r.failure = "|d log rho| above its bound";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Planning.

namespace detail {

struct ImagePiece {
  double lo, hi;  // image coordinates
  PairClass cls;
  long bundle_first = 0;
  long bundle_count = 0;
};

inline PairClass classify_leftover(double len, CutKind kind, double a0, double L) {
  if (kind == CutKind::Standard) return PairClass::E;
  if (len > a0) return PairClass::I;
  if (len >= std::pow(L, -0.5)) return PairClass::J;
  return PairClass::E;
}

// Unit pieces plus at most two leftovers of a monotone image [lo, hi].
inline void split_at_integers(double lo, double hi, CutKind kind, double a0, double L,
                              std::vector<ImagePiece>& out) {
  const PairClass whole = kind == CutKind::Substandard ? PairClass::I : PairClass::L;
  const double n1 = std::ceil(lo);
  const double n2 = std::floor(hi);
  if (n1 > n2) {
    out.push_back({lo, hi, classify_leftover(hi - lo, kind, a0, L)});
    return;
  }
  if (n1 > lo) out.push_back({lo, n1, classify_leftover(n1 - lo, kind, a0, L)});
  if (n2 > n1) out.push_back({n1, n2, whole, static_cast<long>(n1), static_cast<long>(n2 - n1)});
  if (hi > n2) out.push_back({n2, hi, classify_leftover(hi - n2, kind, a0, L)});
}

// Image of a zone component: strip parts to E, the rest to J / E by length,
// with long pieces split evenly.
inline void split_zone_image(double lo, double hi, const CriticalStrips& s_half, double a0, double L,
                             std::vector<ImagePiece>& out) {
  std::vector<Interval> removed;
  for (long m = static_cast<long>(std::floor(lo)) - 1; m <= static_cast<long>(std::floor(hi)) + 1; ++m) {
    for (const auto& s : s_half.intervals) {
      const double a = std::max(lo, s.lo + static_cast<double>(m));
      const double b = std::min(hi, s.hi + static_cast<double>(m));
      if (b > a) removed.push_back({a, b});
    }
  }
  std::sort(removed.begin(), removed.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  const double min_len = std::pow(L, -0.5);
  auto emit_zeta = [&](double a, double b) {
    const double len = b - a;
    if (len <= 0.0) return;
    if (len < min_len) {
      out.push_back({a, b, PairClass::E});
    } else if (len <= a0) {
      out.push_back({a, b, PairClass::J});
    } else {
      const auto k = static_cast<long>(std::ceil(len / a0));
      const double piece = len / static_cast<double>(k);
      const PairClass c = piece >= min_len ? PairClass::J : PairClass::E;
      for (long i = 0; i < k; ++i) {
        const double p0 = a + piece * static_cast<double>(i);
        const double p1 = i + 1 == k ? b : a + piece * static_cast<double>(i + 1);
        out.push_back({p0, p1, c});
      }
    }
  };
  double cursor = lo;
  for (const auto& r : removed) {
    emit_zeta(cursor, r.lo);
    out.push_back({r.lo, r.hi, PairClass::E});
    cursor = r.hi;
  }
  emit_zeta(cursor, hi);
}

}  // namespace detail

// Builds the segment plan of a pair.  `ev` must evaluate the pair's curve.
inline SegmentPlan plan_cut(CurveEvaluator& ev, CutKind kind, const CutConfig& cfg) {
  const CurveNode& node = ev.node();
  const double L = node.L;
  const Interval d = node.domain;
  const CriticalStrips s_half = critical_intervals(L, 0.5);
  const CriticalStrips s_quarter = critical_intervals(L, 0.25);

  SegmentPlan plan;
  plan.kind = kind;

  // Elementary intervals between strip edges.
  std::vector<double> cuts{d.lo, d.hi};
  for (int m = 0; m <= 1; ++m) {
    for (const CriticalStrips* s : {&s_half, &s_quarter}) {
      if (s == &s_quarter && kind != CutKind::Full) continue;
      for (const auto& iv : s->intervals) {
        for (double e : {iv.lo + m, iv.hi + m}) {
          if (e > d.lo && e < d.hi) cuts.push_back(e);
        }
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());

  enum class Zone { Free, Half, Quarter };
  auto zone_of = [&](double mid) {
    const double x = numeric::frac(mid);
    if (kind == CutKind::Full && s_quarter.contains(x)) return Zone::Quarter;
    if (s_half.contains(x)) return Zone::Half;
    return Zone::Free;
  };

  std::vector<Segment>& segs = plan.segments;
  auto emit_monotone = [&](Interval comp, double eta, const std::vector<detail::ImagePiece>& pieces, int orient,
                           double img_at_lo, double img_at_hi) {
    // Domain breakpoints for every piece, in domain order.
    std::vector<Segment> local;
    local.reserve(pieces.size());
    for (const auto& p : pieces) {
      auto pre_of = [&](double t) {
        if (t == img_at_lo) return comp.lo;
        if (t == img_at_hi) return comp.hi;
        return invert_f_gamma(ev, t, comp);
      };
      const double xa = pre_of(p.lo);
      const double xb = pre_of(p.hi);
      Segment s;
      s.pre = {std::min(xa, xb), std::max(xa, xb)};
      s.cls = p.cls;
      s.image = {p.lo, p.hi};
      s.orientation = orient;
      s.eta = eta;
      s.bundle_first = p.bundle_first;
      s.bundle_count = p.bundle_count;
      local.push_back(s);
    }
    if (orient < 0) std::reverse(local.begin(), local.end());
    // Make the pieces tile the component exactly.
    for (std::size_t i = 0; i < local.size(); ++i) {
      if (i == 0) local[i].pre.lo = comp.lo;
      if (i + 1 == local.size()) local[i].pre.hi = comp.hi;
      if (i > 0) local[i].pre.lo = local[i - 1].pre.hi;
    }
    segs.insert(segs.end(), local.begin(), local.end());
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Interval comp{cuts[i], cuts[i + 1]};
    if (!(comp.hi > comp.lo)) continue;
    const Zone z = zone_of(0.5 * (comp.lo + comp.hi));
    if (z == Zone::Quarter || (z == Zone::Half && kind != CutKind::Full)) {
      if (kind == CutKind::Substandard && z == Zone::Half && cfg.check_invariants && comp.length() > 1e-12) {
        throw InvariantViolation("substandard pair meets S_1/2 on [" + num(comp.lo) + ", " + num(comp.hi) + "]");
      }
      Segment s;
      s.pre = comp;
      s.cls = PairClass::E;
      segs.push_back(s);
      continue;
    }
    const double ya = ev.f_gamma(comp.lo).value;
    const double yb = ev.f_gamma(comp.hi).value;
    const int orient = yb >= ya ? 1 : -1;
    const double ilo = std::min(ya, yb);
    const double ihi = std::max(ya, yb);
    std::vector<detail::ImagePiece> pieces;
    if (z == Zone::Half) {
      detail::split_zone_image(ilo, ihi, s_half, cfg.a0, L, pieces);
      emit_monotone(comp, 0.25, pieces, orient, ya, yb);
      continue;
    }
    ++plan.free_components;
    if (kind == CutKind::Substandard) {
      // Pieces of length in [L^-1/2, 2 L^-1/2), handled one by one.
      const auto k = std::max<long>(1, static_cast<long>(std::floor(comp.length() * std::sqrt(L))));
      for (long j = 0; j < k; ++j) {
        const double a = comp.lo + comp.length() * static_cast<double>(j) / static_cast<double>(k);
        const double b = j + 1 == k ? comp.hi : comp.lo + comp.length() * static_cast<double>(j + 1) / static_cast<double>(k);
        const double pa = j == 0 ? ya : ev.f_gamma(a).value;
        const double pb = j + 1 == k ? yb : ev.f_gamma(b).value;
        std::vector<detail::ImagePiece> sub;
        detail::split_at_integers(std::min(pa, pb), std::max(pa, pb), kind, cfg.a0, L, sub);
        emit_monotone({a, b}, 0.5, sub, orient, pa, pb);
      }
      continue;
    }
    detail::split_at_integers(ilo, ihi, kind, cfg.a0, L, pieces);
    emit_monotone(comp, 0.5, pieces, orient, ya, yb);
  }

  if (cfg.check_invariants && plan.free_components > 3 && kind != CutKind::Substandard) {
    throw InvariantViolation("curve minus S_1/2 has " + std::to_string(plan.free_components) +
                             " components (expected at most three)");
  }

  // J pieces must avoid S_1/2.
  if (cfg.check_invariants) {
    for (const auto& s : segs) {
      if (s.cls == PairClass::J && strip_overlap(s.image, s_half) > 1e-12) {
        throw InvariantViolation("J-class image piece meets S_1/2");
      }
    }
  }

  // Masses.
  double raw = 0.0;
  std::vector<double> part(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Interval& p = segs[i].pre;
    part[i] = p.hi > p.lo ? numeric::integrate_adaptive([&](double x) { return ev.jet(x).rho(); }, p.lo, p.hi, 0.0, kRhoRelTol)
                                .value
                          : 0.0;
    raw += part[i];
  }
  plan.raw_total = raw;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    segs[i].mass = part[i] / raw;
    auto& m = plan.masses;
    switch (segs[i].cls) {
      case PairClass::L:
        m.L += segs[i].mass;
        m.count_L += segs[i].children();
        break;
      case PairClass::I:
        m.I += segs[i].mass;
        m.count_I += segs[i].children();
        break;
      case PairClass::J:
        m.J += segs[i].mass;
        m.count_J += segs[i].children();
        break;
      case PairClass::E:
        m.E += segs[i].mass;
        break;
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Materialization.

inline Regularity regularity_for(PairClass c) {
  switch (c) {
    case PairClass::L: return Regularity::FullCrossing;
    case PairClass::I: return Regularity::Standard;
    default: return Regularity::Substandard;
  }
}

// Domain point of a bundle whose image coordinate is t.
inline double bundle_preimage(CurveEvaluator& ev, const Segment& s, double t) {
  const double lo_t = s.orientation > 0 ? s.image.lo : s.image.hi;
  const double hi_t = s.orientation > 0 ? s.image.hi : s.image.lo;
  if (t == lo_t) return s.pre.lo;
  if (t == hi_t) return s.pre.hi;
  return invert_f_gamma(ev, t, s.pre);
}

// The single child of a non-bundle segment.
inline NodePtr materialize_single(CurveEvaluator& ev, const Segment& s) {
  return make_child(ev, s.pre, s.orientation, s.image.lo, s.image.hi, s.mass, regularity_for(s.cls), s.eta);
}

// Child i of a bundle; `rel_mass` is its fraction of the parent's mass.
inline NodePtr materialize_piece(CurveEvaluator& ev, const Segment& s, long i, Interval pre, double rel_mass) {
  const double n = static_cast<double>(s.bundle_first + i);
  return make_child(ev, pre, s.orientation, n, n + 1.0, rel_mass, regularity_for(s.cls), s.eta);
}

// All children of a bundle with masses that add up to the segment mass.
inline std::vector<std::pair<NodePtr, double>> materialize_bundle(CurveEvaluator& ev, const Segment& s) {
  const auto count = static_cast<std::size_t>(s.bundle_count);
  std::vector<double> edges(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    edges[i] = bundle_preimage(ev, s, static_cast<double>(s.bundle_first) + static_cast<double>(i));
  }
  std::vector<double> raw(count);
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double a = std::min(edges[i], edges[i + 1]);
    const double b = std::max(edges[i], edges[i + 1]);
    raw[i] = numeric::integrate_adaptive([&](double x) { return ev.jet(x).rho(); }, a, b, 0.0, kRhoRelTol).value;
    sum += raw[i];
  }
  std::vector<std::pair<NodePtr, double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double rel = s.mass * raw[i] / sum;
    const Interval pre{std::min(edges[i], edges[i + 1]), std::max(edges[i], edges[i + 1])};
    out.emplace_back(materialize_piece(ev, s, static_cast<long>(i), pre, rel), rel);
  }
  return out;
}

// Picks the child of a bundle that contains the point whose cumulative mass
// (from the segment start, as a fraction of the segment) is u.
inline std::pair<NodePtr, double> materialize_bundle_at(CurveEvaluator& ev, const Segment& s, double u,
                                                         double raw_total) {
  const double target = u * s.mass * raw_total;
  auto rho = [&](double x) { return ev.jet(x).rho(); };
  double lo = s.pre.lo;
  double hi = s.pre.hi;
  double x = lo + (hi - lo) * u;
  double acc = numeric::integrate_adaptive(rho, s.pre.lo, x, 0.0, kRhoRelTol).value;
  for (int it = 0; it < 100; ++it) {
    const double r = acc - target;
    if (r > 0.0) hi = x; else lo = x;
    if (std::fabs(r) <= 1e-14 * std::max(1.0, target) || hi - lo <= 1e-15) break;
    double next = x - r / rho(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = numeric::integrate_adaptive(rho, std::min(x, next), std::max(x, next), 0.0, kRhoRelTol).value;
    acc += next > x ? step : -step;
    x = next;
  }
  const double t = ev.f_gamma(x).value;
  auto i = static_cast<long>(std::floor(t)) - s.bundle_first;
  i = std::clamp<long>(i, 0, s.bundle_count - 1);
  const double n = static_cast<double>(s.bundle_first + i);
  const double e0 = bundle_preimage(ev, s, n);
  const double e1 = bundle_preimage(ev, s, n + 1.0);
  const Interval pre{std::min(e0, e1), std::max(e0, e1)};
  const double rel = numeric::integrate_adaptive(rho, pre.lo, pre.hi, 0.0, kRhoRelTol).value / raw_total;
  return {materialize_piece(ev, s, i, pre, rel), rel};
}

// ---------------------------------------------------------------------------
// Public cut operations.

struct DecompositionStep {
  std::vector<MeasurePair> L, I, J;
  ClassMasses masses;          // absolute: scaled by the input mass
  SegmentPlan plan;

  [[nodiscard]] double total() const { return masses.total(); }
};

inline DecompositionStep cut(const MeasurePair& pair, CutKind kind, const CutConfig& cfg = {}) {
  if (cfg.check_invariants) check_regularity(*pair.node, cfg.a0);
  CurveEvaluator ev(pair.node);
  DecompositionStep out;
  out.plan = plan_cut(ev, kind, cfg);
  out.masses = out.plan.masses;
  out.masses.L *= pair.mass;
  out.masses.I *= pair.mass;
  out.masses.J *= pair.mass;
  out.masses.E *= pair.mass;
  for (const auto& s : out.plan.segments) {
    if (s.cls == PairClass::E) continue;
    auto& list = s.cls == PairClass::L ? out.L : s.cls == PairClass::I ? out.I : out.J;
    if (!s.is_bundle()) {
      list.push_back({materialize_single(ev, s), pair.mass * s.mass});
    } else if (cfg.materialize_bundles) {
      for (auto& [node, rel] : materialize_bundle(ev, s)) list.push_back({node, pair.mass * rel});
    }
  }
  return out;
}

// The cut matching the pair's regularity.
inline DecompositionStep cut(const MeasurePair& pair, const CutConfig& cfg = {}) {
  return cut(pair, cut_kind_for(pair.regularity()), cfg);
}

// Fully-crossing pairs are standard pairs too and are accepted here.
inline DecompositionStep cut_standard(const MeasurePair& pair, const CutConfig& cfg = {}) {
  if (pair.regularity() == Regularity::Substandard) throw InvariantViolation("cut_standard needs a standard pair");
  return cut(pair, CutKind::Standard, cfg);
}

inline DecompositionStep cut_substandard(const MeasurePair& pair, const CutConfig& cfg = {}) {
  if (pair.regularity() != Regularity::Substandard) {
    throw InvariantViolation("cut_substandard needs a substandard pair");
  }
  return cut(pair, CutKind::Substandard, cfg);
}

inline DecompositionStep cut_full(const MeasurePair& pair, const CutConfig& cfg = {}) {
  if (pair.regularity() != Regularity::FullCrossing) {
    throw InvariantViolation("cut_full needs a fully-crossing pair");
  }
  return cut(pair, CutKind::Full, cfg);
}

}  // namespace stdmap::pairs
