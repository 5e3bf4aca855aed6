#pragma once

// Iterated decomposition of a fully-crossing pair.
//
// Exhaustive mode pushes every L / I / J curve forward; the last step is
// evaluated from segment masses only, so curves are materialized for steps
// 1..n-1 and the cap bounds that number.  Sampled mode follows S independent
// mass-proportional paths through the curve tree.  Along a path the weight W
// is the product of the non-E fractions met so far, and W * (class fraction)
// is an unbiased estimate of each class mass at the next step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stdmap/errors.hpp"
#include "stdmap/numeric/parallel.hpp"
#include "stdmap/numeric/rng.hpp"
#include "stdmap/numeric/summation.hpp"
#include "stdmap/pairs/cuts.hpp"

namespace stdmap::pairs {

enum class DecompositionMode { Exhaustive, Sampled };

inline const char* to_string(DecompositionMode m) {
  return m == DecompositionMode::Exhaustive ? "exhaustive" : "sampled";
}

struct DecompositionConfig {
  DecompositionMode mode = DecompositionMode::Sampled;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::size_t cap = 10'000'000;
  double a0 = kDefaultA0;
  unsigned threads = 1;
  bool keep_inventory = false;
  std::size_t inventory_limit = 100'000;
};

struct LedgerRow {
  int step = 0;
  double m_L = 0.0, m_I = 0.0, m_J = 0.0, m_E = 0.0;
  double se_L = 0.0, se_I = 0.0, se_J = 0.0, se_E = 0.0;
  bool has_stderr = false;
  double curves_alive = 0.0;

  [[nodiscard]] double total() const { return m_L + m_I + m_J + m_E; }
};

struct InventoryEntry {
  std::size_t id = 0;
  std::size_t parent_id = 0;  // 0 for children of the seed
  int step = 0;
  PairClass cls = PairClass::L;
  Interval domain{};
  Interval preimage{};
  double shift = 0.0;
  double mass = 0.0;
  double log_derivative_bound = 0.0;
};

struct DecompositionLedger {
  DecompositionMode mode = DecompositionMode::Sampled;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double L = 0.0;
  double a0 = kDefaultA0;
  std::vector<LedgerRow> rows;  // rows[k] is step k; rows[0] is the seed
  std::vector<InventoryEntry> inventory;
  bool inventory_truncated = false;

  [[nodiscard]] const LedgerRow& at(int step) const { return rows.at(static_cast<std::size_t>(step)); }
};

namespace detail {

inline PairClass class_of(Regularity r) {
  switch (r) {
    case Regularity::FullCrossing: return PairClass::L;
    case Regularity::Standard: return PairClass::I;
    default: return PairClass::J;
  }
}

struct Live {
  NodePtr node;
  double mass;
  std::size_t id;
};

inline DecompositionLedger run_exhaustive(const MeasurePair& seed, int n, const DecompositionConfig& cfg) {
  DecompositionLedger ledger;
  ledger.rows.resize(static_cast<std::size_t>(n) + 1);
  ledger.rows[0] = {0, seed.mass, 0.0, 0.0, 0.0};
  ledger.rows[0].curves_alive = 1.0;
  const CutConfig cut_cfg{cfg.a0, false, true};

  std::vector<Live> live{{seed.node, seed.mass, 0}};
  std::size_t next_id = 1;
  double m_E = 0.0;
  for (int k = 0; k < n; ++k) {
    const bool last = k + 1 == n;
    std::vector<SegmentPlan> plans(live.size());
    numeric::parallel_for(live.size(), cfg.threads, [&](std::size_t i) {
      CurveEvaluator ev(live[i].node);
      check_regularity(*live[i].node, cfg.a0);
      plans[i] = plan_cut(ev, cut_kind_for(live[i].node->regularity), cut_cfg);
    });
    std::vector<double> cL(live.size()), cI(live.size()), cJ(live.size()), cE(live.size());
    double alive = 0.0;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& m = plans[i].masses;
      cL[i] = live[i].mass * m.L;
      cI[i] = live[i].mass * m.I;
      cJ[i] = live[i].mass * m.J;
      cE[i] = live[i].mass * m.E;
      alive += static_cast<double>(m.count_L + m.count_I + m.count_J);
    }
    m_E += numeric::pairwise_sum(cE);
    LedgerRow& row = ledger.rows[static_cast<std::size_t>(k) + 1];
    row.step = k + 1;
    row.m_L = numeric::pairwise_sum(cL);
    row.m_I = numeric::pairwise_sum(cI);
    row.m_J = numeric::pairwise_sum(cJ);
    row.m_E = m_E;
    row.curves_alive = alive;
    if (last) break;
    if (alive > static_cast<double>(cfg.cap)) {
      throw BudgetExceeded("step " + std::to_string(k + 1) + " needs " + std::to_string(static_cast<long long>(alive)) +
                           " curves, above the cap of " + std::to_string(cfg.cap));
    }
    std::vector<std::vector<Live>> kids(live.size());
    numeric::parallel_for(live.size(), cfg.threads, [&](std::size_t i) {
      CurveEvaluator ev(live[i].node);
      for (const auto& s : plans[i].segments) {
        if (s.cls == PairClass::E || s.mass <= 0.0) continue;
        if (s.is_bundle()) {
          for (auto& [node, rel] : materialize_bundle(ev, s)) kids[i].push_back({node, live[i].mass * rel, 0});
        } else {
          kids[i].push_back({materialize_single(ev, s), live[i].mass * s.mass, 0});
        }
      }
    });
    std::vector<Live> next;
    next.reserve(static_cast<std::size_t>(alive));
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (auto& c : kids[i]) {
        c.id = next_id++;
        if (cfg.keep_inventory) {
          if (ledger.inventory.size() < cfg.inventory_limit) {
            const CurveNode& nd = *c.node;
            ledger.inventory.push_back({c.id, live[i].id, k + 1, class_of(nd.regularity), nd.domain, nd.preimage,
                                        nd.shift, c.mass, nd.log_derivative_bound});
          } else {
            ledger.inventory_truncated = true;
          }
        }
        next.push_back(std::move(c));
      }
      kids[i].clear();
      kids[i].shrink_to_fit();
    }
    live = std::move(next);
  }
  return ledger;
}

inline DecompositionLedger run_sampled(const MeasurePair& seed, int n, const DecompositionConfig& cfg) {
  if (cfg.samples == 0) throw InvalidArgument("sampled mode needs at least one sample path");
  const std::size_t S = cfg.samples;
  const std::size_t steps = static_cast<std::size_t>(n) + 1;
  // profiles[path][step][class]
  std::vector<double> profiles(S * steps * 4, 0.0);
  std::vector<unsigned char> alive(S * steps, 0);
  const CutConfig cut_cfg{cfg.a0, false, true};
  auto prof = [&](std::size_t p, std::size_t k, int c) -> double& { return profiles[(p * steps + k) * 4 + c]; };

  numeric::parallel_for(S, cfg.threads, [&](std::size_t p) {
    numeric::SampleStream rng(cfg.seed, p);
    NodePtr node = seed.node;
    double W = seed.mass;
    prof(p, 0, 0) = W;
    alive[p * steps] = 1;
    for (std::size_t k = 0; k + 1 < steps; ++k) {
      if (W <= 0.0) {
        prof(p, k + 1, 3) = prof(p, k, 3);
        continue;
      }
      CurveEvaluator ev(node);
      check_regularity(*node, cfg.a0);
      const SegmentPlan plan = plan_cut(ev, cut_kind_for(node->regularity), cut_cfg);
      const auto& m = plan.masses;
      prof(p, k + 1, 0) = W * m.L;
      prof(p, k + 1, 1) = W * m.I;
      prof(p, k + 1, 2) = W * m.J;
      prof(p, k + 1, 3) = prof(p, k, 3) + W * m.E;
      const double keep = m.L + m.I + m.J;
      if (k + 2 == steps) {
        alive[p * steps + k + 1] = keep > 0.0;
        break;
      }
      if (!(keep > 0.0)) {
        W = 0.0;
        continue;
      }
      // Segment, then position inside it, both proportional to mass.
      const double u = rng.uniform() * keep;
      const double v = rng.uniform();
      double acc = 0.0;
      const Segment* chosen = nullptr;
      for (const auto& s : plan.segments) {
        if (s.cls == PairClass::E || s.mass <= 0.0) continue;
        chosen = &s;
        acc += s.mass;
        if (u < acc) break;
      }
      NodePtr child = chosen->is_bundle() ? materialize_bundle_at(ev, *chosen, v, plan.raw_total).first
                                          : materialize_single(ev, *chosen);
      W *= keep;
      node = std::move(child);
      alive[p * steps + k + 1] = 1;
    }
  });

  DecompositionLedger ledger;
  ledger.rows.resize(steps);
  std::vector<double> col(S);
  const double rootS = std::sqrt(static_cast<double>(S));
  for (std::size_t k = 0; k < steps; ++k) {
    LedgerRow& row = ledger.rows[k];
    row.step = static_cast<int>(k);
    row.has_stderr = true;
    double* means[4] = {&row.m_L, &row.m_I, &row.m_J, &row.m_E};
    double* errs[4] = {&row.se_L, &row.se_I, &row.se_J, &row.se_E};
    for (int c = 0; c < 4; ++c) {
      for (std::size_t p = 0; p < S; ++p) col[p] = prof(p, k, c);
      const double mean = numeric::pairwise_sum(col) / static_cast<double>(S);
      for (std::size_t p = 0; p < S; ++p) col[p] = (col[p] - mean) * (col[p] - mean);
      const double var = S > 1 ? numeric::pairwise_sum(col) / static_cast<double>(S - 1) : 0.0;
      *means[c] = mean;
      *errs[c] = std::sqrt(var) / rootS;
    }
    double count = 0.0;
    for (std::size_t p = 0; p < S; ++p) count += alive[p * steps + k];
    row.curves_alive = count;
  }
  return ledger;
}

}  // namespace detail

inline DecompositionLedger iterate_decomposition(const MeasurePair& seed, int n, const DecompositionConfig& cfg = {}) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (seed.regularity() != Regularity::FullCrossing) throw InvariantViolation("seed must be fully crossing");
  if (!(cfg.a0 > 0.0 && cfg.a0 <= 0.125)) throw InvalidArgument("a0 must lie in (0, 1/8]");
  DecompositionLedger ledger = cfg.mode == DecompositionMode::Exhaustive ? detail::run_exhaustive(seed, n, cfg)
                                                                         : detail::run_sampled(seed, n, cfg);
  ledger.mode = cfg.mode;
  ledger.samples = cfg.mode == DecompositionMode::Sampled ? cfg.samples : 0;
  ledger.seed = cfg.seed;
  ledger.L = seed.L();
  ledger.a0 = cfg.a0;
  for (const auto& r : ledger.rows) {
    if (std::fabs(r.total() - seed.mass) > 1e-9 * std::max(1.0, seed.mass)) {
      throw InvariantViolation("class masses at step " + std::to_string(r.step) + " sum to " +
                               std::to_string(r.total()));
    }
  }
  return ledger;
}

}  // namespace stdmap::pairs
