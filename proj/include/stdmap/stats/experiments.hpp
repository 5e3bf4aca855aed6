#pragma once

// Ensemble experiments: Birkhoff sums, correlations, the CLT and the slow-fast
// diffusion limit.  Sample i always draws from SampleStream(seed, i) and writes
// into slot i, and reductions are pairwise over the slots, so results do not
// depend on the thread count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stdmap/core_maps.hpp"
#include "stdmap/errors.hpp"
#include "stdmap/numeric/parallel.hpp"
#include "stdmap/numeric/quadrature.hpp"
#include "stdmap/numeric/rng.hpp"
#include "stdmap/numeric/summation.hpp"
#include "stdmap/observables.hpp"
#include "stdmap/stats/ks.hpp"

namespace stdmap::stats {

// S_N phi along the hat-F orbit of p0 (phi reads the x-coordinate).
inline double birkhoff_sum(TorusPoint<double> p, const Observable& phi, std::int64_t N, DoubleDouble L) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  numeric::CompensatedSum s;
  for (std::int64_t i = 0; i < N; ++i) {
    s += phi(p.x);
    if (i + 1 < N) p = step_hatF(p, L);
  }
  return s.value();
}

inline double birkhoff_sum(TorusPoint<double> p, const Observable& phi, std::int64_t N, double L) {
  return birkhoff_sum(p, phi, N, DoubleDouble(L));
}

inline double observable_mean(const Observable& phi) {
  return numeric::integrate_adaptive([&](double x) { return phi(x); }, 0.0, 1.0, 1e-13).value;
}

// int_0^1 phi^2 for mean-zero phi.
inline double variance_of_observable(const Observable& phi) {
  const double mean = observable_mean(phi);
  if (std::fabs(mean) > 1e-10) throw NotMeanZero("observable mean " + num(mean) + " is not zero");
  return numeric::integrate_adaptive([&](double x) { return phi(x) * phi(x); }, 0.0, 1.0, 1e-13).value;
}

// ---------------------------------------------------------------------------
// Summaries.

struct SampleSummary {
  std::size_t M = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased
  double skewness = 0.0;
  double ks = 0.0;         // against N(0, reference_variance)
  double reference_variance = 0.0;
  double stderr_mean = 0.0;
  double stderr_variance = 0.0;
  std::int64_t N = 0;
  double L = 0.0;
  double n_ratio = 0.0;    // N * L^-1/4
  double scale_factor = 0.0;
  std::vector<std::string> warnings;
  std::vector<double> samples;
};

inline SampleSummary summarize(std::vector<double> samples, double reference_variance) {
  if (samples.empty()) throw EmptySample("no samples to summarize");
  SampleSummary s;
  s.M = samples.size();
  const double m = static_cast<double>(s.M);
  s.mean = numeric::pairwise_sum(samples) / m;
  std::vector<double> w(samples.size());
  auto central = [&](int p) {
    for (std::size_t i = 0; i < samples.size(); ++i) w[i] = std::pow(samples[i] - s.mean, p);
    return numeric::pairwise_sum(w) / m;
  };
  const double m2 = central(2);
  const double m3 = central(3);
  const double m4 = central(4);
  s.variance = s.M > 1 ? m2 * m / (m - 1.0) : 0.0;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.stderr_mean = std::sqrt(s.variance / m);
  s.stderr_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / m);
  s.reference_variance = reference_variance;
  s.ks = ks_normal(samples, reference_variance);
  s.samples = std::move(samples);
  return s;
}

// ---------------------------------------------------------------------------
// CLT.

struct ExperimentConfig {
  MapParams params;
  std::optional<std::int64_t> N;  // defaults: see resolve_N
  std::size_t M = 10000;
  std::uint64_t seed = 0;
  Observable phi = Observable::sine();
  double a = 0.0;  // slow-variable interval for the diffusion experiment
  double b = 1.0;
  unsigned threads = 1;
};

// Explicit N, else floor(L^beta) when alpha is known, else floor(L^(1/5)).
inline std::int64_t resolve_N(const ExperimentConfig& cfg) {
  if (cfg.N) return *cfg.N;
  if (cfg.params.N_of_L) return *cfg.params.N_of_L;
  return MapParams::robust_floor(std::pow(cfg.params.L, 0.2));
}

inline void note_regime(SampleSummary& s) {
  s.n_ratio = static_cast<double>(s.N) * std::pow(s.L, -0.25);
  if (s.n_ratio > 0.5) s.warnings.push_back("N * L^-1/4 = " + num(s.n_ratio) + " exceeds 0.5");
}

inline SampleSummary clt_experiment(const ExperimentConfig& cfg) {
  const std::int64_t N = resolve_N(cfg);
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (cfg.M < 1) throw InvalidArgument("M must be at least 1");
  if (!(cfg.params.L > 0.0)) throw InvalidArgument("L must be positive");
  const double sigma2 = variance_of_observable(cfg.phi);
  if (!(sigma2 > 0.0)) throw InvalidArgument("observable is identically zero");
  const DoubleDouble L(cfg.params.L);
  const double root_n = std::sqrt(static_cast<double>(N));
  std::vector<double> v(cfg.M);
  numeric::parallel_for(cfg.M, cfg.threads, [&](std::size_t i) {
    numeric::SampleStream rng(cfg.seed, i);
    const double x = rng.uniform();
    const double y = rng.uniform();
    v[i] = birkhoff_sum({x, y}, cfg.phi, N, L) / root_n;
  });
  SampleSummary s = summarize(std::move(v), sigma2);
  s.N = N;
  s.L = cfg.params.L;
  s.scale_factor = 1.0;
  note_regime(s);
  return s;
}

// ---------------------------------------------------------------------------
// Diffusion through the conjugated route.

// Z^N - Z for one (X, Z): iterate hat-F from the conjugate of (X, Y) with
// Y = frac(eps^-(1+alpha) Z) and add up eps sin(2 pi x_i), i < N.
inline double slow_displacement(double X, double Z, const MapParams& params, std::int64_t N) {
  const DoubleDouble yz = numeric::frac(numeric::two_prod(params.shear(), Z));
  const double Y = detail::round_reduced<double>(yz);
  TorusPoint<double> p = conjugate(TorusPoint<double>{X, Y});
  const DoubleDouble L = params.slow_fast_L();
  numeric::CompensatedSum s;
  for (std::int64_t i = 0; i < N; ++i) {
    s += numeric::sin_2pi(DoubleDouble(p.x)).hi;
    if (i + 1 < N) p = step_hatF(p, L);
  }
  return *params.epsilon * s.value();
}

inline SampleSummary diffusion_experiment(const ExperimentConfig& cfg) {
  const MapParams& params = cfg.params;
  if (!params.has_slow_fast()) throw InvalidArgument("diffusion needs epsilon and alpha");
  if (!(cfg.b > cfg.a)) throw InvalidArgument("slow interval must satisfy a < b");
  if (cfg.M < 1) throw InvalidArgument("M must be at least 1");
  const double eps = *params.epsilon;
  const std::int64_t N = cfg.N ? *cfg.N : MapParams::robust_floor(1.0 / (eps * eps));
  if (N < 1) throw InvalidArgument("N must be at least 1");
  std::vector<double> v(cfg.M);
  numeric::parallel_for(cfg.M, cfg.threads, [&](std::size_t i) {
    numeric::SampleStream rng(cfg.seed, i);
    const double X = rng.uniform();
    const double Z = rng.uniform(cfg.a, cfg.b);
    v[i] = slow_displacement(X, Z, params, N);
  });
  SampleSummary s = summarize(std::move(v), 0.5);
  s.N = N;
  s.L = params.L;
  s.scale_factor = eps * std::sqrt(static_cast<double>(N));
  note_regime(s);
  if (*params.alpha <= 8.0) s.warnings.push_back("alpha <= 8 lies outside the theorem's regime");
  return s;
}

// ---------------------------------------------------------------------------
// Correlations.

enum class CorrelationMethod { MonteCarlo, YGridHybrid };

inline const char* to_string(CorrelationMethod m) {
  return m == CorrelationMethod::MonteCarlo ? "montecarlo" : "ygrid";
}

struct CorrelationConfig {
  double L = 1e3;
  int n = 1;
  CorrelationMethod method = CorrelationMethod::MonteCarlo;
  std::size_t M = 100000;  // points (Monte Carlo) or x strata (y-grid)
  std::size_t K = 64;      // y-grid size
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct CorrelationResult {
  int n = 0;
  double L = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  CorrelationMethod method = CorrelationMethod::MonteCarlo;
  double bound_value = 0.0;  // (n - 1) L^-3/4 + L^-1/2
  std::size_t M = 0;
};

inline double correlation_bound(int n, double L) {
  return static_cast<double>(n - 1) * std::pow(L, -0.75) + std::pow(L, -0.5);
}

// int psi * phi o F^n - int phi int psi over Lebesgue measure on the torus.
inline CorrelationResult correlation(const Observable& phi, const Observable& psi, const CorrelationConfig& cfg) {
  if (cfg.n < 1) throw InvalidArgument("lag must be at least 1");
  if (cfg.M < 2) throw InvalidArgument("need at least two sample points");
  if (cfg.method == CorrelationMethod::YGridHybrid && cfg.K < 1) throw InvalidArgument("K must be positive");
  const DoubleDouble L(cfg.L);
  const double centre = observable_mean(phi) * observable_mean(psi);
  auto advance = [&](TorusPoint<double> p) {
    for (int k = 0; k < cfg.n; ++k) p = step_hatF(p, L);
    return p.x;
  };
  std::vector<double> v(cfg.M);
  numeric::parallel_for(cfg.M, cfg.threads, [&](std::size_t i) {
    numeric::SampleStream rng(cfg.seed, i);
    if (cfg.method == CorrelationMethod::MonteCarlo) {
      const double x = rng.uniform();
      const double y = rng.uniform();
      v[i] = psi(x) * phi(advance({x, y}));
    } else {
      const double x = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(cfg.M);
      std::vector<double> row(cfg.K);
      for (std::size_t j = 0; j < cfg.K; ++j) {
        row[j] = phi(advance({x, static_cast<double>(j) / static_cast<double>(cfg.K)}));
      }
      v[i] = psi(x) * numeric::pairwise_sum(row) / static_cast<double>(cfg.K);
    }
  });
  const double m = static_cast<double>(cfg.M);
  const double mean = numeric::pairwise_sum(v) / m;
  for (auto& e : v) e = (e - mean) * (e - mean);
  CorrelationResult r;
  r.n = cfg.n;
  r.L = cfg.L;
  r.estimate = mean - centre;
  r.std_error = std::sqrt(numeric::pairwise_sum(v) / (m - 1.0) / m);
  r.method = cfg.method;
  r.bound_value = correlation_bound(cfg.n, cfg.L);
  r.M = cfg.M;
  return r;
}

}  // namespace stdmap::stats
