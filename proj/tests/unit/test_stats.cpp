#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stdmap/stats/experiments.hpp"
#include "stdmap/stats/ks.hpp"

namespace {

using namespace stdmap;
using namespace stdmap::stats;

constexpr double kPi = std::numbers::pi;

TEST(BirkhoffSum, FixedPointAtAZero) {
  EXPECT_EQ(birkhoff_sum({0.0, 0.0}, Observable::sine(), 1000, 1e3), 0.0);
}

TEST(BirkhoffSum, ConstantObservable) {
  EXPECT_DOUBLE_EQ(birkhoff_sum({0.3, 0.7}, Observable::constant(2.5), 40, 1e3), 100.0);
}

TEST(BirkhoffSum, SingleTerm) {
  EXPECT_DOUBLE_EQ(birkhoff_sum({0.1, 0.2}, Observable::sine(), 1, 1e3), std::sin(2.0 * kPi * 0.1));
  EXPECT_THROW(birkhoff_sum({0.1, 0.2}, Observable::sine(), 0, 1e3), InvalidArgument);
}

TEST(VarianceOfObservable, FourierModes) {
  EXPECT_NEAR(variance_of_observable(Observable::sine()), 0.5, 1e-10);
  EXPECT_NEAR(variance_of_observable(Observable::cosine()), 0.5, 1e-10);
  const Observable mix("mix", 0.0, {{1, 0.0, 1.0}, {2, 1.0, 0.0}});
  EXPECT_NEAR(variance_of_observable(mix), 1.0, 1e-10);
  EXPECT_THROW(variance_of_observable(Observable::constant(0.1)), NotMeanZero);
}

TEST(ObservableSpec, NamesRoundTrip) {
  for (const auto& o : {Observable::sine(), Observable::cosine(), Observable::sine(3), Observable::cosine(2)}) {
    const Observable back = Observable::parse(o.name());
    for (double x : {0.1, 0.37, 0.8}) EXPECT_EQ(back(x), o(x)) << o.name();
  }
  EXPECT_THROW(Observable::parse("tan"), InvalidArgument);
  EXPECT_THROW(Observable::parse("fourier:x"), InvalidArgument);
}

TEST(KsStatistic, DrawsFromTheReference) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::vector<double> v(100000);
  for (auto& x : v) x = nd(gen);
  EXPECT_LE(ks_normal(v, 0.5), 0.01);
}

TEST(KsStatistic, DegenerateSamples) {
  EXPECT_DOUBLE_EQ(ks_normal({0.0}, 1.0), 0.5);
  std::vector<double> mid(8);
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = (static_cast<double>(i) + 0.5) / 8.0;
  EXPECT_DOUBLE_EQ(ks_statistic(mid, [](double x) { return x; }), 1.0 / 16.0);
  EXPECT_THROW(ks_normal({}, 1.0), EmptySample);
}

TEST(KsStatistic, TwoSample) {
  const std::vector<double> a{0.1, 0.4, 0.3};
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample({0.0, 0.1}, {1.0, 2.0}), 1.0);
}

TEST(NormalCdf, Tail) {
  EXPECT_NEAR(normal_cdf(-10.0, 1.0) / 7.619853024160527e-24, 1.0, 1e-13);
  EXPECT_DOUBLE_EQ(normal_cdf(0.0, 0.5), 0.5);
}

ExperimentConfig clt_config(double L, std::int64_t N, std::size_t M) {
  ExperimentConfig c;
  c.params = MapParams::from_L(L);
  c.N = N;
  c.M = M;
  c.seed = 42;
  return c;
}

TEST(Clt, SingleSample) {
  const auto s = clt_experiment(clt_config(1e6, 15, 1));
  EXPECT_EQ(s.samples.size(), 1u);
  EXPECT_GE(s.ks, 0.5 - 1e-12);
}

TEST(Clt, VarianceNearTheObservableVariance) {
  const auto s = clt_experiment(clt_config(1e6, 15, 20000));
  EXPECT_LE(std::fabs(s.variance - 0.5), 5.0 * s.stderr_variance);
  EXPECT_LE(s.ks, 0.05);
  EXPECT_NEAR(s.n_ratio, 15.0 / std::pow(1e6, 0.25), 1e-12);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Clt, DefaultNAndRegimeWarning) {
  ExperimentConfig c = clt_config(1e5, 0, 10);
  c.N.reset();
  EXPECT_EQ(clt_experiment(c).N, 10);
  c.N = 100;
  EXPECT_FALSE(clt_experiment(c).warnings.empty());
}

TEST(Clt, ThreadCountDoesNotChangeResults) {
  auto c = clt_config(1e4, 8, 3000);
  const auto a = clt_experiment(c);
  c.threads = 4;
  const auto b = clt_experiment(c);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.ks, b.ks);
}

TEST(Clt, RejectsBadObservables) {
  auto c = clt_config(1e4, 8, 10);
  c.phi = Observable::constant(1.0);
  EXPECT_THROW(clt_experiment(c), NotMeanZero);
  c.phi = Observable::constant(0.0);
  EXPECT_THROW(clt_experiment(c), InvalidArgument);
}

TEST(Correlation, LagOneYGridIsExact) {
  CorrelationConfig c;
  c.method = CorrelationMethod::YGridHybrid;
  c.n = 1;
  c.M = 500;
  for (double L : {1e3, 1e5, 3.7e7}) {
    c.L = L;
    for (int k : {1, 3}) {
      EXPECT_LE(std::fabs(correlation(Observable::sine(k), Observable::sine(k), c).estimate), 1e-12);
      EXPECT_LE(std::fabs(correlation(Observable::cosine(k), Observable::sine(k), c).estimate), 1e-12);
    }
  }
}

TEST(Correlation, LagTwoMatchesBesselOracle) {
  // With y uniform, int sin(2 pi x) sin(2 pi x_2) = -J_2(2 pi L) / 2.
  CorrelationConfig c;
  c.L = 1e3;
  c.n = 2;
  c.M = 1'000'000;
  c.seed = 5;
  const auto r = correlation(Observable::sine(), Observable::sine(), c);
  const double want = -0.5 * std::cyl_bessel_j(2.0, 2.0 * kPi * c.L);
  EXPECT_LE(std::fabs(r.estimate - want), 4.0 * r.std_error);
  EXPECT_NEAR(r.bound_value, std::pow(1e3, -0.75) + std::pow(1e3, -0.5), 1e-15);
}

TEST(Correlation, ConstantObservable) {
  CorrelationConfig c;
  c.n = 2;
  c.M = 100000;
  const auto r = correlation(Observable::constant(1.0), Observable::sine(), c);
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_LE(std::fabs(r.estimate), 4.0 * r.std_error);
}

TEST(Correlation, StandardErrorShrinksLikeRootM) {
  CorrelationConfig c;
  c.n = 2;
  c.M = 20000;
  const double s1 = correlation(Observable::sine(), Observable::sine(), c).std_error;
  c.M *= 16;
  const double s16 = correlation(Observable::sine(), Observable::sine(), c).std_error;
  EXPECT_NEAR(s1 / s16, 4.0, 0.8);
}

TEST(Diffusion, StepCountAndScale) {
  ExperimentConfig c;
  c.params = MapParams::from_slow_fast(0.1, 9.0);
  c.M = 10;
  const auto s = diffusion_experiment(c);
  EXPECT_EQ(s.N, 100);
  EXPECT_GE(s.scale_factor, 1.0 - 0.01);
  EXPECT_LE(s.scale_factor, 1.0);
  c.params = MapParams::from_slow_fast(0.03, 2.0);
  const auto t = diffusion_experiment(c);
  EXPECT_EQ(t.N, 1111);
  EXPECT_GE(t.scale_factor, 1.0 - 0.03 * 0.03);
  EXPECT_LE(t.scale_factor, 1.0);
  bool flagged = false;
  for (const auto& w : t.warnings) flagged = flagged || w.find("alpha") != std::string::npos;
  EXPECT_TRUE(flagged);
}

TEST(Diffusion, NeedsSlowFastParameters) {
  ExperimentConfig c;
  c.params = MapParams::from_L(1e3);
  EXPECT_THROW(diffusion_experiment(c), InvalidArgument);
}

TEST(Diffusion, ConjugatedRouteMatchesRawIteration) {
  const MapParams p = MapParams::from_slow_fast(0x1.0p-10, 1.0);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double X = u(gen);
    const double Z = u(gen);
    CylinderState<double> s{X, DoubleDouble(Z)};
    for (int k = 0; k < 3; ++k) s = step_slowfast(s, p);
    const double raw = (s.z - DoubleDouble(Z)).hi;
    // rounding grows like (2 pi L)^2 ulp over the last two steps
    EXPECT_NEAR(slow_displacement(X, Z, p, 3), raw, 1e-10);
  }
}

TEST(Diffusion, SameLawAsTheCltRoute) {
  // eps = 0.1: eps * sqrt(N) = 1, so eps * S_N and S_N / sqrt(N) agree in law.
  ExperimentConfig d;
  d.params = MapParams::from_slow_fast(0.1, 3.0);
  d.M = 20000;
  d.seed = 1;
  const auto a = diffusion_experiment(d);
  ExperimentConfig c = clt_config(d.params.L, a.N, 20000);
  c.seed = 2;
  const auto b = clt_experiment(c);
  EXPECT_LE(ks_two_sample(a.samples, b.samples), 2.0 * (a.ks + b.ks) + 0.01);
}

}  // namespace
