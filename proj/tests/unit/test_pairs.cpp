#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stdmap/pairs/decomposition.hpp"
#include "stdmap/pairs/integrals.hpp"

namespace {

using namespace stdmap::pairs;
using stdmap::Interval;

constexpr double kPi = std::numbers::pi;

double f_ref(double x, double L) { return 2.0 * x + L * std::sin(2.0 * kPi * x); }

// Richardson-extrapolated central difference of the log density.
double fd_log_rho(CurveEvaluator& ev, double x, double h) {
  auto d = [&](double s) { return (ev.jet(x + s).log_rho - ev.jet(x - s).log_rho) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

TEST(FGamma, RootCurveIsFMinusHeight) {
  const auto p = root_pair(1e3, 0.3);
  for (double x : {0.0, 0.1, 0.37, 0.9}) {
    EXPECT_NEAR(f_gamma(p, x).value, f_ref(x, 1e3) - 0.3, 1e-9);
  }
  EXPECT_NEAR(f_gamma(p, 0.25).d1, 2.0, 1e-9);
}

TEST(FGamma, OutsideDomainThrows) {
  const auto p = root_pair(1e3);
  EXPECT_THROW(f_gamma(p, 1.5), stdmap::DomainError);
}

TEST(FGamma, MonotoneOffTheStrip) {
  const double L = 1e4;
  const auto p = root_pair(L);
  const auto s = stdmap::critical_intervals(L, 0.5);
  const Interval free{s.intervals[0].hi, s.intervals[1].lo};
  for (int i = 0; i <= 1000; ++i) {
    const double x = free.lo + free.length() * i / 1000.0;
    EXPECT_LT(f_gamma(p, x).d1, -std::sqrt(L) + 1e-9);
  }
}

TEST(InvertFGamma, RecoversForwardPoint) {
  const double L = 1e3;
  const auto p = root_pair(L, 0.2);
  const auto s = stdmap::critical_intervals(L, 0.5);
  const Interval br{s.intervals[0].hi, s.intervals[1].lo};
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(br.lo, br.hi);
  for (int i = 0; i < 10000; ++i) {
    const double x0 = u(gen);
    const double t = f_gamma(p, x0).value;
    const double x = invert_f_gamma(p, t, br);
    EXPECT_NEAR(x, x0, 1e-12);
    EXPECT_LE(std::fabs(f_gamma(p, x).value - t), 1e-12 * std::max(1.0, std::fabs(t)));
  }
}

TEST(InvertFGamma, DerivativeOfInverse) {
  const double L = 1e3;
  const auto p = root_pair(L);
  const Interval br{0.3, 0.7};
  const double t = f_gamma(p, 0.45).value;
  const double dt = 1e-4;
  const double fd = (invert_f_gamma(p, t + dt, br) - invert_f_gamma(p, t - dt, br)) / (2.0 * dt);
  EXPECT_NEAR(fd, 1.0 / f_gamma(p, invert_f_gamma(p, t, br)).d1, 1e-8);
}

TEST(InvertFGamma, UnbracketedTargetThrows) {
  const auto p = root_pair(1e3);
  EXPECT_THROW(invert_f_gamma(p, 1e6, Interval{0.3, 0.7}), stdmap::BracketError);
}

TEST(TransportDensity, UniformSeedStaysWithinDistortionBound) {
  const double L = 1e3;
  const auto root = root_pair(L);
  const double y = f_gamma(root, 0.3).value;
  const auto child = transport_density(root, Interval{std::floor(y) - 1.0, std::floor(y)}, 0.5);
  EXPECT_LE(sample_invariants(child.node, 1000).max_dlog_rho, kC0 * (1.0 + 1e-9));
  EXPECT_NEAR(child.density().normalization(), 1.0, 1e-10);
  EXPECT_NEAR(child.node->log_derivative_bound, kC0, 1e-12);
}

TEST(TransportDensity, FiniteDifferenceLogDerivative) {
  const double L = 1e3;
  auto density = RootDensity::from_log([](double x) { return 0.5 * std::sin(2.0 * kPi * x); },
                                       [](double x) { return kPi * std::cos(2.0 * kPi * x); }, kPi);
  const auto root = root_pair(L, 0.1, density);
  const double y = f_gamma(root, 0.6).value;
  const auto c1 = transport_density(root, Interval{std::floor(y), std::floor(y) + 1.0}, 0.5);
  const double y2 = f_gamma(c1, 0.4).value;
  const auto c2 = transport_density(c1, Interval{std::floor(y2), std::floor(y2) + 0.5}, 0.5);
  CurveEvaluator ev(c2.node);
  const Interval d = c2.domain();
  for (int i = 1; i < 1000; ++i) {
    const double x = d.lo + d.length() * i / 1000.0;
    const double closed = ev.jet(x).dlog_rho;
    const double fd = fd_log_rho(ev, x, 1e-4 * d.length());
    EXPECT_NEAR(fd, closed, 1e-6 * std::max(std::fabs(closed), 1.0)) << "x = " << x;
  }
}

TEST(TransportDensity, StripPreimageThrows) {
  const double L = 1e3;
  const auto root = root_pair(L);
  const double y = f_gamma(root, 0.25).value;
  EXPECT_THROW(transport_density(root, Interval{y - 0.01, y + 0.01}, 0.5), stdmap::StripOverlap);
}

TEST(CutFull, ConservesMass) {
  for (double L : {1e3, 1e4, 1e5}) {
    CutConfig cfg;
    cfg.materialize_bundles = false;
    const auto st = cut_full(root_pair(L), cfg);
    EXPECT_NEAR(st.total(), 1.0, 1e-10);
    EXPECT_LE(st.masses.J, 0.5);
    EXPECT_GT(st.masses.I, 0.0);
    EXPECT_GT(st.masses.J, 0.0);
    EXPECT_GT(st.masses.E, 0.0);
  }
}

TEST(CutFull, ScaledMassesStayInBand) {
  double lo[3] = {1e300, 1e300, 1e300};
  double hi[3] = {0.0, 0.0, 0.0};
  for (double L : {1e3, 1e4, 1e5}) {
    CutConfig cfg;
    cfg.materialize_bundles = false;
    const auto m = cut_full(root_pair(L), cfg).masses;
    const double v[3] = {m.I * std::sqrt(L), m.J * std::sqrt(L) / kDefaultA0, m.E * std::pow(L, 0.75)};
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  for (int k = 0; k < 3; ++k) EXPECT_LE(hi[k] / lo[k], 20.0);
}

TEST(CutFull, IntermediateZoneImageLength) {
  for (double L : {1e3, 1e4, 1e5}) {
    const auto s2 = stdmap::critical_intervals(L, 0.5).intervals[0];
    const auto s4 = stdmap::critical_intervals(L, 0.25).intervals[0];
    const double len = std::fabs(f_ref(s4.lo, L) - f_ref(s2.lo, L));
    // quadratic approximation of f around 1/4: (1 - L^-1/2) / (2 pi^2)
    const double approx = (1.0 - 1.0 / std::sqrt(L)) / (2.0 * kPi * kPi);
    EXPECT_NEAR(len / approx, 1.0, 0.05);
  }
}

TEST(CutFull, EmittedPairsPassTheirInvariants) {
  const auto st = cut_full(root_pair(1e3));
  EXPECT_EQ(st.L.size(), st.plan.masses.count_L);
  for (const auto* list : {&st.I, &st.J}) {
    for (const auto& p : *list) {
      EXPECT_NO_THROW(check_regularity(*p.node, kDefaultA0));
      EXPECT_TRUE(sample_invariants(p.node, 1000).ok);
    }
  }
  for (std::size_t i = 0; i < st.L.size(); i += 97) {
    EXPECT_TRUE(st.L[i].node->fully_crossing());
    EXPECT_TRUE(sample_invariants(st.L[i].node, 1000).ok);
  }
  double sum = st.masses.E;
  for (const auto* list : {&st.L, &st.I, &st.J}) {
    for (const auto& p : *list) sum += p.mass;
  }
  EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(CutStandard, ErrorMassScaling) {
  CutConfig cfg;
  cfg.materialize_bundles = false;
  const double c = cut_standard(root_pair(1e3), cfg).masses.E * kDefaultA0 * std::sqrt(1e3);
  for (double L : {1e4, 1e5}) {
    const auto st = cut_standard(root_pair(L), cfg);
    EXPECT_NEAR(st.total(), 1.0, 1e-10);
    EXPECT_LE(st.masses.E, 2.0 * c / (kDefaultA0 * std::sqrt(L)));
    EXPECT_EQ(st.masses.I + st.masses.J, 0.0);
  }
}

TEST(CutSubstandard, JMassCeilingAndConservation) {
  CutConfig cfg;
  cfg.materialize_bundles = false;
  for (double L : {1e3, 1e4, 1e5}) {
    const auto st = cut_full(root_pair(L), cfg);
    ASSERT_FALSE(st.J.empty());
    for (const auto& p : st.J) {
      const auto sub = cut_substandard(p, cfg);
      EXPECT_NEAR(sub.total() / p.mass, 1.0, 1e-10);
      EXPECT_LE(sub.masses.J / p.mass, 0.5);
    }
  }
}

TEST(CutSubstandard, ShortestCurveImageCrossesAUnit) {
  const double L = 1e4;
  const auto root = root_pair(L);
  const double y = f_gamma(root, 0.1).value;
  const double x0 = invert_f_gamma(root, std::floor(y), Interval{0.0, 0.2});
  const double x1 = invert_f_gamma(root, std::floor(y) + 1.0, Interval{0.0, 0.2});
  CurveEvaluator ev(root.node);
  const auto child = make_child(ev, Interval{std::min(x0, x1), std::max(x0, x1)}, 1, std::floor(y),
                                std::floor(y) + 1.0, 1.0, Regularity::FullCrossing, 0.5);
  const MeasurePair c{child, 1.0};
  // a piece of length L^-1/2 starting at the edge of S_1/2
  const double a = stdmap::critical_intervals(L, 0.5).intervals[0].hi;
  const double b = a + 1.0 / std::sqrt(L);
  const double image = std::fabs(f_gamma(c, b).value - f_gamma(c, a).value);
  EXPECT_GE(image, 1.0);
}

TEST(CutChecks, WrongRegularityThrows) {
  const auto root = root_pair(1e3);
  EXPECT_THROW(cut_substandard(root), stdmap::InvariantViolation);
  const auto st = cut_full(root);
  EXPECT_THROW(cut_full(st.I.front()), stdmap::InvariantViolation);
}

TEST(Decomposition, FirstStepMatchesCutFull) {
  CutConfig cfg;
  cfg.materialize_bundles = false;
  const auto st = cut_full(root_pair(1e3), cfg);
  DecompositionConfig dc;
  dc.mode = DecompositionMode::Exhaustive;
  const auto led = iterate_decomposition(root_pair(1e3), 1, dc);
  EXPECT_NEAR(led.at(1).m_L, st.masses.L, 1e-15);
  EXPECT_NEAR(led.at(1).m_I, st.masses.I, 1e-15);
  EXPECT_NEAR(led.at(1).m_J, st.masses.J, 1e-15);
  EXPECT_NEAR(led.at(1).m_E, st.masses.E, 1e-15);
}

TEST(Decomposition, SampledRowsConserveMassAndAreDeterministic) {
  DecompositionConfig dc;
  dc.samples = 40;
  dc.seed = 9;
  const auto a = iterate_decomposition(root_pair(1e3), 4, dc);
  dc.threads = 3;
  const auto b = iterate_decomposition(root_pair(1e3), 4, dc);
  ASSERT_EQ(a.rows.size(), 5u);
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_NEAR(a.rows[k].total(), 1.0, 1e-9);
    EXPECT_EQ(a.rows[k].m_E, b.rows[k].m_E);
    EXPECT_EQ(a.rows[k].m_I, b.rows[k].m_I);
    if (k > 0) EXPECT_GE(a.rows[k].m_E, a.rows[k - 1].m_E);
  }
}

TEST(Decomposition, LongSampledRunAtTheStripEdge) {
  // Seed 7 reaches a J child whose domain touches S_1/2 to rounding.
  DecompositionConfig dc;
  dc.samples = 1000;
  dc.seed = 7;
  const auto led = iterate_decomposition(root_pair(1e3), 10, dc);
  EXPECT_NEAR(led.at(10).total(), 1.0, 1e-9);
}

TEST(Decomposition, ExhaustiveCapIsEnforced) {
  DecompositionConfig dc;
  dc.mode = DecompositionMode::Exhaustive;
  dc.cap = 100;
  EXPECT_THROW(iterate_decomposition(root_pair(1e3), 2, dc), stdmap::BudgetExceeded);
}

TEST(Decomposition, BadArguments) {
  EXPECT_THROW(iterate_decomposition(root_pair(1e3), 0), stdmap::InvalidArgument);
  DecompositionConfig dc;
  dc.a0 = 0.2;
  EXPECT_THROW(iterate_decomposition(root_pair(1e3), 1, dc), stdmap::InvalidArgument);
}

TEST(IntegrateObservable, RootPairIntegrals) {
  const auto p = root_pair(1e3);
  EXPECT_NEAR(integrate_observable(p, [](double, double) { return 1.0; }), 1.0, 1e-10);
  EXPECT_NEAR(integrate_observable(p, stdmap::Observable::sine(1)), 0.0, 1e-10);
  EXPECT_NEAR(integrate_observable(p, [](double x, double) { return std::pow(std::sin(2.0 * kPi * x), 2); }), 0.5,
              1e-10);
}

TEST(IntegrateObservable, ChildDensityIsNormalized) {
  const auto st = cut_full(root_pair(1e3));
  for (const auto& p : st.I) {
    EXPECT_NEAR(integrate_observable(p, [](double, double) { return 1.0; }), 1.0, 1e-10);
  }
}

TEST(Pushforward, ZeroObservable) {
  const auto r = pair_pushforward_integral(root_pair(1e3), stdmap::Observable::constant(0.0), 1);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Pushforward, OneStepMatchesBesselOracle) {
  // int_0^1 sin(2 pi (2x + L sin 2 pi x - y0)) dx = -sin(2 pi y0) J_2(2 pi L)
  for (double L : {1e3, 1e4}) {
    const double y0 = 0.25;
    const double want = -std::sin(2.0 * kPi * y0) * std::cyl_bessel_j(2.0, 2.0 * kPi * L);
    const auto r = pair_pushforward_integral(root_pair(L, y0), stdmap::Observable::sine(1), 1);
    EXPECT_NEAR(r.value, want, 1e-10);
  }
}

TEST(Pushforward, StableUnderDoubling) {
  PushforwardOptions a;
  PushforwardOptions b;
  b.panel_factor = 2.0;
  const auto p = root_pair(1e3, 0.25);
  const double v1 = pair_pushforward_integral(p, stdmap::Observable::sine(1), 1, a).value;
  const double v2 = pair_pushforward_integral(p, stdmap::Observable::sine(1), 1, b).value;
  EXPECT_LE(std::fabs(v1 - v2), 1e-8 * std::max(std::fabs(v2), 1e-3));
}

TEST(Pushforward, ResolutionCap) {
  PushforwardOptions o;
  o.node_cap = 1e6;
  EXPECT_THROW(pair_pushforward_integral(root_pair(1e4), stdmap::Observable::sine(1), 2, o),
               stdmap::ResolutionExceeded);
}

TEST(Pushforward, MeanZeroRequired) {
  EXPECT_THROW(pair_pushforward_integral(root_pair(1e3), stdmap::Observable::constant(1.0), 1),
               stdmap::NotMeanZero);
}

}  // namespace
