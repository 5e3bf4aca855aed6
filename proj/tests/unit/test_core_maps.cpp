#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

#include "stdmap/core_maps.hpp"

namespace {

using stdmap::CylinderState;
using stdmap::DoubleDouble;
using stdmap::MapParams;
using stdmap::TorusPoint;
using Big = boost::multiprecision::cpp_bin_float_50;

// f(x) mod 1 in 50-digit arithmetic.
double f_mod1_reference(double x, double L) {
  const Big pi = boost::math::constants::pi<Big>();
  Big v = Big(2) * Big(x) + Big(L) * sin(Big(2) * pi * Big(x));
  v -= floor(v);
  return static_cast<double>(v);
}

double torus_gap(double a, double b) { return stdmap::circle_distance(a, b); }

TEST(EvalF, TrivialValues) {
  EXPECT_EQ(stdmap::eval_f(0.0, 100.0).value(), 0.0);
  EXPECT_NEAR(stdmap::eval_f(0.25, 10.0).value(), 10.5, 1e-15);
  const auto half = stdmap::eval_f(0.5, 1e3);
  EXPECT_NEAR(half.value(), 1.0, 1e-12);
  EXPECT_EQ(half.fractional_part(), 0.0);
}

TEST(EvalF, FractionalPartMatchesMultiprecision) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> ue(0.0, 40.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double x = ux(gen);
    const double L = std::exp2(ue(gen));
    worst = std::max(worst, torus_gap(stdmap::eval_f(x, L).fractional_part(), f_mod1_reference(x, L)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(StepHatF, Examples) {
  for (double L : {1.0, 10.0, 1e3, 1e9}) {
    auto a = stdmap::step_hatF(TorusPoint<double>{0.0, 0.0}, L);
    EXPECT_EQ(a.x, 0.0);
    EXPECT_EQ(a.y, 0.0);
    auto b = stdmap::step_hatF(TorusPoint<double>{0.5, 0.0}, L);
    EXPECT_EQ(b.x, 0.0);
    EXPECT_EQ(b.y, 0.5);
  }
  auto c = stdmap::step_hatF(TorusPoint<double>{0.25, 0.5}, 10.0);
  EXPECT_LE(torus_gap(c.x, 0.0), 1e-15);
  EXPECT_EQ(c.y, 0.25);
}

TEST(StepF, Examples) {
  auto a = stdmap::step_F(TorusPoint<double>{0.0, 0.3}, 123.0);
  EXPECT_DOUBLE_EQ(a.x, 0.3);
  EXPECT_DOUBLE_EQ(a.y, 0.3);
  auto b = stdmap::step_F(TorusPoint<double>{0.5, 0.0}, 1e4);
  EXPECT_EQ(b.x, 0.5);
  EXPECT_EQ(b.y, 0.0);
  auto c = stdmap::step_F(TorusPoint<double>{0.25, 0.0}, 1.0);
  EXPECT_LE(torus_gap(c.x, 0.25), 1e-15);
  EXPECT_LE(torus_gap(c.y, 0.0), 1e-15);
}

TEST(Conjugate, Examples) {
  auto a = stdmap::conjugate(TorusPoint<double>{0.7, 0.0});
  EXPECT_EQ(a.x, 0.7);
  EXPECT_EQ(a.y, 0.7);
  auto b = stdmap::conjugate(TorusPoint<double>{0.2, 0.5});
  EXPECT_NEAR(b.y, 0.7, 1e-15);
}

TEST(Conjugate, IsAnInvolution) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    TorusPoint<double> p{u(gen), u(gen)};
    auto q = stdmap::conjugate(stdmap::conjugate(p));
    ASSERT_EQ(q.x, p.x);
    ASSERT_LE(torus_gap(q.y, p.y), 1e-15);
  }
}

TEST(Conjugate, IntertwinesStandardAndShearedMaps) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> ul(0.0, 6.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    TorusPoint<double> p{u(gen), u(gen)};
    const double L = std::pow(10.0, ul(gen));
    auto lhs = stdmap::conjugate(stdmap::step_F(p, L));
    auto rhs = stdmap::step_hatF(stdmap::conjugate(p), L);
    worst = std::max({worst, torus_gap(lhs.x, rhs.x), torus_gap(lhs.y, rhs.y)});
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Reduction, OutputsStayInFundamentalDomain) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> ul(0.0, 9.0);
  for (int i = 0; i < 1000000; ++i) {
    TorusPoint<double> p{u(gen), u(gen)};
    const double L = std::pow(10.0, ul(gen));
    for (auto q : {stdmap::step_hatF(p, L), stdmap::step_F(p, L), stdmap::conjugate(p)}) {
      ASSERT_TRUE(q.x >= 0.0 && q.x < 1.0 && q.y >= 0.0 && q.y < 1.0);
    }
  }
}

TEST(StepLifted, Examples) {
  auto a = stdmap::step_lifted(TorusPoint<double>{0.25, 0.5}, 10.0);
  EXPECT_NEAR(a.x.value(), 10.0, 1e-14);
  EXPECT_EQ(a.y, 0.25);
  auto b = stdmap::step_lifted(TorusPoint<double>{0.0, 0.0}, 1e3);
  EXPECT_EQ(b.x.value(), 0.0);
  EXPECT_EQ(b.y, 0.0);
}

TEST(StepLifted, ReducesToHatF) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> ul(0.0, 6.0);
  for (int i = 0; i < 100000; ++i) {
    TorusPoint<double> p{u(gen), u(gen)};
    const double L = std::pow(10.0, ul(gen));
    ASSERT_LE(torus_gap(stdmap::step_lifted(p, L).x.fractional_part(), stdmap::step_hatF(p, L).x), 1e-15);
    const double unreduced = stdmap::f_lifted(p.x, L) - p.y;
    ASSERT_NEAR(stdmap::step_lifted(p, L).x.value(), unreduced, 1e-13 * std::max(1.0, L));
  }
}

TEST(MapParams, DerivedFields) {
  auto p = MapParams::from_slow_fast(0.1, 1.0);
  EXPECT_NEAR(p.L, 10.0, 1e-12);
  EXPECT_EQ(*p.beta, 2.0);
  EXPECT_EQ(*p.N_of_L, 100);
  EXPECT_EQ(*MapParams::from_slow_fast(0.05, 9.0).N_of_L, 400);
  auto q = MapParams::from_slow_fast(std::exp2(-10), 1.0);
  EXPECT_EQ(q.L, 1024.0);
  EXPECT_NEAR(MapParams::from_slow_fast(0.05, 9.0).L / std::pow(0.05, -9.0), 1.0, 1e-12);
  EXPECT_EQ(*MapParams::from_L(1e6, 4.0).N_of_L, 1000);
  EXPECT_THROW(MapParams::from_slow_fast(1.5, 1.0), stdmap::InvalidArgument);
  EXPECT_THROW(MapParams::from_L(-1.0), stdmap::InvalidArgument);
}

TEST(StepSlowFast, Examples) {
  auto p = MapParams::from_slow_fast(0.1, 1.0);
  auto a = stdmap::step_slowfast(CylinderState<double>{0.0, 0.0}, p);
  EXPECT_EQ(a.x, 0.0);
  EXPECT_EQ(a.z.value(), 0.0);
  auto b = stdmap::step_slowfast(CylinderState<double>{0.25, 0.0}, p);
  EXPECT_LE(torus_gap(b.x, 0.25), 1e-13);
  EXPECT_NEAR(b.z.value(), 0.1, 1e-16);
  auto c = stdmap::step_slowfast(CylinderState<double>{0.5, 0.0123}, p);
  EXPECT_LE(torus_gap(c.x, stdmap::numeric::frac(0.5 + 100.0 * 0.0123)), 1e-13);
  EXPECT_EQ(c.z.value(), 0.0123);
}

TEST(StepSlowFast, PrecisionDomain) {
  auto p = MapParams::from_slow_fast(1e-3, 5.0);  // shear 1e18
  EXPECT_THROW(stdmap::step_slowfast(CylinderState<double>{0.1, 0.0}, p), stdmap::PrecisionDomainExceeded);
  EXPECT_THROW(stdmap::trajectory(CylinderState<double>{0.1, 0.0}, p, 3), stdmap::PrecisionDomainExceeded);
}

TEST(StepSlowFast, CompositionMatchesOneLineFormula) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto [eps, alpha] : {std::pair{0.1, 1.0}, std::pair{std::exp2(-10), 1.0}, std::pair{0.3, 9.0}}) {
    auto prm = MapParams::from_slow_fast(eps, alpha);
    for (int i = 0; i < 10000; ++i) {
      CylinderState<double> s{u(gen), DoubleDouble(u(gen) * 3.0 - 1.5)};
      auto a = stdmap::step_slowfast(s, prm);
      auto b = stdmap::step_slowfast_direct(s, prm);
      ASSERT_LE(torus_gap(a.x, b.x), 1e-12);
      ASSERT_LE(std::fabs((a.z - b.z).value()), 1e-12);
    }
  }
}

TEST(Trajectory, LengthAndFixedPoint) {
  auto orbit = stdmap::trajectory(TorusPoint<double>{0.0, 0.0}, 1e3, 100, stdmap::TorusMap::HatF);
  ASSERT_EQ(orbit.size(), 101u);
  for (const auto& q : orbit) {
    EXPECT_EQ(q.x, 0.0);
    EXPECT_EQ(q.y, 0.0);
  }
  EXPECT_EQ(stdmap::trajectory(TorusPoint<double>{0.1, 0.2}, 5.0, 0, stdmap::TorusMap::StandardF).size(), 1u);
}

TEST(Trajectory, SlowFastShadowsStandardMap) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Orbit errors grow like (2 pi L)^n, so L stays below ~1e4 for five steps.
  for (auto [eps, alpha] : {std::pair{std::exp2(-10), 1.0}, std::pair{0.5, 9.0}, std::pair{0.01, 2.0}}) {
    auto prm = MapParams::from_slow_fast(eps, alpha);
    for (int i = 0; i < 1000; ++i) {
      const DoubleDouble x(u(gen));
      const DoubleDouble y(u(gen));
      auto g = stdmap::trajectory(CylinderState<DoubleDouble>{x, prm.slow_from_torus(y)}, prm, 5);
      auto f = stdmap::trajectory(TorusPoint<DoubleDouble>{x, y}, prm.slow_fast_L(), 5, stdmap::TorusMap::StandardF);
      for (std::size_t k = 0; k <= 5; ++k) ASSERT_LE(stdmap::circle_distance(g[k].x, f[k].x), 1e-6);
    }
  }
}

}  // namespace
