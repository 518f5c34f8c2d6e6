#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "isolab/signals.hpp"

using namespace isolab;
constexpr double kPi = std::numbers::pi;

TEST(Sine, ClosedFormValues) {
  EXPECT_NEAR(sine_signal(4).mu[1], 0.5, 1e-15);
  EXPECT_NEAR(sine_signal(8).mu[1], 0.25, 1e-15);
  // 0.0625 + sin(pi/4)/16, evaluated to 30 digits offline.
  EXPECT_NEAR(sine_signal(10000).mu[624], 0.106694173824159220275, 1e-15);
  EXPECT_THROW(sine_signal(1), std::invalid_argument);
}

TEST(Sine, RegularityMetadataHolds) {
  for (std::size_t n : {10u, 400u, 5000u}) {
    const auto s = sine_signal(n);
    EXPECT_DOUBLE_EQ(s.meta.beta, 2.0);
    EXPECT_TRUE(verify_lipschitz(s, 1.0 + kPi / 4.0));
    EXPECT_TRUE(verify_monotone(s, 1.0 - kPi / 4.0));
    EXPECT_TRUE(verify_smooth_auto(s, s.meta.beta, s.meta.M, 100000, 3));
  }
  // The derivative reaches 1 + pi/4, so a 10% smaller constant must fail.
  EXPECT_FALSE(verify_lipschitz(sine_signal(5000), 0.9 * (1.0 + kPi / 4.0)));
}

TEST(Hinge, Branches) {
  const auto s = hinge_signal(4);
  EXPECT_NEAR(s.mu[1], 0.05, 1e-15);
  EXPECT_NEAR(s.mu[3], 1.0, 1e-15);
  EXPECT_NEAR(s.mu[2], 1.9 * 0.75 - 0.9, 1e-15);
  EXPECT_NEAR(hinge_signal(2).mu[0], 0.05, 1e-15);
  EXPECT_THROW(hinge_signal(5), std::invalid_argument);
  EXPECT_THROW(hinge_signal(0), std::invalid_argument);
}

TEST(Hinge, Regularity) {
  for (std::size_t n : {100u, 2000u}) {
    const auto s = hinge_signal(n);
    EXPECT_TRUE(verify_monotone(s, 0.1));
    EXPECT_FALSE(verify_monotone(s, 0.2));
    EXPECT_TRUE(verify_lipschitz(s, 1.9));
    EXPECT_TRUE(verify_smooth_auto(s, 1.0, s.meta.L1));
    EXPECT_DOUBLE_EQ(s.meta.beta, 1.0);
  }
}

TEST(Linear, Values) {
  EXPECT_EQ(linear_signal(2, 1.0).mu, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(linear_signal(4, 2.0).mu, (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(linear_signal(1, 3.0).mu, (std::vector<double>{3.0}));
  EXPECT_THROW(linear_signal(4, 0.0), std::invalid_argument);
  EXPECT_THROW(linear_signal(4, -1.0), std::invalid_argument);
}

TEST(Linear, Verifiers) {
  const auto s = linear_signal(300, 2.0);
  EXPECT_TRUE(verify_lipschitz(s, 2.0));
  EXPECT_FALSE(verify_lipschitz(s, 1.0));
  EXPECT_TRUE(verify_monotone(s, 2.0));
  EXPECT_TRUE(verify_smooth(s, 1.0, 1e-6));
  EXPECT_TRUE(verify_smooth(s, 2.0, 1e-6));
}

TEST(Smooth, ExhaustiveRefusesLargeN) {
  SmoothCheckOptions o;
  o.mode = SmoothCheckMode::exhaustive;
  EXPECT_THROW(verify_smooth(linear_signal(501, 1.0), 1.0, 1.0, o), std::length_error);
  EXPECT_NO_THROW(verify_smooth(linear_signal(500, 1.0), 1.0, 1.0, o));
}

TEST(Smooth, DetectsKink) {
  // A hinge is not smooth of order 2 with a small constant.
  EXPECT_FALSE(verify_smooth(hinge_signal(200), 2.0, 0.1));
  SmoothCheckOptions o;
  o.mode = SmoothCheckMode::sampled;
  EXPECT_FALSE(verify_smooth(hinge_signal(4000), 2.0, 0.1, o));
}

TEST(Oscillation, ClosedFormParameters) {
  const auto o = oscillation_signal(10000, 0.5, 1.5, 1.0, 2.0);
  // Reference values evaluated to 30 digits offline from the closed forms.
  EXPECT_DOUBLE_EQ(o.params.a_n, 1.0);
  EXPECT_NEAR(o.params.c_n, 871.885523242001707870, 1e-9);
  EXPECT_NEAR(o.params.b_n / 6.5773517925447067950e-7, 1.0, 1e-12);
  EXPECT_LE(o.params.b_n * o.params.c_n, o.params.a_n);
  EXPECT_EQ(o.params.warnings.size(), 2u);

  const auto o1 = oscillation_signal(10000, 0.5, 1.5, 1.0, 1.0);
  EXPECT_NEAR(o1.params.b_n / 5.73469780918955955191e-4, 1.0, 1e-12);
}

TEST(Oscillation, IndependentEvaluation) {
  const std::size_t n = 4096;
  const auto o = oscillation_signal(n, 0.5, 1.5, 1.0, 1.0);
  const double L = std::log(4096.0);
  const double a = 1.0, b = 0.5 * std::pow(4096.0 * L * L * L * L * L, -1.0 / 3.0);
  const double c = 16.0 * std::pow(L, 5.0 / 3.0);
  for (std::size_t i = 0; i < n; i += 97) {
    const double t = static_cast<double>(i + 1) / 4096.0;
    EXPECT_NEAR(o.signal.mu[i], a * t + b * std::sin(c * t), 1e-13);
  }
}

TEST(Oscillation, PassesItsOwnRegularity) {
  for (double beta : {1.0, 1.5, 2.0}) {
    const auto o = oscillation_signal(20000, 0.5, 1.5, 1.0, beta);
    EXPECT_TRUE(verify_monotone(o.signal, 0.0));
    EXPECT_TRUE(verify_lipschitz(o.signal, 1.5));
    EXPECT_TRUE(verify_smooth_auto(o.signal, beta, 1.0, 100000, 5));
  }
  const auto small = oscillation_signal(400, 0.5, 1.5, 1.0, 1.0);
  EXPECT_TRUE(verify_smooth(small.signal, 1.0, 1.0));
}

TEST(Oscillation, Infeasible) {
  EXPECT_THROW(oscillation_signal(1000, 1.5, 0.5, 1.0, 1.0), ConstructionError);
  EXPECT_THROW(oscillation_signal(1000, 0.5, 1.5, 1.0, 2.5), ConstructionError);
  EXPECT_THROW(oscillation_signal(1000, 0.0, 1.5, 1.0, 1.0), ConstructionError);
}

// b_n c_n = min(M/2, (L1 - L0)/2) (n log^5 n)^((1 - beta)/3) <= (L1 - L0)/2 < a_n,
// so valid parameters never trip the monotonicity condition.
TEST(Oscillation, ValidParametersAlwaysFeasible) {
  for (std::size_t n : {3u, 10u, 1000u, 100000u})
    for (double beta : {1.0, 1.3, 2.0})
      for (double M : {0.01, 1.0, 100.0}) {
        const auto o = oscillation_signal(n, 1e-3, 10.0, M, beta);
        EXPECT_LE(o.params.b_n * o.params.c_n, o.params.a_n);
      }
}

TEST(Wright, Profile) {
  for (double a : {1.0, 1.5, 2.0, 3.0}) {
    EXPECT_DOUBLE_EQ(wright_profile(0.0, a), 0.0);
    EXPECT_DOUBLE_EQ(wright_profile(0.5, a), 0.5);
    EXPECT_DOUBLE_EQ(wright_profile(1.0, a), 1.0);
  }
}

TEST(Wright, ClosedFormParameters) {
  const auto w1 = wright_pair(10000, 1.0);
  EXPECT_NEAR(w1.params.c_n / 0.0105637037506123936261, 1.0, 1e-12);
  EXPECT_NEAR(w1.params.eps_n / 0.0105637037506123936261, 1.0, 1e-12);
  const auto w2 = wright_pair(10000, 2.0);
  EXPECT_NEAR(w2.params.c_n / 0.00425186489322094415928, 1.0, 1e-12);
  EXPECT_NEAR(w2.params.eps_n / 0.0652063255614127068508, 1.0, 1e-12);
  EXPECT_EQ(w2.params.const_overrides.at("C1"), 1.0);
}

TEST(Wright, PairStructure) {
  for (double alpha : {1.0, 2.0, 3.0}) {
    const std::size_t n = 10000;
    const auto w = wright_pair(n, alpha);
    const double c = w.params.c_n, eps = w.params.eps_n;
    const std::size_t i0 = n / 2 - 1;  // t = 1/2
    EXPECT_NEAR(w.early_ramp.mu[i0] - w.late_ramp.mu[i0], c, 1e-15);
    EXPECT_TRUE(verify_monotone(w.early_ramp, 0.0));
    EXPECT_TRUE(verify_monotone(w.late_ramp, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double a = w.early_ramp.mu[i], b = w.late_ramp.mu[i];
      ASSERT_GE(a, b);
      ASSERT_GE(b, 0.0);
      ASSERT_LE(a, c);
      const double dist = std::abs(static_cast<double>(i) - static_cast<double>(i0));
      if (dist >= static_cast<double>(n) * eps) {
        ASSERT_EQ(a, b) << "i=" << i;
      }
    }
    EXPECT_TRUE(verify_lipschitz(w.early_ramp, w.early_ramp.meta.L1));
    EXPECT_TRUE(verify_smooth_auto(w.early_ramp, w.early_ramp.meta.beta, w.early_ramp.meta.M));
    EXPECT_TRUE(verify_smooth_auto(w.late_ramp, w.late_ramp.meta.beta, w.late_ramp.meta.M));
  }
}

TEST(Wright, LocalExponentAtCentre) {
  for (double alpha : {1.0, 1.5, 2.0}) {
    const auto w = wright_pair(10000, alpha);
    const double c = w.params.c_n, eps = w.params.eps_n;
    const double C = c * std::pow(2.0, alpha - 1.0) / std::pow(eps, alpha);
    for (int k = 0; k <= 2000; ++k) {
      const double t = k / 2000.0;
      const double bound = C * std::pow(std::abs(t - 0.5), alpha) * (1 + 1e-12) + 1e-15;
      ASSERT_LE(std::abs(wright_early(t, c, eps, alpha) - wright_early(0.5, c, eps, alpha)), bound);
      ASSERT_LE(std::abs(wright_late(t, c, eps, alpha) - wright_late(0.5, c, eps, alpha)), bound);
    }
  }
}

TEST(Wright, Infeasible) {
  EXPECT_THROW(wright_pair(10001, 1.0), ConstructionError);
  EXPECT_THROW(wright_pair(100, 0.5), ConstructionError);
  EXPECT_THROW(wright_pair(100, 1.0, 1.0, 10.0), ConstructionError);
}
