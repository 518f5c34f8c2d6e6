#include <gtest/gtest.h>

#include <cmath>

#include "isolab/noise.hpp"

using namespace isolab;

namespace {

struct Moments {
  double mean = 0, var = 0;
};

// Coordinate `i` of draws 0..trials-1 of a length-n model.
Moments coordinate_moments(const NoiseModel& m, std::size_t n, std::size_t i, std::uint64_t trials) {
  std::vector<double> z(n);
  double s = 0, ss = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    sample_noise_into(m, 99, t, z);
    s += z[i];
    ss += z[i] * z[i];
  }
  const double tr = static_cast<double>(trials);
  const double mean = s / tr;
  return {mean, (ss - tr * mean * mean) / (tr - 1)};
}

}  // namespace

TEST(Noise, DegenerateGaussianIsZero) {
  const auto z = sample_noise(NoiseModel::gaussian(0.0), 100, 1);
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(Noise, BernoulliSupport) {
  const auto z = sample_noise(NoiseModel::centered_bernoulli(std::vector<double>(500, 0.5)), 500, 2);
  int plus = 0;
  for (double v : z.values()) {
    ASSERT_TRUE(v == 0.5 || v == -0.5);
    plus += v > 0;
  }
  EXPECT_GT(plus, 150);
  EXPECT_LT(plus, 350);
}

TEST(Noise, BernoulliRejectsBadProbabilities) {
  EXPECT_THROW(NoiseModel::centered_bernoulli({0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(NoiseModel::centered_bernoulli({0.0}), std::invalid_argument);
}

TEST(Noise, ProfileLengthMismatch) {
  const auto m = NoiseModel::gaussian(std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_THROW(sample_noise(m, 4, 0), std::invalid_argument);
  EXPECT_NO_THROW(sample_noise(m, 3, 0));
  EXPECT_THROW(NoiseModel::gaussian(-1.0), std::invalid_argument);
}

TEST(Noise, Reproducible) {
  const auto m = NoiseModel::centered_exponential(0.3);
  EXPECT_EQ(sample_noise(m, 1000, 5, 7), sample_noise(m, 1000, 5, 7));
  EXPECT_NE(sample_noise(m, 1000, 5, 7), sample_noise(m, 1000, 6, 7));
  EXPECT_NE(sample_noise(m, 1000, 5, 7), sample_noise(m, 1000, 5, 8));
  // A prefix of a longer draw equals the shorter draw.
  const auto long_draw = sample_noise(m, 1001, 5, 7);
  const auto short_draw = sample_noise(m, 1000, 5, 7);
  for (std::size_t i = 0; i < 1000; ++i) ASSERT_EQ(long_draw[i], short_draw[i]);
}

TEST(Noise, GaussianLargeVector) {
  const std::size_t n = 1000000;
  const auto z = sample_noise(NoiseModel::gaussian(0.1), n, 17);
  double s = 0, ss = 0;
  for (double v : z.values()) {
    s += v;
    ss += v * v;
  }
  const double mean = s / n;
  const double var = (ss - n * mean * mean) / (n - 1);
  EXPECT_LE(std::abs(mean), 4 * 0.1 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(var, 0.01, 0.01 * 0.01);
}

TEST(Noise, PerCoordinateMomentsAllFamilies) {
  const std::uint64_t trials = 1000000;
  {
    const auto m = coordinate_moments(NoiseModel::gaussian(0.5), 3, 1, trials);
    EXPECT_LE(std::abs(m.mean), 5 * 0.5 / 1e3);
    EXPECT_NEAR(m.var / 0.25, 1.0, 0.02);
  }
  {
    const auto m = coordinate_moments(NoiseModel::centered_exponential(0.5), 3, 2, trials);
    EXPECT_LE(std::abs(m.mean), 5 * 0.5 / 1e3);
    EXPECT_NEAR(m.var / 0.25, 1.0, 0.02);
  }
  {
    const double p = 0.2;
    const double sd = std::sqrt(p * (1 - p));
    const auto m = coordinate_moments(NoiseModel::centered_bernoulli({0.5, p}), 2, 1, trials);
    EXPECT_LE(std::abs(m.mean), 5 * sd / 1e3);
    EXPECT_NEAR(m.var / (sd * sd), 1.0, 0.02);
  }
}

TEST(Noise, HeteroscedasticProfileScales) {
  std::vector<double> prof(4, 0.0);
  prof[3] = 2.0;
  const auto m = coordinate_moments(NoiseModel::gaussian(prof), 4, 3, 200000);
  EXPECT_NEAR(m.var / 4.0, 1.0, 0.02);
  const auto z = sample_noise(NoiseModel::gaussian(prof), 4, 0);
  EXPECT_EQ(z[0], 0.0);
}

TEST(Noise, ExponentialIsSkewed) {
  const auto z = sample_noise(NoiseModel::centered_exponential(1.0), 200000, 3);
  double m3 = 0;
  for (double v : z.values()) m3 += v * v * v;
  EXPECT_NEAR(m3 / 200000, 2.0, 0.2);  // third central moment of Exp(1)
}

TEST(Noise, VarianceProfileChecks) {
  auto m = NoiseModel::gaussian(0.1);
  m.declare_variance_regularity({0.05, 0.0});
  EXPECT_TRUE(verify_variance_profile(m));

  const std::size_t n = 1000;
  auto ramp = NoiseModel::gaussian(linear_ramp_profile(n, 0.1, 0.15));
  ramp.declare_variance_regularity({0.05, 0.05});
  EXPECT_TRUE(verify_variance_profile(ramp));
  ramp.declare_variance_regularity({0.05, 0.01});
  EXPECT_FALSE(verify_variance_profile(ramp));

  std::vector<double> prof(10, 0.1);
  prof[4] = 0.0;
  auto holey = NoiseModel::gaussian(prof);
  holey.declare_variance_regularity({0.01, 100.0});
  EXPECT_FALSE(verify_variance_profile(holey));

  EXPECT_THROW(verify_variance_profile(NoiseModel::gaussian(0.1)), std::invalid_argument);
}

TEST(Noise, BernoulliMatchedProfile) {
  const auto p = bernoulli_matched_profile(std::vector<double>{0.5, 0.1});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.3);
  EXPECT_THROW(bernoulli_matched_profile(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Noise, FamilyNames) {
  for (auto f : {NoiseFamily::gaussian, NoiseFamily::centered_bernoulli, NoiseFamily::centered_exponential}) {
    EXPECT_EQ(parse_noise_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_noise_family("cauchy"), std::invalid_argument);
}
