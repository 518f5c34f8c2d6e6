#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isolab/mc_engine.hpp"

using namespace isolab;

namespace {

Signal constant_signal(std::size_t n) { return Signal{std::vector<double>(n, 0.0), {}}; }

RunOptions threads(unsigned t) {
  RunOptions o;
  o.threads = t;
  return o;
}

// Exact pmf by enumerating all 2^m outcomes of I_1..I_m.
std::vector<double> brute_force_pmf(std::size_t m) {
  std::vector<double> pmf(m + 1, 0.0);
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double p = 1.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double pj = 1.0 / static_cast<double>(j);
      p *= (mask >> (j - 1)) & 1 ? pj : 1.0 - pj;
    }
    pmf[static_cast<std::size_t>(__builtin_popcountll(mask))] += p;
  }
  return {pmf.begin() + 1, pmf.end()};
}

}  // namespace

TEST(PoissonBinomial, SmallCases) {
  EXPECT_EQ(poisson_binomial_pmf(1), (std::vector<double>{1.0}));
  const auto p2 = poisson_binomial_pmf(2);
  EXPECT_DOUBLE_EQ(p2[0], 0.5);
  EXPECT_DOUBLE_EQ(p2[1], 0.5);
  const auto p3 = poisson_binomial_pmf(3);
  EXPECT_NEAR(p3[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p3[1], 0.5, 1e-15);
  EXPECT_NEAR(p3[2], 1.0 / 6.0, 1e-15);
  EXPECT_THROW(poisson_binomial_pmf(0), std::invalid_argument);
}

TEST(PoissonBinomial, MatchesEnumeration) {
  for (std::size_t m = 1; m <= 14; ++m) {
    const auto dp = poisson_binomial_pmf(m);
    const auto bf = brute_force_pmf(m);
    ASSERT_EQ(dp.size(), m);
    for (std::size_t k = 0; k < m; ++k) ASSERT_NEAR(dp[k], bf[k], 1e-14) << "m=" << m << " k=" << k + 1;
  }
}

TEST(PoissonBinomial, SumsToOneAndMeanIsHarmonic) {
  for (std::size_t m : {1u, 10u, 100u, 1000u}) {
    const auto p = poisson_binomial_pmf(m);
    double total = 0, mean = 0;
    for (std::size_t k = 0; k < m; ++k) {
      total += p[k];
      mean += static_cast<double>(k + 1) * p[k];
    }
    double h = 0;
    for (std::size_t j = 1; j <= m; ++j) h += 1.0 / static_cast<double>(j);
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(mean, h, 1e-10);
  }
}

TEST(SegmentCounts, SmallM) {
  const auto h1 = segment_count_distribution(1, 1000, 0);
  EXPECT_EQ(h1.counts, (std::vector<std::uint64_t>{1000}));
  const auto h2 = segment_count_distribution(2, 20000, 1);
  EXPECT_EQ(h2.counts[0] + h2.counts[1], 20000u);
  EXPECT_NEAR(h2.counts[0] / 20000.0, 0.5, 4 * std::sqrt(0.25 / 20000));
  const auto h3 = segment_count_distribution(3, 50000, 2);
  EXPECT_NEAR(h3.mean(), 11.0 / 6.0, 4 * h3.std_err());
  EXPECT_THROW(segment_count_distribution(3, 999, 0), std::invalid_argument);
  EXPECT_THROW(segment_count_distribution(0, 1000, 0), std::invalid_argument);
}

TEST(SegmentCounts, FrozenStreamIsDegenerate) {
  const auto h = segment_count_distribution(10, 5000, 3, {}, StreamMode::frozen);
  EXPECT_EQ(std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; }), 1);
}

TEST(Bias, ZeroNoiseIsExactlyZero) {
  const auto s = sine_signal(500);
  const std::size_t idx[] = {0, 100, 499};
  for (const auto& e : estimate_bias(s, NoiseModel::gaussian(0.0), idx, 10, 0)) {
    EXPECT_EQ(e.bias_hat, 0.0);
    EXPECT_EQ(e.std_err, 0.0);
    EXPECT_EQ(e.trials, 10u);
  }
}

TEST(Bias, LinearMidpointIsUnbiased) {
  const auto s = linear_signal(1001, 1.0);
  const std::size_t idx[] = {500};
  const auto e = estimate_bias(s, NoiseModel::gaussian(0.1), idx, 20000, 4)[0];
  EXPECT_GT(e.std_err, 0.0);
  EXPECT_LE(std::abs(e.bias_hat), 4 * e.std_err);
}

TEST(Bias, HingeKinkIsBiasedUpward) {
  // At the convex kink the fit averages in larger values on the right.
  const auto s = hinge_signal(2000);
  const std::size_t idx[] = {999};
  const auto e = estimate_bias(s, NoiseModel::gaussian(0.1), idx, 5000, 5)[0];
  EXPECT_GT(e.bias_hat, 4 * e.std_err);
}

TEST(Bias, StdErrMatchesDefinition) {
  // Per-trial values recomputed by hand from the same noise draws.
  const auto s = sine_signal(64);
  const auto noise = NoiseModel::gaussian(0.3);
  const std::size_t idx[] = {10};
  const std::uint64_t trials = 300;
  std::vector<double> vals;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto y = sample_noise(noise, 64, 9, t).vector();
    for (std::size_t i = 0; i < 64; ++i) y[i] += s.mu[i];
    vals.push_back(iso(y).value_at(10) - s.mu[10]);
  }
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / trials;
  double ss = 0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const auto e = estimate_bias(s, noise, idx, trials, 9)[0];
  EXPECT_NEAR(e.bias_hat, mean, 1e-13);
  EXPECT_NEAR(e.std_err, std::sqrt(ss / (trials - 1) / trials), 1e-13);
}

TEST(Bias, Errors) {
  const auto s = sine_signal(10);
  const auto noise = NoiseModel::gaussian(0.1);
  const std::size_t bad[] = {10};
  const std::size_t ok[] = {3};
  EXPECT_THROW(estimate_bias(s, noise, bad, 10, 0), std::invalid_argument);
  EXPECT_THROW(estimate_bias(s, noise, ok, 1, 0), std::invalid_argument);
  EXPECT_THROW(estimate_bias(s, NoiseModel::gaussian(std::vector<double>(9, 0.1)), ok, 10, 0),
               std::invalid_argument);
}

TEST(Bias, WeightedContrastMatchesSingleIndex) {
  const auto s = sine_signal(300);
  const auto noise = NoiseModel::gaussian(0.2);
  const std::size_t idx[] = {77};
  const std::pair<std::size_t, double> terms[] = {{77, 1.0}};
  const auto a = estimate_bias(s, noise, idx, 1000, 3)[0];
  const auto b = estimate_weighted_bias(s, noise, terms, 1000, 3);
  EXPECT_EQ(a.bias_hat, b.estimate);
  EXPECT_EQ(a.std_err, b.std_err);
}

TEST(Determinism, ThreadCountDoesNotChangeBits) {
  const auto s = hinge_signal(1000);
  const auto noise = NoiseModel::centered_exponential(0.2);
  const std::size_t idx[] = {10, 499, 900};
  const auto ref = estimate_bias(s, noise, idx, 3000, 42, threads(1));
  for (unsigned t : {2u, 3u, 4u, 7u}) {
    const auto other = estimate_bias(s, noise, idx, 3000, 42, threads(t));
    for (std::size_t k = 0; k < 3; ++k) {
      ASSERT_EQ(ref[k].bias_hat, other[k].bias_hat);
      ASSERT_EQ(ref[k].std_err, other[k].std_err);
    }
  }
  EXPECT_EQ(segment_count_distribution(20, 3000, 1, threads(1)).counts,
            segment_count_distribution(20, 3000, 1, threads(4)).counts);
  EXPECT_EQ(empirical_max_error(s, noise, {100, 900}, 700, 2, threads(1)),
            empirical_max_error(s, noise, {100, 900}, 700, 2, threads(3)));
}

TEST(Breakpoints, TwoPointSymmetry) {
  const auto e = estimate_breakpoint_prob(constant_signal(2), NoiseModel::gaussian(1.0), 0, 20000, 7);
  EXPECT_NEAR(e.p_hat, 0.5, 4 * e.std_err);
  EXPECT_NEAR(e.std_err, std::sqrt(e.p_hat * (1 - e.p_hat) / 20000), 1e-15);
}

TEST(Breakpoints, NoiselessIncreasingAlwaysBreaks) {
  const auto e = estimate_breakpoint_prob(linear_signal(50, 1.0), NoiseModel::gaussian(0.0), 20, 100, 0);
  EXPECT_EQ(e.p_hat, 1.0);
}

TEST(Breakpoints, CenterBoundForStandardGaussian) {
  const std::size_t m = 50;
  const auto e = estimate_breakpoint_prob(constant_signal(2 * m), NoiseModel::gaussian(1.0), m - 1, 20000, 8);
  EXPECT_LE(e.p_hat, std::log(50.0) / 49.0 + 4 * e.std_err);
}

TEST(Breakpoints, DecreasesWithLength) {
  const auto noise = NoiseModel::gaussian(1.0);
  const auto small = estimate_breakpoint_prob(constant_signal(200), noise, 99, 20000, 10);
  const auto large = estimate_breakpoint_prob(constant_signal(2000), noise, 999, 20000, 11);
  const double se = std::hypot(small.std_err, large.std_err);
  EXPECT_GT(small.p_hat - large.p_hat, 3 * se);
}

TEST(Breakpoints, Errors) {
  const auto noise = NoiseModel::gaussian(1.0);
  EXPECT_THROW(estimate_breakpoint_prob(constant_signal(10), noise, 9, 100, 0), std::invalid_argument);
  EXPECT_THROW(estimate_breakpoint_prob(constant_signal(10), noise, 3, 99, 0), std::invalid_argument);
}

TEST(SupError, BoundAndWindow) {
  const std::size_t n = 5000;
  const double L1 = 1.0 + std::acos(-1.0) / 4.0, lambda = 0.1, delta = 0.05;
  const double lg = std::log((5000.0 * 5000.0 + 5000.0) / 0.05);
  const auto b = sup_error_bound(n, L1, lambda, delta);
  EXPECT_NEAR(b.bound, std::pow(8 * L1 * 0.01 * lg / 5000.0, 1.0 / 3.0), 1e-14);
  const double i0 = std::pow(0.1 * 5000.0 * std::sqrt(lg) / L1, 2.0 / 3.0);
  EXPECT_NEAR(b.i0, i0, 1e-9);
  EXPECT_EQ(b.window.first + 1, static_cast<std::size_t>(std::ceil(i0)));
  EXPECT_EQ(b.window.last + 1, static_cast<std::size_t>(std::floor(5001.0 - i0)));
  EXPECT_THROW(sup_error_bound(10, 0.01, 1.0, 0.05), std::invalid_argument);
  EXPECT_THROW(sup_error_bound(10, 1.0, 1.0, 1.5), std::invalid_argument);
}

TEST(SupError, ZeroNoise) {
  const auto s = sine_signal(400);
  const auto errs = empirical_max_error(s, NoiseModel::gaussian(0.0), {10, 389}, 50, 0);
  ASSERT_EQ(errs.size(), 50u);
  for (double e : errs) EXPECT_EQ(e, 0.0);
  EXPECT_THROW(empirical_max_error(s, NoiseModel::gaussian(0.0), {10, 400}, 5, 0), std::invalid_argument);
}

TEST(SupError, MatchesDirectComputation) {
  const auto s = sine_signal(300);
  const auto noise = NoiseModel::gaussian(0.2);
  const auto errs = empirical_max_error(s, noise, {20, 279}, 40, 6);
  for (std::uint64_t t = 0; t < 40; ++t) {
    auto y = sample_noise(noise, 300, 6, t).vector();
    for (std::size_t i = 0; i < 300; ++i) y[i] += s.mu[i];
    const auto fit = expand(iso(y));
    double worst = 0;
    for (std::size_t i = 20; i <= 279; ++i) worst = std::max(worst, std::abs(fit[i] - s.mu[i]));
    ASSERT_EQ(errs[t], worst);
  }
}

TEST(Halfwidth, NoiselessIsZero) {
  const auto d = estimate_segment_halfwidth(linear_signal(100, 1.0), NoiseModel::gaussian(0.0), 50, 20, 0);
  for (auto v : d) EXPECT_EQ(v, 0u);
  EXPECT_THROW(estimate_segment_halfwidth(linear_signal(100, 1.0), NoiseModel::gaussian(0.0), 100, 20, 0),
               std::invalid_argument);
}

TEST(Halfwidth, GrowsForConstantMean) {
  const auto noise = NoiseModel::gaussian(1.0);
  const auto a = estimate_segment_halfwidth(constant_signal(250), noise, 124, 2000, 1);
  const auto b = estimate_segment_halfwidth(constant_signal(1000), noise, 499, 2000, 2);
  auto median = [](std::vector<std::size_t> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  EXPECT_GT(median(b), median(a));
}

TEST(Halfwidth, LinearMeanReachesPredictedScale) {
  const std::size_t n = 4000;
  const double a = 1.0;
  const auto d = estimate_segment_halfwidth(linear_signal(n, a), NoiseModel::gaussian(1.0), n / 2 - 1, 2000, 3);
  const double threshold = std::pow(n / a, 2.0 / 3.0) / std::log(static_cast<double>(n));
  const auto hits = std::count_if(d.begin(), d.end(), [&](std::size_t v) { return v >= threshold; });
  EXPECT_GE(static_cast<double>(hits) / d.size(), 0.4);
}
