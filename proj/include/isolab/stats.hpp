#pragma once

// Small statistics helpers shared by the experiments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace isolab::stats {

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  std::vector<double> pooled_observed;
  std::vector<double> pooled_expected;
};

/// Pearson goodness-of-fit of observed counts against cell probabilities.
///
/// Adjacent cells are pooled left to right until each pooled cell expects at
/// least `min_expected` observations; a short tail is folded into the last
/// full cell. With a single pooled cell the test is vacuous (p = 1).
inline ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                                      double min_expected = 5.0) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof: observed and probabilities must be non-empty and equal length");
  }
  double total = 0.0;
  for (auto c : observed) total += static_cast<double>(c);
  if (total <= 0.0) throw std::invalid_argument("chi_square_gof: no observations");

  ChiSquareResult r;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs_acc += static_cast<double>(observed[i]);
    exp_acc += probabilities[i] * total;
    if (exp_acc >= min_expected) {
      r.pooled_observed.push_back(obs_acc);
      r.pooled_expected.push_back(exp_acc);
      obs_acc = 0.0;
      exp_acc = 0.0;
    }
  }
  if (obs_acc > 0.0 || exp_acc > 0.0) {
    if (r.pooled_expected.empty()) {
      r.pooled_observed.push_back(obs_acc);
      r.pooled_expected.push_back(exp_acc);
    } else {
      r.pooled_observed.back() += obs_acc;
      r.pooled_expected.back() += exp_acc;
    }
  }

  r.degrees_of_freedom = static_cast<int>(r.pooled_expected.size()) - 1;
  if (r.degrees_of_freedom < 1) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  for (std::size_t i = 0; i < r.pooled_expected.size(); ++i) {
    const double d = r.pooled_observed[i] - r.pooled_expected[i];
    r.statistic += d * d / r.pooled_expected[i];
  }
  const boost::math::chi_squared dist(r.degrees_of_freedom);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

/// Linearly interpolated sample quantile (the common "type 7" definition).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

inline double binomial_std_err(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

inline double harmonic_number(std::size_t m) {
  double h = 0.0;
  for (std::size_t j = m; j >= 1; --j) h += 1.0 / static_cast<double>(j);
  return h;
}

}  // namespace isolab::stats
