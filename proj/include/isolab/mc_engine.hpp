#pragma once

// Seeded Monte Carlo estimators built on the isotonic fit.
//
// Trial t of any estimator observes Y = mu + Z where Z is draw t of the noise
// model under the given seed. Results depend only on the arguments, never
// on RunOptions::threads.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isolab/iso.hpp"
#include "isolab/noise.hpp"
#include "isolab/runner.hpp"
#include "isolab/signals.hpp"
#include "isolab/stats.hpp"

namespace isolab {

/// Monte Carlo estimate of E[iso(Y)_index] - mu_index.
struct BiasEstimate {
  std::size_t index = 0;
  double bias_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
};

/// Monte Carlo estimate of E[sum_k w_k (iso(Y)_{i_k} - mu_{i_k})].
struct ContrastEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
};

struct BreakpointProbEstimate {
  std::size_t index = 0;
  double p_hat = 0.0;
  std::uint64_t trials = 0;
  double std_err = 0.0;
};

/// Distribution of the number of constant segments of iso(W), W ~ N(0, I_m).
struct SegmentCountHistogram {
  std::size_t m = 0;
  std::vector<std::uint64_t> counts;  // counts[k - 1] = #trials with k segments
  std::uint64_t trials = 0;

  double mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) s += static_cast<double>(k + 1) * static_cast<double>(counts[k]);
    return s / static_cast<double>(trials);
  }
  double std_err() const {
    const double mu = mean();
    double ss = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const double d = static_cast<double>(k + 1) - mu;
      ss += d * d * static_cast<double>(counts[k]);
    }
    const double var = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
    return std::sqrt(var / static_cast<double>(trials));
  }
};

/// How trial indices map to noise draws in segment_count_distribution.
enum class StreamMode {
  independent,  // trial t uses draw t
  frozen,       // every trial reuses draw 0; a deliberately broken stream for negative controls
};

namespace detail {

inline void check_signal_noise(const Signal& signal, const NoiseModel& noise) {
  Series::validate(signal.mu);
  noise.check_length(signal.size());
}

inline void check_indices(std::span<const std::size_t> indices, std::size_t n) {
  for (std::size_t i : indices) {
    if (i >= n) {
      throw std::invalid_argument("index " + std::to_string(i) + " out of range for signal of length " +
                                  std::to_string(n));
    }
  }
}

/// Per-thread scratch space: draws Y for a trial and fits it in place.
class TrialFitter {
 public:
  TrialFitter(std::span<const double> mu, const NoiseModel& noise, std::uint64_t seed)
      : mu_(mu), noise_(&noise), seed_(seed), y_(mu.size()) {}

  const IsotonicFit& run(std::uint64_t trial) {
    sample_noise_into(*noise_, seed_, trial, y_);
    for (std::size_t i = 0; i < y_.size(); ++i) y_[i] += mu_[i];
    iso_into(y_, fit_);
    return fit_;
  }

 private:
  std::span<const double> mu_;
  const NoiseModel* noise_;
  std::uint64_t seed_;
  std::vector<double> y_;
  IsotonicFit fit_;
};

}  // namespace detail

/// Bias of the isotonic fit at each requested index.
inline std::vector<BiasEstimate> estimate_bias(const Signal& signal, const NoiseModel& noise,
                                               std::span<const std::size_t> indices, std::uint64_t trials,
                                               std::uint64_t seed, const RunOptions& opts = {}) {
  detail::check_signal_noise(signal, noise);
  detail::check_indices(indices, signal.size());
  if (trials < 2) throw std::invalid_argument("estimate_bias requires at least 2 trials");
  const std::vector<std::size_t> idx(indices.begin(), indices.end());
  using Partial = std::vector<RunningMoments>;
  auto parts = run_chunked<Partial>(trials, opts, [&] {
    return [&, fitter = detail::TrialFitter(signal.mu, noise, seed)](std::uint64_t first,
                                                                      std::uint64_t last) mutable {
      Partial acc(idx.size());
      for (std::uint64_t t = first; t < last; ++t) {
        const IsotonicFit& fit = fitter.run(t);
        for (std::size_t k = 0; k < idx.size(); ++k) acc[k].add(fit.value_at(idx[k]) - signal.mu[idx[k]]);
      }
      return acc;
    };
  });
  Partial total(idx.size());
  for (const auto& p : parts) {
    for (std::size_t k = 0; k < idx.size(); ++k) total[k].merge(p[k]);
  }
  std::vector<BiasEstimate> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out[k] = {idx[k], total[k].mean, total[k].std_err(), total[k].count};
  }
  return out;
}

/// Bias of a fixed linear combination of fitted entries; the standard error
/// accounts for correlation between the entries within a trial.
inline ContrastEstimate estimate_weighted_bias(const Signal& signal, const NoiseModel& noise,
                                               std::span<const std::pair<std::size_t, double>> terms,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const RunOptions& opts = {}) {
  detail::check_signal_noise(signal, noise);
  for (const auto& [i, w] : terms) {
    if (i >= signal.size()) throw std::invalid_argument("contrast index " + std::to_string(i) + " out of range");
  }
  if (terms.empty()) throw std::invalid_argument("contrast needs at least one term");
  if (trials < 2) throw std::invalid_argument("estimate_weighted_bias requires at least 2 trials");
  const std::vector<std::pair<std::size_t, double>> tv(terms.begin(), terms.end());
  auto parts = run_chunked<RunningMoments>(trials, opts, [&] {
    return [&, fitter = detail::TrialFitter(signal.mu, noise, seed)](std::uint64_t first,
                                                                      std::uint64_t last) mutable {
      RunningMoments acc;
      for (std::uint64_t t = first; t < last; ++t) {
        const IsotonicFit& fit = fitter.run(t);
        double v = 0.0;
        for (const auto& [i, w] : tv) v += w * (fit.value_at(i) - signal.mu[i]);
        acc.add(v);
      }
      return acc;
    };
  });
  RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return {total.mean, total.std_err(), total.count};
}

/// Frequency of a breakpoint between `index` and `index + 1`.
inline BreakpointProbEstimate estimate_breakpoint_prob(const Signal& signal, const NoiseModel& noise,
                                                       std::size_t index, std::uint64_t trials, std::uint64_t seed,
                                                       const RunOptions& opts = {}) {
  detail::check_signal_noise(signal, noise);
  if (signal.size() < 2 || index >= signal.size() - 1) {
    throw std::invalid_argument("breakpoint index " + std::to_string(index) + " out of range for signal of length " +
                                std::to_string(signal.size()));
  }
  if (trials < 100) throw std::invalid_argument("estimate_breakpoint_prob requires at least 100 trials");
  auto parts = run_chunked<std::uint64_t>(trials, opts, [&] {
    return [&, fitter = detail::TrialFitter(signal.mu, noise, seed)](std::uint64_t first,
                                                                      std::uint64_t last) mutable {
      std::uint64_t hits = 0;
      for (std::uint64_t t = first; t < last; ++t) hits += has_breakpoint(fitter.run(t), index) ? 1 : 0;
      return hits;
    };
  });
  const std::uint64_t hits = std::accumulate(parts.begin(), parts.end(), std::uint64_t{0});
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {index, p, trials, stats::binomial_std_err(p, trials)};
}

/// Histogram of segment counts of iso(W) for W ~ N(0, I_m).
inline SegmentCountHistogram segment_count_distribution(std::size_t m, std::uint64_t trials, std::uint64_t seed,
                                                        const RunOptions& opts = {},
                                                        StreamMode mode = StreamMode::independent) {
  if (m < 1) throw std::invalid_argument("segment_count_distribution requires m >= 1");
  if (trials < 1000) throw std::invalid_argument("segment_count_distribution requires at least 1000 trials");
  const Signal zero{std::vector<double>(m, 0.0), {}};
  const NoiseModel standard = NoiseModel::gaussian(1.0);
  using Partial = std::vector<std::uint64_t>;
  auto parts = run_chunked<Partial>(trials, opts, [&] {
    return [&, fitter = detail::TrialFitter(zero.mu, standard, seed)](std::uint64_t first,
                                                                       std::uint64_t last) mutable {
      Partial counts(m, 0);
      for (std::uint64_t t = first; t < last; ++t) {
        const std::uint64_t draw = mode == StreamMode::frozen ? 0 : t;
        ++counts[segment_count(fitter.run(draw)) - 1];
      }
      return counts;
    };
  });
  SegmentCountHistogram h{m, Partial(m, 0), trials};
  for (const auto& p : parts) {
    for (std::size_t k = 0; k < m; ++k) h.counts[k] += p[k];
  }
  return h;
}

/// Exact law of I_1 + ... + I_m with independent I_j ~ Bernoulli(1/j).
/// Entry k - 1 holds P(sum = k); the sum is at least 1 because I_1 = 1.
inline std::vector<double> poisson_binomial_pmf(std::size_t m) {
  if (m < 1) throw std::invalid_argument("poisson_binomial_pmf requires m >= 1");
  // dist[c] = P(I_1 + ... + I_j = c), built up one Bernoulli at a time.
  std::vector<double> dist(m + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double p = 1.0 / static_cast<double>(j);
    for (std::size_t c = j; c >= 1; --c) dist[c] = dist[c] * (1.0 - p) + dist[c - 1] * p;
    dist[0] *= (1.0 - p);
  }
  return {dist.begin() + 1, dist.end()};
}

/// Inclusive 0-based window of indices for an interior sup-error.
struct IndexWindow {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// High-probability sup-error bound for an L1-Lipschitz mean with
/// lambda-subgaussian noise, and the interior it applies to.
struct SupErrorBound {
  double bound = 0.0;  // (8 L1 lambda^2 log((n^2 + n)/delta) / n)^(1/3)
  double i0 = 0.0;     // (lambda n sqrt(log((n^2 + n)/delta)) / L1)^(2/3), 1-based
  IndexWindow window;  // 0-based indices i with i0 <= i + 1 <= n + 1 - i0
};

inline IndexWindow window_from_i0(std::size_t n, double i0) {
  const double lo = std::max(1.0, std::ceil(i0));
  const double hi = std::floor(static_cast<double>(n) + 1.0 - i0);
  if (!(lo <= hi) || hi > static_cast<double>(n) || hi < 1.0) {
    throw std::invalid_argument("interior window is empty for n = " + std::to_string(n) + " and i0 = " +
                                std::to_string(i0));
  }
  return {static_cast<std::size_t>(lo) - 1, static_cast<std::size_t>(std::min(hi, static_cast<double>(n))) - 1};
}

inline SupErrorBound sup_error_bound(std::size_t n, double L1, double lambda, double delta) {
  if (!(L1 > 0.0) || !(lambda > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sup_error_bound requires L1 > 0, lambda > 0, delta in (0,1)");
  }
  const double nn = static_cast<double>(n);
  const double log_term = std::log((nn * nn + nn) / delta);
  SupErrorBound b;
  b.bound = std::cbrt(8.0 * L1 * lambda * lambda * log_term / nn);
  b.i0 = std::pow(lambda * nn * std::sqrt(log_term) / L1, 2.0 / 3.0);
  b.window = window_from_i0(n, b.i0);
  return b;
}

/// Per-trial max of |iso(Y)_i - mu_i| over the window, in trial order.
inline std::vector<double> empirical_max_error(const Signal& signal, const NoiseModel& noise, IndexWindow window,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const RunOptions& opts = {}) {
  detail::check_signal_noise(signal, noise);
  if (window.first > window.last || window.last >= signal.size()) {
    throw std::invalid_argument("max-error window is empty or out of range");
  }
  if (trials < 1) throw std::invalid_argument("empirical_max_error requires at least 1 trial");
  using Partial = std::vector<double>;
  auto parts = run_chunked<Partial>(trials, opts, [&] {
    return [&, fitter = detail::TrialFitter(signal.mu, noise, seed)](std::uint64_t first,
                                                                      std::uint64_t last) mutable {
      Partial out;
      out.reserve(static_cast<std::size_t>(last - first));
      for (std::uint64_t t = first; t < last; ++t) {
        const IsotonicFit& fit = fitter.run(t);
        double worst = 0.0;
        std::size_t s = fit.segment_index_of(window.first);
        for (std::size_t i = window.first; i <= window.last; ++i) {
          while (fit.segments()[s].end < i) ++s;
          worst = std::max(worst, std::abs(fit.segments()[s].value - signal.mu[i]));
        }
        out.push_back(worst);
      }
      return out;
    };
  });
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(trials));
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

/// Per-trial distance k_i(Y) - i from `index` to the right end of its segment.
inline std::vector<std::size_t> estimate_segment_halfwidth(const Signal& signal, const NoiseModel& noise,
                                                           std::size_t index, std::uint64_t trials,
                                                           std::uint64_t seed, const RunOptions& opts = {}) {
  detail::check_signal_noise(signal, noise);
  detail::check_indices(std::span<const std::size_t>(&index, 1), signal.size());
  if (trials < 1) throw std::invalid_argument("estimate_segment_halfwidth requires at least 1 trial");
  using Partial = std::vector<std::size_t>;
  auto parts = run_chunked<Partial>(trials, opts, [&] {
    return [&, fitter = detail::TrialFitter(signal.mu, noise, seed)](std::uint64_t first,
                                                                      std::uint64_t last) mutable {
      Partial out;
      out.reserve(static_cast<std::size_t>(last - first));
      for (std::uint64_t t = first; t < last; ++t) out.push_back(segment_bounds(fitter.run(t), index).second - index);
      return out;
    };
  });
  std::vector<std::size_t> all;
  all.reserve(static_cast<std::size_t>(trials));
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

}  // namespace isolab
