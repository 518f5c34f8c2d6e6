#pragma once

// Mean vectors mu_i = f(i / n), i = 1..n (stored 0-based), together with the
// regularity each constructor claims for them:
//
//   L0    lower slope:      mu_j - mu_i >= L0 (j - i) / n
//   L1    Lipschitz bound:  |mu_j - mu_i| <= L1 (j - i) / n
//   beta, M  Holder smoothness: mu_j deviates from the chord through mu_i and
//         mu_k by at most (M / 4) ((k - i) / n)^beta for i <= j <= k.
//
// Logarithms are natural throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isolab/rng.hpp"

namespace isolab {

/// Raised when construction parameters cannot produce a valid signal.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SignalMeta {
  double L0 = 0.0;
  double L1 = 0.0;
  double beta = 1.0;
  double M = 0.0;
  std::string description;
};

struct Signal {
  std::vector<double> mu;
  SignalMeta meta;

  std::size_t size() const noexcept { return mu.size(); }
};

/// Realized parameters of the lower-bound constructions.
struct ConstructionParams {
  double a_n = 0.0;
  double b_n = 0.0;
  double c_n = 0.0;
  double eps_n = 0.0;
  double alpha = 1.0;
  std::map<std::string, double> const_overrides;
  std::vector<std::string> warnings;
};

namespace detail {

inline double grid_point(std::size_t i0, std::size_t n) {
  return static_cast<double>(i0 + 1) / static_cast<double>(n);
}

// Rounding allowance for comparing a difference of values of size ~|a|+|b|
// against `bound`. Constructions that sit exactly at their claimed constant
// (a ramp of slope exactly L1) would otherwise fail on the last ulp.
inline double slack(double a, double b, double bound = 0.0) {
  return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b)) + 1e-10 * std::abs(bound);
}

}  // namespace detail

/// mu_i = i/n + sin(4 pi i/n) / 16. Slopes lie in [1 - pi/4, 1 + pi/4] and
/// |f''| <= pi^2.
inline Signal sine_signal(std::size_t n) {
  if (n < 2) throw std::invalid_argument("sine_signal requires n >= 2");
  Signal s;
  s.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detail::grid_point(i, n);
    s.mu[i] = t + std::sin(4.0 * std::numbers::pi * t) / 16.0;
  }
  s.meta = {1.0 - std::numbers::pi / 4.0, 1.0 + std::numbers::pi / 4.0, 2.0, std::numbers::pi * std::numbers::pi,
            "sine: t + sin(4 pi t)/16"};
  return s;
}

/// Piecewise linear hinge: 0.1 t for i <= n/2 and 1.9 t - 0.9 above, kinked at t = 1/2.
inline Signal hinge_signal(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("hinge_signal requires an even n >= 2");
  Signal s;
  s.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detail::grid_point(i, n);
    s.mu[i] = (i + 1 <= n / 2) ? 0.1 * t : 1.9 * t - 0.9;
  }
  // beta = 1 holds with M = L1 for any L1-Lipschitz monotone mean.
  s.meta = {0.1, 1.9, 1.0, 1.9, "hinge: 0.1 t below 1/2, 1.9 t - 0.9 above"};
  return s;
}

/// mu_i = a i / n. Interpolation error is zero, so any (beta, M) holds; M = a is recorded.
inline Signal linear_signal(std::size_t n, double a) {
  if (n < 1) throw std::invalid_argument("linear_signal requires n >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("linear_signal requires a > 0");
  Signal s;
  s.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.mu[i] = a * detail::grid_point(i, n);
  s.meta = {a, a, 2.0, a, "linear: a t"};
  return s;
}

struct OscillationSignal {
  Signal signal;
  ConstructionParams params;
};

/// Linear trend plus a fast sine wave whose amplitude sits at the smoothness limit:
///   mu_i = a_n t + b_n sin(c_n t),  a_n = (L1 + L0) / 2,
///   b_n = min(M/2, (L1 - L0)/2) (n log^5 n)^(-beta/3),  c_n = n^(1/3) log^(5/3) n.
/// Requires b_n c_n <= a_n so the mean stays nondecreasing.
inline OscillationSignal oscillation_signal(std::size_t n, double L0, double L1, double M, double beta) {
  if (!(L0 > 0.0)) throw ConstructionError("oscillation: requires L0 > 0");
  if (!(L1 > L0)) throw ConstructionError("oscillation: requires L1 > L0");
  if (!(M > 0.0)) throw ConstructionError("oscillation: requires M > 0");
  if (!(beta >= 1.0 && beta <= 2.0)) throw ConstructionError("oscillation: requires beta in [1, 2]");
  if (n < 3) throw ConstructionError("oscillation: requires n >= 3 so that log n > 1");
  const double nn = static_cast<double>(n);
  const double logn = std::log(nn);
  ConstructionParams p;
  p.a_n = 0.5 * (L1 + L0);
  p.b_n = std::min(0.5 * M, 0.5 * (L1 - L0)) * std::pow(nn * std::pow(logn, 5.0), -beta / 3.0);
  p.c_n = std::cbrt(nn) * std::pow(logn, 5.0 / 3.0);
  if (p.b_n * p.c_n > p.a_n) {
    throw ConstructionError("oscillation: monotonicity condition b_n * c_n <= a_n violated (b_n c_n = " +
                            std::to_string(p.b_n * p.c_n) + ", a_n = " + std::to_string(p.a_n) + ")");
  }
  // The remaining size conditions involve constants that are never pinned
  // down, so only the evaluable quantities are reported.
  p.warnings.push_back("unchecked: C1 <= c_n <= C2 n (c_n / n = " + std::to_string(p.c_n / nn) + ")");
  p.warnings.push_back("unchecked: C3 / sqrt(n log n) <= a_n <= C4 c_n^(3/2) / (log^2 n sqrt n) (sqrt(n log n) a_n = " +
                       std::to_string(std::sqrt(nn * logn) * p.a_n) + ", a_n log^2 n sqrt(n) / c_n^(3/2) = " +
                       std::to_string(p.a_n * logn * logn * std::sqrt(nn) / std::pow(p.c_n, 1.5)) + ")");
  Signal s;
  s.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detail::grid_point(i, n);
    s.mu[i] = p.a_n * t + p.b_n * std::sin(p.c_n * t);
  }
  s.meta = {L0, L1, beta, M, "oscillation: a_n t + b_n sin(c_n t)"};
  return {std::move(s), std::move(p)};
}

/// Flat-then-rising profile on [0, 1]: 0.5 (2t)^alpha below 1/2 and
/// 1 - 0.5 (2 - 2t)^alpha above. g(0) = 0, g(1/2) = 1/2, g(1) = 1.
inline double wright_profile(double t, double alpha) {
  t = std::clamp(t, 0.0, 1.0);
  if (t <= 0.5) return 0.5 * std::pow(2.0 * t, alpha);
  return 1.0 - 0.5 * std::pow(2.0 - 2.0 * t, alpha);
}

/// Two flat-step means that differ only within n * eps_n of the centre t0 = 1/2.
///
/// `early_ramp` rises from 0 to c_n on [1/2 - eps_n, 1/2]; `late_ramp` on
/// [1/2, 1/2 + eps_n]. Both are nondecreasing and locally of order
/// |t - 1/2|^alpha at the centre.
struct WrightPair {
  Signal early_ramp;
  Signal late_ramp;
  ConstructionParams params;
};

inline double wright_early(double t, double c_n, double eps_n, double alpha) {
  if (t <= 0.5 - eps_n) return 0.0;
  if (t >= 0.5) return c_n;
  return c_n * wright_profile((t - (0.5 - eps_n)) / eps_n, alpha);
}

inline double wright_late(double t, double c_n, double eps_n, double alpha) {
  if (t <= 0.5) return 0.0;
  if (t >= 0.5 + eps_n) return c_n;
  return c_n * wright_profile((t - 0.5) / eps_n, alpha);
}

/// c_n = C1 (n log^2 n)^(-alpha/(2 alpha + 1)), eps_n = C2 (n log^2 n)^(-1/(2 alpha + 1)).
inline WrightPair wright_pair(std::size_t n, double alpha, double C1 = 1.0, double C2 = 1.0) {
  if (n < 2 || n % 2 != 0) throw ConstructionError("wright: requires an even n >= 2");
  if (!(alpha >= 1.0)) throw ConstructionError("wright: requires alpha >= 1");
  if (!(C1 > 0.0) || !(C2 > 0.0)) throw ConstructionError("wright: requires C1, C2 > 0");
  const double nn = static_cast<double>(n);
  const double logn = std::log(nn);
  const double base = nn * logn * logn;
  ConstructionParams p;
  p.alpha = alpha;
  p.c_n = C1 * std::pow(base, -alpha / (2.0 * alpha + 1.0));
  p.eps_n = C2 * std::pow(base, -1.0 / (2.0 * alpha + 1.0));
  p.const_overrides = {{"C1", C1}, {"C2", C2}};
  if (!(p.eps_n < 0.5)) {
    throw ConstructionError("wright: ramp half-width eps_n = " + std::to_string(p.eps_n) + " must be below 0.5");
  }
  // Holder constant of g' with exponent beta - 1, rescaled to the ramp.
  const double beta = std::min(2.0, alpha);
  const double g_holder = alpha <= 2.0 ? alpha * std::pow(2.0, alpha - 1.0) : 2.0 * alpha * (alpha - 1.0);
  const double M = p.c_n * g_holder / std::pow(p.eps_n, beta);
  const double L1 = p.c_n * alpha / p.eps_n;
  WrightPair w;
  w.early_ramp.mu.resize(n);
  w.late_ramp.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = detail::grid_point(i, n);
    w.early_ramp.mu[i] = wright_early(t, p.c_n, p.eps_n, alpha);
    w.late_ramp.mu[i] = wright_late(t, p.c_n, p.eps_n, alpha);
  }
  w.early_ramp.meta = {0.0, L1, beta, M, "wright early ramp: rises to c_n on [1/2 - eps_n, 1/2]"};
  w.late_ramp.meta = {0.0, L1, beta, M, "wright late ramp: rises to c_n on [1/2, 1/2 + eps_n]"};
  w.params = std::move(p);
  return w;
}

/// |mu_j - mu_i| <= L1 (j - i) / n for all i <= j.
///
/// Adjacent bounds imply every pairwise bound by telescoping; for n <= 500
/// all pairs are also checked directly.
inline bool verify_lipschitz(const Signal& s, double L1) {
  const auto& mu = s.mu;
  const std::size_t n = mu.size();
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(mu[i + 1] - mu[i]) > L1 / nn + detail::slack(mu[i], mu[i + 1], L1 / nn)) return false;
  }
  if (n <= 500) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double bound = L1 * static_cast<double>(j - i) / nn;
        if (std::abs(mu[j] - mu[i]) > bound + detail::slack(mu[i], mu[j], bound)) return false;
      }
    }
  }
  return true;
}

/// mu_j - mu_i >= L0 (j - i) / n for all i <= j; adjacent differences suffice.
inline bool verify_monotone(const Signal& s, double L0) {
  const auto& mu = s.mu;
  const double nn = static_cast<double>(mu.size());
  for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
    if (mu[i + 1] - mu[i] < L0 / nn - detail::slack(mu[i], mu[i + 1], L0 / nn)) return false;
  }
  return true;
}

enum class SmoothCheckMode { exhaustive, sampled };

struct SmoothCheckOptions {
  SmoothCheckMode mode = SmoothCheckMode::exhaustive;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kExhaustiveSmoothLimit = 500;

namespace detail {

inline bool smooth_triple_ok(std::span<const double> mu, std::size_t i, std::size_t j, std::size_t k, double beta,
                             double M) {
  const double span_len = static_cast<double>(k - i);
  const double wl = static_cast<double>(k - j) / span_len;
  const double wr = static_cast<double>(j - i) / span_len;
  const double dev = std::abs(mu[j] - (wl * mu[i] + wr * mu[k]));
  const double bound = 0.25 * M * std::pow(span_len / static_cast<double>(mu.size()), beta);
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                     (std::abs(mu[i]) + std::abs(mu[j]) + std::abs(mu[k]));
  return dev <= bound * (1.0 + 1e-10) + tol;
}

}  // namespace detail

/// Triple-point Holder check. Exhaustive mode visits every i < j < k and
/// refuses n > 500; sampled mode draws `samples` uniform triples from a
/// seeded counter-based stream.
inline bool verify_smooth(const Signal& s, double beta, double M, SmoothCheckOptions opts = {}) {
  const auto& mu = s.mu;
  const std::size_t n = mu.size();
  if (n < 3) return true;
  if (opts.mode == SmoothCheckMode::exhaustive) {
    if (n > kExhaustiveSmoothLimit) {
      throw std::length_error("exhaustive smoothness check refuses n = " + std::to_string(n) + " > " +
                              std::to_string(kExhaustiveSmoothLimit));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = i + 2; k < n; ++k) {
        for (std::size_t j = i + 1; j < k; ++j) {
          if (!detail::smooth_triple_ok(mu, i, j, k, beta, M)) return false;
        }
      }
    }
    return true;
  }
  for (std::size_t draw = 0; draw < opts.samples; ++draw) {
    const auto a = rng::block_bits(opts.seed, rng::Stream::triple_sampling, draw, 0);
    const auto b = rng::block_bits(opts.seed, rng::Stream::triple_sampling, draw, 1);
    std::size_t idx[3] = {rng::bounded(a[0], n), rng::bounded(a[1], n), rng::bounded(b[0], n)};
    std::sort(idx, idx + 3);
    if (idx[0] == idx[2] || idx[1] == idx[0] || idx[1] == idx[2]) continue;  // endpoint triples are trivially fine
    if (!detail::smooth_triple_ok(mu, idx[0], idx[1], idx[2], beta, M)) return false;
  }
  return true;
}

/// Exhaustive for n <= 500, otherwise sampled with the given options.
inline bool verify_smooth_auto(const Signal& s, double beta, double M, std::size_t samples = 100000,
                               std::uint64_t seed = 0) {
  SmoothCheckOptions o;
  o.mode = s.size() <= kExhaustiveSmoothLimit ? SmoothCheckMode::exhaustive : SmoothCheckMode::sampled;
  o.samples = samples;
  o.seed = seed;
  return verify_smooth(s, beta, M, o);
}

}  // namespace isolab
