#pragma once

// Noise models for Y = mu + Z with independent, mean-zero entries.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "isolab/iso.hpp"
#include "isolab/rng.hpp"

namespace isolab {

enum class NoiseFamily {
  gaussian,              // sigma_i * N(0, 1)
  centered_bernoulli,    // B_i - p_i with B_i ~ Bernoulli(p_i)
  centered_exponential,  // sigma_i * (E - 1) with E ~ Exp(1); skewed on purpose
};

inline std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::centered_bernoulli: return "centered_bernoulli";
    case NoiseFamily::centered_exponential: return "centered_exponential";
  }
  return "unknown";
}

inline NoiseFamily parse_noise_family(std::string_view s) {
  if (s == "gaussian") return NoiseFamily::gaussian;
  if (s == "centered_bernoulli") return NoiseFamily::centered_bernoulli;
  if (s == "centered_exponential") return NoiseFamily::centered_exponential;
  throw std::invalid_argument("unknown noise family '" + std::string(s) + "'");
}

/// Subexponential tail constants: E exp(t Z_i) <= exp(t^2 lambda^2 / 2) for |t| <= tau.
struct TailBound {
  double lambda = 0.0;
  double tau = 0.0;
};

/// Lower bound and Lipschitz constant (in units of i/n) of the noise standard deviations.
struct VarianceRegularity {
  double sigma_min = 0.0;
  double L_sigma = 0.0;
};

class NoiseModel {
 public:
  using SigmaProfile = std::variant<double, std::vector<double>>;

  static NoiseModel gaussian(double sigma) { return NoiseModel(NoiseFamily::gaussian, sigma); }
  static NoiseModel gaussian(std::vector<double> sigmas) {
    return NoiseModel(NoiseFamily::gaussian, std::move(sigmas));
  }
  static NoiseModel centered_exponential(double sigma) {
    return NoiseModel(NoiseFamily::centered_exponential, sigma);
  }
  static NoiseModel centered_exponential(std::vector<double> sigmas) {
    return NoiseModel(NoiseFamily::centered_exponential, std::move(sigmas));
  }
  /// Bernoulli observations around success probabilities p_i in (0, 1).
  /// The standard-deviation profile is sqrt(p_i (1 - p_i)).
  static NoiseModel centered_bernoulli(std::vector<double> probabilities) {
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      const double p = probabilities[i];
      if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("bernoulli probability at index " + std::to_string(i) + " must lie in (0,1)");
      }
    }
    std::vector<double> sigmas(probabilities.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      sigmas[i] = std::sqrt(probabilities[i] * (1.0 - probabilities[i]));
    }
    NoiseModel m(NoiseFamily::centered_bernoulli, std::move(sigmas));
    m.probabilities_ = std::move(probabilities);
    return m;
  }

  NoiseFamily family() const noexcept { return family_; }
  const SigmaProfile& sigma_profile() const noexcept { return sigma_; }
  const std::vector<double>& bernoulli_probabilities() const noexcept { return probabilities_; }

  bool is_constant() const noexcept { return std::holds_alternative<double>(sigma_); }

  /// Length the model is tied to, if it carries a per-index profile.
  std::optional<std::size_t> profile_length() const noexcept {
    if (const auto* v = std::get_if<std::vector<double>>(&sigma_)) return v->size();
    return std::nullopt;
  }

  double sigma_at(std::size_t i) const {
    if (const auto* c = std::get_if<double>(&sigma_)) return *c;
    return std::get<std::vector<double>>(sigma_).at(i);
  }

  const std::optional<TailBound>& declared_tails() const noexcept { return tails_; }
  const std::optional<VarianceRegularity>& declared_variance_regularity() const noexcept { return regularity_; }

  NoiseModel& declare_tails(TailBound t) {
    if (!(t.lambda > 0.0) || !(t.tau > 0.0)) throw std::invalid_argument("tail constants must be positive");
    tails_ = t;
    return *this;
  }
  NoiseModel& declare_variance_regularity(VarianceRegularity r) {
    if (!(r.sigma_min > 0.0) || !(r.L_sigma >= 0.0)) {
      throw std::invalid_argument("sigma_min must be positive and L_sigma nonnegative");
    }
    regularity_ = r;
    return *this;
  }

  /// Throws if the model cannot produce n coordinates.
  void check_length(std::size_t n) const {
    if (n == 0) throw std::invalid_argument("noise length must be at least 1");
    if (auto len = profile_length(); len && *len != n) {
      throw std::invalid_argument("noise profile has length " + std::to_string(*len) + " but " +
                                  std::to_string(n) + " values were requested");
    }
  }

 private:
  NoiseModel(NoiseFamily family, SigmaProfile sigma) : family_(family), sigma_(std::move(sigma)) {
    auto check = [](double s) {
      if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("noise sigma must be finite and >= 0");
    };
    if (const auto* c = std::get_if<double>(&sigma_)) {
      check(*c);
    } else {
      const auto& v = std::get<std::vector<double>>(sigma_);
      if (v.empty()) throw std::invalid_argument("noise sigma profile is empty");
      for (double s : v) check(s);
    }
  }

  NoiseFamily family_;
  SigmaProfile sigma_;
  std::vector<double> probabilities_;
  std::optional<TailBound> tails_;
  std::optional<VarianceRegularity> regularity_;
};

/// Linear ramp sigma_i = start + (end - start) * (i + 1) / n.
inline std::vector<double> linear_ramp_profile(std::size_t n, double start, double end) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = start + (end - start) * static_cast<double>(i + 1) / static_cast<double>(n);
  }
  return s;
}

/// Standard deviations a Bernoulli(mu_i) observation would have.
inline std::vector<double> bernoulli_matched_profile(std::span<const double> mu) {
  std::vector<double> s(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > 0.0 && mu[i] < 1.0)) {
      throw std::invalid_argument("bernoulli-matched profile needs means in (0,1); index " + std::to_string(i));
    }
    s[i] = std::sqrt(mu[i] * (1.0 - mu[i]));
  }
  return s;
}

namespace detail {

inline void scale_by_sigma(const NoiseModel& model, std::span<double> out) {
  if (const auto* c = std::get_if<double>(&model.sigma_profile())) {
    for (double& v : out) v *= *c;
  } else {
    const auto& sig = std::get<std::vector<double>>(model.sigma_profile());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= sig[i];
  }
}

}  // namespace detail

/// Writes draw number `trial` of Z into `out`.
///
/// Coordinate i of trial t depends only on (seed, t, i), never on how many
/// values are requested or on which thread asks.
inline void sample_noise_into(const NoiseModel& model, std::uint64_t seed, std::uint64_t trial,
                              std::span<double> out) {
  const std::size_t n = out.size();
  model.check_length(n);
  using rng::Stream;
  switch (model.family()) {
    case NoiseFamily::gaussian: {
      for (std::size_t b = 0; 2 * b < n; ++b) {
        const auto z = rng::normal_pair(seed, Stream::noise, trial, b);
        out[2 * b] = z[0];
        if (2 * b + 1 < n) out[2 * b + 1] = z[1];
      }
      detail::scale_by_sigma(model, out);
      break;
    }
    case NoiseFamily::centered_exponential: {
      for (std::size_t i = 0; i < n; ++i) out[i] = -std::log(rng::uniform_at(seed, Stream::noise, trial, i)) - 1.0;
      detail::scale_by_sigma(model, out);
      break;
    }
    case NoiseFamily::centered_bernoulli: {
      const auto& p = model.bernoulli_probabilities();
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng::uniform_at(seed, Stream::noise, trial, i);
        out[i] = (u < p[i] ? 1.0 : 0.0) - p[i];
      }
      break;
    }
  }
}

inline Series sample_noise(const NoiseModel& model, std::size_t n, std::uint64_t seed, std::uint64_t trial = 0) {
  model.check_length(n);
  std::vector<double> z(n);
  sample_noise_into(model, seed, trial, z);
  return Series(std::move(z));
}

/// Checks the declared lower bound and Lipschitz constant of the sigma profile.
///
/// Adjacent increments bounded by L_sigma / n imply the pairwise bound
/// |sigma_i - sigma_j| <= L_sigma (j - i) / n by telescoping. A constant
/// profile is checked as a length-1 profile.
inline bool verify_variance_profile(const NoiseModel& model) {
  const auto& reg = model.declared_variance_regularity();
  if (!reg) throw std::invalid_argument("noise model declares no variance regularity to verify");
  std::vector<double> sig;
  if (const auto* c = std::get_if<double>(&model.sigma_profile())) {
    sig.assign(1, *c);
  } else {
    sig = std::get<std::vector<double>>(model.sigma_profile());
  }
  const double n = static_cast<double>(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (sig[i] < reg->sigma_min) return false;
    if (i + 1 < sig.size()) {
      const double step = std::abs(sig[i + 1] - sig[i]);
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(sig[i]) + std::abs(sig[i + 1]));
      if (step > reg->L_sigma / n + slack) return false;
    }
  }
  return true;
}

}  // namespace isolab
