#pragma once

// Scaling-law experiments: estimate |bias| over a grid of sample sizes and
// regress log |bias| on log n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isolab/io.hpp"
#include "isolab/mc_engine.hpp"
#include "isolab/noise.hpp"
#include "isolab/runner.hpp"
#include "isolab/signals.hpp"

namespace isolab {

// ---------------------------------------------------------------------------
// Log-log regression

struct ScalingPoint {
  double n = 0.0;
  double value = 0.0;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;  // OLS standard error; zero with three points on an exact line
  std::vector<ScalingPoint> points;
};

/// Ordinary least squares of log(value) on log(n).
inline ScalingFit loglog_fit(std::span<const ScalingPoint> points) {
  if (points.size() < 3) throw std::invalid_argument("loglog_fit needs at least 3 points");
  for (const auto& p : points) {
    if (!(p.n > 0.0)) throw std::invalid_argument("loglog_fit: nonpositive n = " + io::format_double(p.n));
    if (!(p.value > 0.0)) {
      throw std::invalid_argument("loglog_fit: nonpositive value " + io::format_double(p.value) + " at n = " +
                                  io::format_double(p.n));
    }
  }
  const double k = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += std::log(p.n);
    my += std::log(p.value);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.n) - mx;
    const double dy = std::log(p.value) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("loglog_fit: all n are equal");
  ScalingFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (const auto& p : points) {
    const double r = std::log(p.value) - (f.intercept + f.slope * std::log(p.n));
    ssr += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  f.slope_se = std::sqrt(ssr / (k - 2.0) / sxx);
  f.points.assign(points.begin(), points.end());
  return f;
}

// ---------------------------------------------------------------------------
// Study configuration

enum class SignalKind { sine, hinge, linear, oscillation, wright };
enum class WrightMember { early_ramp, late_ramp };

inline std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::sine: return "sine";
    case SignalKind::hinge: return "hinge";
    case SignalKind::linear: return "linear";
    case SignalKind::oscillation: return "oscillation";
    case SignalKind::wright: return "wright";
  }
  return "unknown";
}

inline SignalKind parse_signal_kind(const std::string& s) {
  if (s == "sine") return SignalKind::sine;
  if (s == "hinge") return SignalKind::hinge;
  if (s == "linear") return SignalKind::linear;
  if (s == "oscillation") return SignalKind::oscillation;
  if (s == "wright") return SignalKind::wright;
  throw std::invalid_argument("unknown signal kind '" + s + "'");
}

/// Which construction to build at each n, with its parameters.
struct SignalSpec {
  SignalKind kind = SignalKind::sine;
  double a = 1.0;  // linear slope
  double L0 = 0.5, L1 = 1.5, M = 1.0, beta = 1.0;  // oscillation
  double alpha = 1.0, C1 = 1.0, C2 = 1.0;          // wright
  WrightMember member = WrightMember::early_ramp;
};

inline Signal build_signal(const SignalSpec& spec, std::size_t n) {
  switch (spec.kind) {
    case SignalKind::sine: return sine_signal(n);
    case SignalKind::hinge: return hinge_signal(n);
    case SignalKind::linear: return linear_signal(n, spec.a);
    case SignalKind::oscillation: return oscillation_signal(n, spec.L0, spec.L1, spec.M, spec.beta).signal;
    case SignalKind::wright: {
      auto w = wright_pair(n, spec.alpha, spec.C1, spec.C2);
      return spec.member == WrightMember::early_ramp ? std::move(w.early_ramp) : std::move(w.late_ramp);
    }
  }
  throw std::invalid_argument("unknown signal kind");
}

enum class SigmaPreset { constant, linear_ramp, bernoulli_matched };

/// Noise description independent of n; resolved against a concrete signal.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  SigmaPreset profile = SigmaPreset::constant;
  double sigma = 0.1;
  double sigma_end = 0.1;  // linear ramp end value
  std::optional<TailBound> tails;
  std::optional<VarianceRegularity> regularity;
};

inline NoiseModel build_noise(const NoiseSpec& spec, const Signal& signal) {
  std::optional<NoiseModel> m;
  if (spec.family == NoiseFamily::centered_bernoulli) {
    m = NoiseModel::centered_bernoulli(signal.mu);
  } else {
    NoiseModel::SigmaProfile prof;
    switch (spec.profile) {
      case SigmaPreset::constant: prof = spec.sigma; break;
      case SigmaPreset::linear_ramp: prof = linear_ramp_profile(signal.size(), spec.sigma, spec.sigma_end); break;
      case SigmaPreset::bernoulli_matched: prof = bernoulli_matched_profile(signal.mu); break;
    }
    if (std::holds_alternative<double>(prof)) {
      const double s = std::get<double>(prof);
      m = spec.family == NoiseFamily::gaussian ? NoiseModel::gaussian(s) : NoiseModel::centered_exponential(s);
    } else {
      auto v = std::get<std::vector<double>>(std::move(prof));
      m = spec.family == NoiseFamily::gaussian ? NoiseModel::gaussian(std::move(v))
                                               : NoiseModel::centered_exponential(std::move(v));
    }
  }
  if (spec.tails) m->declare_tails(*spec.tails);
  if (spec.regularity) m->declare_variance_regularity(*spec.regularity);
  return *m;
}

enum class IndexRuleKind { midpoint, grid_average, explicit_list };

/// Where bias is measured. Fractions refer to 1-based positions i = f n,
/// which live at 0-based index round(f n) - 1.
struct IndexRule {
  IndexRuleKind kind = IndexRuleKind::midpoint;
  double from = 0.1;
  double to = 0.9;
  double step = 0.05;
  std::vector<std::size_t> indices;  // 0-based, explicit_list only
};

inline std::vector<std::size_t> resolve_indices(const IndexRule& rule, std::size_t n) {
  auto at_fraction = [n](double f) {
    const auto pos = static_cast<long long>(std::llround(f * static_cast<double>(n)));
    if (pos < 1 || pos > static_cast<long long>(n)) {
      throw std::invalid_argument("index fraction " + io::format_double(f) + " falls outside 1..n");
    }
    return static_cast<std::size_t>(pos - 1);
  };
  switch (rule.kind) {
    case IndexRuleKind::midpoint: return {at_fraction(0.5)};
    case IndexRuleKind::grid_average: {
      if (!(rule.step > 0.0) || rule.to < rule.from) throw std::invalid_argument("bad grid_average range");
      std::vector<std::size_t> out;
      const auto steps = static_cast<long long>(std::floor((rule.to - rule.from) / rule.step + 1e-9));
      for (long long s = 0; s <= steps; ++s) out.push_back(at_fraction(rule.from + static_cast<double>(s) * rule.step));
      return out;
    }
    case IndexRuleKind::explicit_list: {
      if (rule.indices.empty()) throw std::invalid_argument("explicit index list is empty");
      for (auto i : rule.indices) {
        if (i >= n) throw std::invalid_argument("explicit index " + std::to_string(i) + " out of range");
      }
      return rule.indices;
    }
  }
  return {};
}

/// Thresholds a study preset pins for its own acceptance.
struct StudyAcceptance {
  std::optional<double> expected_slope;
  double slope_tolerance = 0.0;
  double ratio_threshold = 0.05;       // lower-bound: minimum |bias| / scale
  double ratio_slope_tolerance = 0.15; // lower-bound: max |trend slope| of the ratio
};

struct StudyConfig {
  std::string name = "study";
  SignalSpec signal;
  std::vector<std::size_t> n_grid;
  NoiseSpec noise;
  std::uint64_t trials = 2;
  std::uint64_t seed = 0;
  IndexRule index_rule;
  StudyAcceptance acceptance;

  void validate() const {
    if (n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
      if (n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("n_grid must be strictly increasing");
    }
    if (trials < 2) throw std::invalid_argument("trials must be at least 2");
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw io::ParseError(where + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace detail

inline SignalSpec signal_spec_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"kind", "a", "L0", "L1", "M", "beta", "alpha", "C1", "C2", "member"}, "signal");
  SignalSpec s;
  s.kind = parse_signal_kind(j.at("kind").get<std::string>());
  s.a = j.value("a", s.a);
  s.L0 = j.value("L0", s.L0);
  s.L1 = j.value("L1", s.L1);
  s.M = j.value("M", s.M);
  s.beta = j.value("beta", s.beta);
  s.alpha = j.value("alpha", s.alpha);
  s.C1 = j.value("C1", s.C1);
  s.C2 = j.value("C2", s.C2);
  const std::string member = j.value("member", std::string("early_ramp"));
  if (member == "early_ramp") {
    s.member = WrightMember::early_ramp;
  } else if (member == "late_ramp") {
    s.member = WrightMember::late_ramp;
  } else {
    throw io::ParseError("signal: member must be early_ramp or late_ramp");
  }
  return s;
}

inline nlohmann::json signal_spec_to_json(const SignalSpec& s) {
  nlohmann::json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case SignalKind::linear: j["a"] = s.a; break;
    case SignalKind::oscillation:
      j["L0"] = s.L0;
      j["L1"] = s.L1;
      j["M"] = s.M;
      j["beta"] = s.beta;
      break;
    case SignalKind::wright:
      j["alpha"] = s.alpha;
      j["C1"] = s.C1;
      j["C2"] = s.C2;
      j["member"] = s.member == WrightMember::early_ramp ? "early_ramp" : "late_ramp";
      break;
    default: break;
  }
  return j;
}

inline NoiseSpec noise_spec_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"family", "profile", "sigma", "sigma_end", "tails", "variance_regularity"}, "noise");
  NoiseSpec n;
  n.family = parse_noise_family(j.value("family", std::string("gaussian")));
  const std::string profile = j.value("profile", std::string("constant"));
  if (profile == "constant") {
    n.profile = SigmaPreset::constant;
  } else if (profile == "linear_ramp") {
    n.profile = SigmaPreset::linear_ramp;
  } else if (profile == "bernoulli_matched") {
    n.profile = SigmaPreset::bernoulli_matched;
  } else {
    throw io::ParseError("noise: unknown profile '" + profile + "'");
  }
  n.sigma = j.value("sigma", n.sigma);
  n.sigma_end = j.value("sigma_end", n.sigma);
  if (j.contains("tails")) n.tails = TailBound{j["tails"].at("lambda").get<double>(), j["tails"].at("tau").get<double>()};
  if (j.contains("variance_regularity")) {
    const auto& r = j["variance_regularity"];
    n.regularity = VarianceRegularity{r.at("sigma_min").get<double>(), r.at("L_sigma").get<double>()};
  }
  return n;
}

inline nlohmann::json noise_spec_to_json(const NoiseSpec& n) {
  nlohmann::json j{{"family", std::string(to_string(n.family))}, {"sigma", n.sigma}};
  switch (n.profile) {
    case SigmaPreset::constant: j["profile"] = "constant"; break;
    case SigmaPreset::linear_ramp:
      j["profile"] = "linear_ramp";
      j["sigma_end"] = n.sigma_end;
      break;
    case SigmaPreset::bernoulli_matched: j["profile"] = "bernoulli_matched"; break;
  }
  return j;
}

inline IndexRule index_rule_from_json(const nlohmann::json& j) {
  IndexRule r;
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "midpoint") {
    r.kind = IndexRuleKind::midpoint;
  } else if (kind == "grid_average") {
    r.kind = IndexRuleKind::grid_average;
  } else if (kind == "explicit") {
    r.kind = IndexRuleKind::explicit_list;
  } else {
    throw io::ParseError("index_rule: unknown kind '" + kind + "'");
  }
  if (j.is_object()) {
    detail::reject_unknown_keys(j, {"kind", "from", "to", "step", "indices"}, "index_rule");
    r.from = j.value("from", r.from);
    r.to = j.value("to", r.to);
    r.step = j.value("step", r.step);
    if (j.contains("indices")) r.indices = j["indices"].get<std::vector<std::size_t>>();
  }
  return r;
}

inline nlohmann::json index_rule_to_json(const IndexRule& r) {
  switch (r.kind) {
    case IndexRuleKind::midpoint: return {{"kind", "midpoint"}};
    case IndexRuleKind::grid_average: return {{"kind", "grid_average"}, {"from", r.from}, {"to", r.to}, {"step", r.step}};
    case IndexRuleKind::explicit_list: return {{"kind", "explicit"}, {"indices", r.indices}};
  }
  return {};
}

/// Parses and validates a study configuration file's JSON.
inline StudyConfig study_config_from_json(const nlohmann::json& j) {
  try {
    detail::reject_unknown_keys(j, {"name", "description", "signal", "n_grid", "noise", "trials", "seed", "index_rule",
                                    "acceptance"},
                                "study config");
    StudyConfig c;
    c.name = j.value("name", c.name);
    c.signal = signal_spec_from_json(j.at("signal"));
    c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    c.noise = noise_spec_from_json(j.value("noise", nlohmann::json::object()));
    c.trials = j.at("trials").get<std::uint64_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.index_rule = index_rule_from_json(j.value("index_rule", nlohmann::json("midpoint")));
    if (j.contains("acceptance")) {
      const auto& a = j["acceptance"];
      detail::reject_unknown_keys(a, {"expected_slope", "slope_tolerance", "ratio_threshold", "ratio_slope_tolerance",
                                      "note"},
                                  "acceptance");
      if (a.contains("expected_slope")) c.acceptance.expected_slope = a["expected_slope"].get<double>();
      c.acceptance.slope_tolerance = a.value("slope_tolerance", c.acceptance.slope_tolerance);
      c.acceptance.ratio_threshold = a.value("ratio_threshold", c.acceptance.ratio_threshold);
      c.acceptance.ratio_slope_tolerance = a.value("ratio_slope_tolerance", c.acceptance.ratio_slope_tolerance);
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw io::ParseError(std::string("study config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw io::ParseError(std::string("study config: ") + e.what());
  }
}

inline nlohmann::json study_config_to_json(const StudyConfig& c) {
  nlohmann::json j{{"name", c.name},
                   {"signal", signal_spec_to_json(c.signal)},
                   {"n_grid", c.n_grid},
                   {"noise", noise_spec_to_json(c.noise)},
                   {"trials", c.trials},
                   {"seed", c.seed},
                   {"index_rule", index_rule_to_json(c.index_rule)}};
  return j;
}

// ---------------------------------------------------------------------------
// Bias scaling study

struct StudyPoint {
  std::size_t n = 0;
  std::vector<BiasEstimate> estimates;
  double value = 0.0;        // mean over indices of |bias_hat|
  double signed_mean = 0.0;  // mean over indices of bias_hat
  double std_err = 0.0;      // sqrt(sum se^2) / #indices
  bool flagged = false;      // |bias| within 2 standard errors of zero
};

struct BiasStudyResult {
  std::vector<StudyPoint> points;
  ScalingFit fit;
  std::vector<std::size_t> flagged_n;
};

/// More than half of the grid is indistinguishable from Monte Carlo noise.
class NoiseDominatedError : public std::runtime_error {
 public:
  NoiseDominatedError(std::vector<StudyPoint> points, std::vector<std::size_t> flagged)
      : std::runtime_error("study is noise-dominated: " + std::to_string(flagged.size()) + " of " +
                           std::to_string(points.size()) + " grid points have |bias| <= 2 std_err"),
        points_(std::move(points)),
        flagged_(std::move(flagged)) {}
  const std::vector<StudyPoint>& points() const noexcept { return points_; }
  const std::vector<std::size_t>& flagged_n() const noexcept { return flagged_; }

 private:
  std::vector<StudyPoint> points_;
  std::vector<std::size_t> flagged_;
};

inline StudyPoint summarize_point(std::size_t n, std::vector<BiasEstimate> est) {
  StudyPoint p;
  p.n = n;
  double var = 0.0;
  for (const auto& e : est) {
    p.value += std::abs(e.bias_hat);
    p.signed_mean += e.bias_hat;
    var += e.std_err * e.std_err;
  }
  const double k = static_cast<double>(est.size());
  p.value /= k;
  p.signed_mean /= k;
  p.std_err = std::sqrt(var) / k;
  p.flagged = p.value <= 2.0 * p.std_err;
  p.estimates = std::move(est);
  return p;
}

/// For each n: build the signal, estimate bias at the rule's indices, average
/// |bias| across them; then fit log |bias| against log n.
inline BiasStudyResult run_bias_scaling_study(const StudyConfig& cfg, const RunOptions& opts = {}) {
  cfg.validate();
  BiasStudyResult r;
  for (std::size_t n : cfg.n_grid) {
    const Signal s = build_signal(cfg.signal, n);
    const NoiseModel noise = build_noise(cfg.noise, s);
    const auto idx = resolve_indices(cfg.index_rule, n);
    auto est = estimate_bias(s, noise, idx, cfg.trials, cfg.seed, opts);
    r.points.push_back(summarize_point(n, std::move(est)));
    if (r.points.back().flagged) r.flagged_n.push_back(n);
  }
  if (2 * r.flagged_n.size() > r.points.size()) throw NoiseDominatedError(r.points, r.flagged_n);
  std::vector<ScalingPoint> pts;
  for (const auto& p : r.points) pts.push_back({static_cast<double>(p.n), p.value});
  r.fit = loglog_fit(pts);
  return r;
}

inline void write_study_table_csv(std::ostream& out, const BiasStudyResult& r, std::uint64_t seed) {
  out << "n,abs_bias,signed_bias,std_err,indices,trials,seed,flagged\n";
  for (const auto& p : r.points) {
    out << p.n << ',' << io::format_double(p.value) << ',' << io::format_double(p.signed_mean) << ','
        << io::format_double(p.std_err) << ',' << p.estimates.size() << ','
        << (p.estimates.empty() ? 0 : p.estimates.front().trials) << ',' << seed << ',' << (p.flagged ? 1 : 0) << '\n';
  }
}

/// Per-index estimates of every grid point.
inline void write_study_points_csv(std::ostream& out, std::span<const StudyPoint> points, std::uint64_t seed) {
  out << "n,index,estimate,std_err,trials,seed\n";
  for (const auto& p : points) {
    for (const auto& e : p.estimates) {
      out << p.n << ',' << e.index << ',' << io::format_double(e.bias_hat) << ',' << io::format_double(e.std_err)
          << ',' << e.trials << ',' << seed << '\n';
    }
  }
}

/// Two whitespace-separated columns (n, value) readable by gnuplot and most plotting tools.
inline void write_plot_data(std::ostream& out, std::span<const ScalingPoint> pts, const std::string& label) {
  out << "# n " << label << '\n';
  for (const auto& p : pts) out << io::format_double(p.n) << ' ' << io::format_double(p.value) << '\n';
}

inline nlohmann::json scaling_fit_to_json(const ScalingFit& f) {
  return {{"slope", f.slope}, {"slope_se", f.slope_se}, {"intercept", f.intercept}, {"r2", f.r_squared}};
}

inline nlohmann::json study_summary_json(const StudyConfig& cfg, const BiasStudyResult& r) {
  nlohmann::json j = scaling_fit_to_json(r.fit);
  j["flagged_points"] = r.flagged_n;
  j["seed"] = cfg.seed;
  j["config"] = study_config_to_json(cfg);
  if (cfg.acceptance.expected_slope) {
    j["expected_slope"] = *cfg.acceptance.expected_slope;
    j["slope_tolerance"] = cfg.acceptance.slope_tolerance;
    j["within_tolerance"] = std::abs(r.fit.slope - *cfg.acceptance.expected_slope) <= cfg.acceptance.slope_tolerance;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Lower-bound constructions

/// Shrinkage of the oscillation at its interior peaks, relative to its amplitude.
struct OscillationRow {
  std::size_t n = 0;
  double a_n = 0.0, b_n = 0.0, c_n = 0.0;
  std::size_t peaks = 0;
  double shrinkage = 0.0;  // E[mean over peaks of sign(Delta_i) (mu_i - iso(Y)_i)]
  double std_err = 0.0;
  double ratio = 0.0;  // |shrinkage| / b_n
  double ratio_se = 0.0;
  std::uint64_t trials = 0;
};

struct WrightRow {
  std::size_t n = 0;
  double c_n = 0.0, eps_n = 0.0;
  std::size_t center = 0;  // 0-based index of t = 1/2
  BiasEstimate early;
  BiasEstimate late;
  double ratio = 0.0;  // max(|bias_early|, |bias_late|) / c_n
  bool direction_ok = false;  // early bias <= 0 <= late bias
};

struct LowerBoundReport {
  SignalKind kind = SignalKind::oscillation;
  std::vector<OscillationRow> oscillation;
  std::vector<WrightRow> wright;
  std::optional<ScalingFit> ratio_trend;  // log ratio on log n, when >= 3 grid points
};

/// Interior peaks of sin(c_n t): 1-based positions closest to n (pi/2 + k pi) / c_n
/// inside [0.1 n, 0.9 n], paired with the sign of the sine there.
inline std::vector<std::pair<std::size_t, double>> oscillation_peaks(std::size_t n, double c_n) {
  std::vector<std::pair<std::size_t, double>> out;
  const double nn = static_cast<double>(n);
  for (long long k = 0;; ++k) {
    const double t = (0.5 * std::numbers::pi + static_cast<double>(k) * std::numbers::pi) / c_n;
    if (t > 0.9) break;
    const auto pos = static_cast<std::size_t>(std::llround(t * nn));
    if (t < 0.1 || pos < 1) continue;
    out.emplace_back(pos - 1, k % 2 == 0 ? 1.0 : -1.0);
  }
  return out;
}

inline LowerBoundReport run_lowerbound_study(const StudyConfig& cfg, const RunOptions& opts = {}) {
  cfg.validate();
  LowerBoundReport rep;
  rep.kind = cfg.signal.kind;
  std::vector<ScalingPoint> trend;
  if (cfg.signal.kind == SignalKind::oscillation) {
    for (std::size_t n : cfg.n_grid) {
      const auto osc = oscillation_signal(n, cfg.signal.L0, cfg.signal.L1, cfg.signal.M, cfg.signal.beta);
      const NoiseModel noise = build_noise(cfg.noise, osc.signal);
      const auto peaks = oscillation_peaks(n, osc.params.c_n);
      if (peaks.empty()) throw ConstructionError("oscillation: no interior peaks at n = " + std::to_string(n));
      std::vector<std::pair<std::size_t, double>> terms;
      for (const auto& [i, sign] : peaks) terms.emplace_back(i, -sign / static_cast<double>(peaks.size()));
      const auto est = estimate_weighted_bias(osc.signal, noise, terms, cfg.trials, cfg.seed, opts);
      OscillationRow row;
      row.n = n;
      row.a_n = osc.params.a_n;
      row.b_n = osc.params.b_n;
      row.c_n = osc.params.c_n;
      row.peaks = peaks.size();
      row.shrinkage = est.estimate;
      row.std_err = est.std_err;
      row.ratio = std::abs(est.estimate) / osc.params.b_n;
      row.ratio_se = est.std_err / osc.params.b_n;
      row.trials = est.trials;
      rep.oscillation.push_back(row);
      trend.push_back({static_cast<double>(n), row.ratio});
    }
  } else if (cfg.signal.kind == SignalKind::wright) {
    for (std::size_t n : cfg.n_grid) {
      const auto w = wright_pair(n, cfg.signal.alpha, cfg.signal.C1, cfg.signal.C2);
      const std::size_t center = n / 2 - 1;
      const std::size_t idx[] = {center};
      WrightRow row;
      row.n = n;
      row.c_n = w.params.c_n;
      row.eps_n = w.params.eps_n;
      row.center = center;
      row.early = estimate_bias(w.early_ramp, build_noise(cfg.noise, w.early_ramp), idx, cfg.trials, cfg.seed, opts)[0];
      row.late = estimate_bias(w.late_ramp, build_noise(cfg.noise, w.late_ramp), idx, cfg.trials, cfg.seed, opts)[0];
      row.ratio = std::max(std::abs(row.early.bias_hat), std::abs(row.late.bias_hat)) / w.params.c_n;
      row.direction_ok = row.early.bias_hat <= 0.0 && row.late.bias_hat >= 0.0;
      rep.wright.push_back(row);
      trend.push_back({static_cast<double>(n), row.ratio});
    }
  } else {
    throw std::invalid_argument("lower-bound study needs an oscillation or wright signal");
  }
  if (trend.size() >= 3) {
    bool positive = std::all_of(trend.begin(), trend.end(), [](const ScalingPoint& p) { return p.value > 0.0; });
    if (positive) rep.ratio_trend = loglog_fit(trend);
  }
  return rep;
}

inline void write_lowerbound_csv(std::ostream& out, const LowerBoundReport& rep, std::uint64_t seed) {
  using io::format_double;
  if (rep.kind == SignalKind::oscillation) {
    out << "n,a_n,b_n,c_n,peaks,shrinkage,std_err,ratio,ratio_se,trials,seed\n";
    for (const auto& r : rep.oscillation) {
      out << r.n << ',' << format_double(r.a_n) << ',' << format_double(r.b_n) << ',' << format_double(r.c_n) << ','
          << r.peaks << ',' << format_double(r.shrinkage) << ',' << format_double(r.std_err) << ','
          << format_double(r.ratio) << ',' << format_double(r.ratio_se) << ',' << r.trials << ',' << seed << '\n';
    }
  } else {
    out << "n,c_n,eps_n,index,bias_early,std_err_early,bias_late,std_err_late,ratio,direction_ok,trials,seed\n";
    for (const auto& r : rep.wright) {
      out << r.n << ',' << format_double(r.c_n) << ',' << format_double(r.eps_n) << ',' << r.center << ','
          << format_double(r.early.bias_hat) << ',' << format_double(r.early.std_err) << ','
          << format_double(r.late.bias_hat) << ',' << format_double(r.late.std_err) << ',' << format_double(r.ratio)
          << ',' << (r.direction_ok ? 1 : 0) << ',' << r.early.trials << ',' << seed << '\n';
    }
  }
}

inline nlohmann::json lowerbound_summary_json(const StudyConfig& cfg, const LowerBoundReport& rep) {
  nlohmann::json j{{"kind", to_string(rep.kind)}, {"seed", cfg.seed}, {"config", study_config_to_json(cfg)}};
  nlohmann::json ratios = nlohmann::json::array();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.oscillation) {
    ratios.push_back({{"n", r.n}, {"ratio", r.ratio}, {"ratio_se", r.ratio_se}});
    min_ratio = std::min(min_ratio, r.ratio);
  }
  for (const auto& r : rep.wright) {
    ratios.push_back({{"n", r.n}, {"ratio", r.ratio}, {"direction_ok", r.direction_ok}});
    min_ratio = std::min(min_ratio, r.ratio);
  }
  j["ratios"] = ratios;
  j["min_ratio"] = min_ratio;
  j["ratio_threshold"] = cfg.acceptance.ratio_threshold;
  if (rep.ratio_trend) {
    j["ratio_trend"] = scaling_fit_to_json(*rep.ratio_trend);
    j["ratio_slope_tolerance"] = cfg.acceptance.ratio_slope_tolerance;
  }
  return j;
}

}  // namespace isolab
