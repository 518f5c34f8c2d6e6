#pragma once

// CSV and JSON interchange for series, signals, noise models and estimates.
//
// Numbers are written in shortest round-trip form, so identical values always
// produce identical bytes.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "isolab/iso.hpp"
#include "isolab/mc_engine.hpp"
#include "isolab/noise.hpp"
#include "isolab/signals.hpp"

namespace isolab::io {

using nlohmann::json;

/// Input that could not be parsed; carries the 1-based line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Reads one numeric column. Blank lines are skipped; a non-numeric first
/// line is treated as a header.
inline Series read_series_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto field = detail::trim(line);
    if (field.empty()) continue;
    auto v = detail::parse_double(field);
    if (!v) {
      if (!seen_content) {
        seen_content = true;  // header
        continue;
      }
      throw ParseError("cannot parse '" + std::string(field) + "' as a number", line_no);
    }
    if (!std::isfinite(*v)) throw ParseError("value is not finite", line_no);
    seen_content = true;
    values.push_back(*v);
  }
  if (values.empty()) throw ParseError("input contains no values");
  return Series(std::move(values));
}

inline void write_series_csv(std::ostream& out, std::span<const double> values, std::string_view header = "mu") {
  out << header << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

inline void write_fit_csv(std::ostream& out, const IsotonicFit& fit, bool header = true) {
  if (header) out << "start,end,value\n";
  for (const auto& s : fit.segments()) out << s.start << ',' << s.end << ',' << format_double(s.value) << '\n';
}

inline json fit_to_json(const IsotonicFit& fit) {
  json segs = json::array();
  for (const auto& s : fit.segments()) segs.push_back({{"start", s.start}, {"end", s.end}, {"value", s.value}});
  return {{"n", fit.size()}, {"segments", segs}, {"fitted", expand(fit).vector()}};
}

inline json meta_to_json(const SignalMeta& m) {
  return {{"L0", m.L0}, {"L1", m.L1}, {"beta", m.beta}, {"M", m.M}, {"description", m.description}};
}

inline json signal_to_json(const Signal& s) { return {{"mu", s.mu}, {"meta", meta_to_json(s.meta)}}; }

inline Signal signal_from_json(const json& j) {
  try {
    Signal s;
    s.mu = j.at("mu").get<std::vector<double>>();
    Series::validate(s.mu);
    if (j.contains("meta")) {
      const auto& m = j.at("meta");
      s.meta.L0 = m.value("L0", 0.0);
      s.meta.L1 = m.value("L1", 0.0);
      s.meta.beta = m.value("beta", 1.0);
      s.meta.M = m.value("M", 0.0);
      s.meta.description = m.value("description", std::string{});
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("signal json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("signal json: ") + e.what());
  }
}

/// A signal read from CSV carries no regularity metadata.
inline Signal signal_from_csv(std::istream& in) {
  Signal s;
  s.mu = read_series_csv(in).vector();
  s.meta.description = "csv input";
  return s;
}

inline json noise_to_json(const NoiseModel& m) {
  json j;
  j["family"] = std::string(to_string(m.family()));
  if (m.family() == NoiseFamily::centered_bernoulli) {
    j["probabilities"] = m.bernoulli_probabilities();
  } else if (m.is_constant()) {
    j["sigma"] = std::get<double>(m.sigma_profile());
  } else {
    j["sigma_profile"] = std::get<std::vector<double>>(m.sigma_profile());
  }
  if (m.declared_tails()) j["tails"] = {{"lambda", m.declared_tails()->lambda}, {"tau", m.declared_tails()->tau}};
  if (m.declared_variance_regularity()) {
    j["variance_regularity"] = {{"sigma_min", m.declared_variance_regularity()->sigma_min},
                                {"L_sigma", m.declared_variance_regularity()->L_sigma}};
  }
  return j;
}

inline NoiseModel noise_from_json(const json& j) {
  try {
    const auto family = parse_noise_family(j.at("family").get<std::string>());
    std::optional<NoiseModel> m;
    if (family == NoiseFamily::centered_bernoulli) {
      m = NoiseModel::centered_bernoulli(j.at("probabilities").get<std::vector<double>>());
    } else if (j.contains("sigma_profile")) {
      auto prof = j.at("sigma_profile").get<std::vector<double>>();
      m = family == NoiseFamily::gaussian ? NoiseModel::gaussian(std::move(prof))
                                          : NoiseModel::centered_exponential(std::move(prof));
    } else {
      const double sigma = j.at("sigma").get<double>();
      m = family == NoiseFamily::gaussian ? NoiseModel::gaussian(sigma) : NoiseModel::centered_exponential(sigma);
    }
    if (j.contains("tails")) m->declare_tails({j["tails"].at("lambda").get<double>(), j["tails"].at("tau").get<double>()});
    if (j.contains("variance_regularity")) {
      const auto& r = j["variance_regularity"];
      m->declare_variance_regularity({r.at("sigma_min").get<double>(), r.at("L_sigma").get<double>()});
    }
    return *m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("noise json: ") + e.what());
  }
}

/// Estimate tables share the columns index,estimate,std_err,trials,seed.
inline void write_bias_csv(std::ostream& out, std::span<const BiasEstimate> est, std::uint64_t seed) {
  out << "index,estimate,std_err,trials,seed\n";
  for (const auto& e : est) {
    out << e.index << ',' << format_double(e.bias_hat) << ',' << format_double(e.std_err) << ',' << e.trials << ','
        << seed << '\n';
  }
}

inline json bias_to_json(std::span<const BiasEstimate> est, std::uint64_t seed) {
  json arr = json::array();
  for (const auto& e : est) {
    arr.push_back({{"index", e.index}, {"estimate", e.bias_hat}, {"std_err", e.std_err}, {"trials", e.trials},
                   {"seed", seed}});
  }
  return arr;
}

inline void write_breakpoint_csv(std::ostream& out, const BreakpointProbEstimate& e, std::uint64_t seed) {
  out << "index,estimate,std_err,trials,seed\n";
  out << e.index << ',' << format_double(e.p_hat) << ',' << format_double(e.std_err) << ',' << e.trials << ','
      << seed << '\n';
}

inline json breakpoint_to_json(const BreakpointProbEstimate& e, std::uint64_t seed) {
  return json::array(
      {{{"index", e.index}, {"estimate", e.p_hat}, {"std_err", e.std_err}, {"trials", e.trials}, {"seed", seed}}});
}

/// Canonical JSON text: sorted keys (nlohmann default), fixed indentation.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace isolab::io
