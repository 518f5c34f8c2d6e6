// isolab: isotonic regression fitting and bias experiments from the command line.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isolab/isolab.hpp"

namespace fs = std::filesystem;
using isolab::io::format_double;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kFailedCheck = 1, kInput = 2, kInfeasible = 3, kNoiseDominated = 4, kRejected = 5 };

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string format = "csv";
  bool seed_given = false;

  isolab::RunOptions run_options() const {
    isolab::RunOptions o;
    if (threads > 0) {
      o.threads = static_cast<unsigned>(threads);
    } else if (const char* env = std::getenv("ISOLAB_THREADS")) {
      try {
        const int t = std::stoi(env);
        if (t > 0) o.threads = static_cast<unsigned>(t);
      } catch (const std::exception&) {
        throw std::invalid_argument(std::string("ISOLAB_THREADS is not an integer: ") + env);
      }
    }
    return o;
  }
};

/// Data goes to --out (or stdout); the human summary goes to stdout when data
/// is written to a file and to stderr otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::invalid_argument("cannot open output file " + path);
    }
  }
  std::ostream& data() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  std::ostream& summary() { return file_.is_open() ? std::cout : std::cerr; }

 private:
  std::ofstream file_;
};

struct SignalArgs {
  std::string kind = "sine";
  std::string input;
  std::size_t n = 1000;
  isolab::SignalSpec spec;
  std::string member = "early_ramp";

  void add(CLI::App* app) {
    app->add_option("--signal", kind, "sine | hinge | linear | oscillation | wright | constant")
        ->check(CLI::IsMember({"sine", "hinge", "linear", "oscillation", "wright", "constant"}));
    app->add_option("--input", input, "signal file (.json with mu and meta, or one-column CSV)");
    app->add_option("-n,--n", n, "signal length");
    app->add_option("--a", spec.a, "slope of the linear signal");
    app->add_option("--L0", spec.L0, "oscillation: lower derivative bound");
    app->add_option("--L1", spec.L1, "oscillation: Lipschitz constant");
    app->add_option("--M", spec.M, "oscillation: smoothness constant");
    app->add_option("--beta", spec.beta, "oscillation: smoothness exponent");
    app->add_option("--alpha", spec.alpha, "wright: ramp exponent");
    app->add_option("--C1", spec.C1, "wright: constant C1");
    app->add_option("--C2", spec.C2, "wright: constant C2");
    app->add_option("--member", member, "wright: early_ramp | late_ramp")
        ->check(CLI::IsMember({"early_ramp", "late_ramp"}));
  }

  isolab::Signal build() {
    if (!input.empty()) {
      std::ifstream in(input);
      if (!in) throw std::invalid_argument("cannot open " + input);
      if (fs::path(input).extension() == ".json") {
        json j;
        try {
          in >> j;
        } catch (const json::exception& e) {
          throw isolab::io::ParseError(input + ": " + e.what());
        }
        return isolab::io::signal_from_json(j);
      }
      return isolab::io::signal_from_csv(in);
    }
    if (kind == "constant") {
      if (n < 1) throw std::invalid_argument("-n must be at least 1");
      isolab::Signal s{std::vector<double>(n, 0.0), {}};
      s.meta.description = "constant zero mean";
      return s;
    }
    spec.kind = isolab::parse_signal_kind(kind);
    spec.member = member == "late_ramp" ? isolab::WrightMember::late_ramp : isolab::WrightMember::early_ramp;
    return isolab::build_signal(spec, n);
  }
};

struct NoiseArgs {
  std::string family = "gaussian";
  double sigma = 0.1;

  void add(CLI::App* app) {
    app->add_option("--noise", family, "gaussian | centered_bernoulli | centered_exponential")
        ->check(CLI::IsMember({"gaussian", "centered_bernoulli", "centered_exponential"}));
    app->add_option("--sigma", sigma, "noise standard deviation");
  }

  isolab::NoiseModel build(const isolab::Signal& s) const {
    isolab::NoiseSpec spec;
    spec.family = isolab::parse_noise_family(family);
    spec.sigma = sigma;
    return isolab::build_noise(spec, s);
  }
};

void require_format(const Globals& g) {
  if (g.format != "csv" && g.format != "json") throw std::invalid_argument("--format must be csv or json");
}

// --------------------------------------------------------------------------

int cmd_fit(const Globals& g, const std::string& input) {
  isolab::Series y = [&] {
    if (input.empty() || input == "-") return isolab::io::read_series_csv(std::cin);
    std::ifstream in(input);
    if (!in) throw std::invalid_argument("cannot open " + input);
    return isolab::io::read_series_csv(in);
  }();
  const auto fit = isolab::iso(y);
  Output out(g.out);
  if (g.format == "json") {
    out.data() << isolab::io::dump(isolab::io::fit_to_json(fit));
  } else {
    isolab::io::write_fit_csv(out.data(), fit, false);
  }
  return kOk;
}

int cmd_bias(const Globals& g, SignalArgs& sa, const NoiseArgs& na, const std::vector<std::size_t>& indices,
             const std::string& rule, std::uint64_t trials) {
  const auto signal = sa.build();
  const auto noise = na.build(signal);
  std::vector<std::size_t> idx = indices;
  if (idx.empty()) {
    isolab::IndexRule r;
    r.kind = rule == "grid_average" ? isolab::IndexRuleKind::grid_average : isolab::IndexRuleKind::midpoint;
    idx = isolab::resolve_indices(r, signal.size());
  }
  const auto est = isolab::estimate_bias(signal, noise, idx, trials, g.seed, g.run_options());
  Output out(g.out);
  if (g.format == "json") {
    out.data() << isolab::io::dump(isolab::io::bias_to_json(est, g.seed));
  } else {
    isolab::io::write_bias_csv(out.data(), est, g.seed);
  }
  out.summary() << "bias: n=" << signal.size() << " indices=" << est.size() << " trials=" << trials
                << " seed=" << g.seed << '\n';
  return kOk;
}

int cmd_breakpoints(const Globals& g, SignalArgs& sa, const NoiseArgs& na, std::optional<std::size_t> index,
                    std::uint64_t trials) {
  const auto signal = sa.build();
  const auto noise = na.build(signal);
  const std::size_t i = index.value_or(signal.size() / 2 == 0 ? 0 : signal.size() / 2 - 1);
  const auto est = isolab::estimate_breakpoint_prob(signal, noise, i, trials, g.seed, g.run_options());
  Output out(g.out);
  if (g.format == "json") {
    out.data() << isolab::io::dump(isolab::io::breakpoint_to_json(est, g.seed));
  } else {
    isolab::io::write_breakpoint_csv(out.data(), est, g.seed);
  }
  out.summary() << "breakpoint probability at index " << i << ": " << format_double(est.p_hat) << " +- "
                << format_double(est.std_err) << " (trials=" << trials << ", seed=" << g.seed << ")\n";
  return kOk;
}

int cmd_andersen(const Globals& g, std::size_t m, std::uint64_t trials, bool negative_control) {
  if (m < 1) throw std::invalid_argument("--m must be at least 1");
  if (trials < 1000) throw std::invalid_argument("--trials must be at least 1000");
  const auto mode = negative_control ? isolab::StreamMode::frozen : isolab::StreamMode::independent;
  const auto hist = isolab::segment_count_distribution(m, trials, g.seed, g.run_options(), mode);
  const auto pmf = isolab::poisson_binomial_pmf(m);
  const auto gof = isolab::stats::chi_square_gof(hist.counts, pmf);
  const double h = isolab::stats::harmonic_number(m);
  const bool rejected = gof.p_value < 0.001;

  Output out(g.out);
  if (g.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < m; ++k) {
      rows.push_back({{"segments", k + 1},
                      {"count", hist.counts[k]},
                      {"empirical", static_cast<double>(hist.counts[k]) / static_cast<double>(trials)},
                      {"exact", pmf[k]}});
    }
    out.data() << isolab::io::dump({{"m", m},
                                    {"trials", trials},
                                    {"seed", g.seed},
                                    {"pmf", rows},
                                    {"chi_square", gof.statistic},
                                    {"df", gof.degrees_of_freedom},
                                    {"p_value", gof.p_value},
                                    {"mean_segments", hist.mean()},
                                    {"mean_std_err", hist.std_err()},
                                    {"harmonic_number", h},
                                    {"rejected", rejected}});
  } else {
    out.data() << "segments,count,empirical,exact\n";
    for (std::size_t k = 0; k < m; ++k) {
      out.data() << k + 1 << ',' << hist.counts[k] << ','
                 << format_double(static_cast<double>(hist.counts[k]) / static_cast<double>(trials)) << ','
                 << format_double(pmf[k]) << '\n';
    }
  }
  out.summary() << "andersen: m=" << m << " trials=" << trials << " seed=" << g.seed
                << " chi2=" << format_double(gof.statistic) << " df=" << gof.degrees_of_freedom
                << " p=" << format_double(gof.p_value) << " mean=" << format_double(hist.mean()) << " +- "
                << format_double(hist.std_err()) << " H_m=" << format_double(h)
                << (rejected ? " REJECTED at 0.001" : " not rejected at 0.001") << '\n';
  return rejected ? kRejected : kOk;
}

int cmd_maxerror(const Globals& g, SignalArgs& sa, const NoiseArgs& na, double delta, std::optional<double> lambda,
                 std::optional<double> L1, double level, std::uint64_t trials) {
  const auto signal = sa.build();
  const auto noise = na.build(signal);
  const double lam = lambda.value_or(na.sigma);
  const double lip = L1.value_or(signal.meta.L1);
  const auto b = isolab::sup_error_bound(signal.size(), lip, lam, delta);
  const auto errs = isolab::empirical_max_error(signal, noise, b.window, trials, g.seed, g.run_options());
  std::uint64_t exceed = 0;
  for (double e : errs) exceed += e > b.bound ? 1 : 0;
  const double frac = static_cast<double>(exceed) / static_cast<double>(trials);
  const double se = isolab::stats::binomial_std_err(frac, trials);
  const double q = isolab::stats::quantile(errs, level);

  Output out(g.out);
  if (g.format == "json") {
    out.data() << isolab::io::dump({{"n", signal.size()},
                                    {"bound", b.bound},
                                    {"i0", b.i0},
                                    {"window_first", b.window.first},
                                    {"window_last", b.window.last},
                                    {"exceedance", frac},
                                    {"exceedance_std_err", se},
                                    {"quantile_level", level},
                                    {"quantile", q},
                                    {"trials", trials},
                                    {"seed", g.seed}});
  } else {
    out.data() << "n,bound,i0,window_first,window_last,exceedance,exceedance_std_err,quantile,trials,seed\n";
    out.data() << signal.size() << ',' << format_double(b.bound) << ',' << format_double(b.i0) << ','
               << b.window.first << ',' << b.window.last << ',' << format_double(frac) << ',' << format_double(se)
               << ',' << format_double(q) << ',' << trials << ',' << g.seed << '\n';
  }
  out.summary() << "maxerror: n=" << signal.size() << " bound=" << format_double(b.bound)
                << " exceedance=" << format_double(frac) << " +- " << format_double(se) << " (delta "
                << format_double(delta) << ", trials=" << trials << ", seed=" << g.seed << ")\n";
  return kOk;
}

int cmd_verify(const Globals& g, SignalArgs& sa, std::optional<double> L0, std::optional<double> L1,
               std::optional<double> beta, std::optional<double> M, std::size_t samples) {
  const auto signal = sa.build();
  const auto& meta = signal.meta;
  struct Check {
    std::string name;
    bool ok;
  };
  std::vector<Check> checks;
  checks.push_back({"lipschitz L1=" + format_double(L1.value_or(meta.L1)),
                    isolab::verify_lipschitz(signal, L1.value_or(meta.L1))});
  checks.push_back({"monotone L0=" + format_double(L0.value_or(meta.L0)),
                    isolab::verify_monotone(signal, L0.value_or(meta.L0))});
  checks.push_back({"smooth beta=" + format_double(beta.value_or(meta.beta)) + " M=" + format_double(M.value_or(meta.M)),
                    isolab::verify_smooth_auto(signal, beta.value_or(meta.beta), M.value_or(meta.M), samples, g.seed)});
  bool all = true;
  Output out(g.out);
  if (g.format == "json") {
    json j = json::object();
    for (const auto& c : checks) j[c.name] = c.ok;
    j["n"] = signal.size();
    j["seed"] = g.seed;
    out.data() << isolab::io::dump(j);
  } else {
    out.data() << "check,ok\n";
    for (const auto& c : checks) out.data() << c.name << ',' << (c.ok ? 1 : 0) << '\n';
  }
  for (const auto& c : checks) all = all && c.ok;
  out.summary() << "verify-signal: n=" << signal.size() << (all ? " all checks passed" : " a check FAILED")
                << " (seed=" << g.seed << ")\n";
  return all ? kOk : kFailedCheck;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + p.string());
  f << text;
}

int cmd_scaling(const Globals& g, const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw isolab::io::ParseError(config_path + ": " + e.what());
  }
  auto cfg = isolab::study_config_from_json(j);
  if (g.seed_given) cfg.seed = g.seed;
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  fs::create_directories(dir);
  const auto opts = g.run_options();

  if (cfg.signal.kind == isolab::SignalKind::oscillation || cfg.signal.kind == isolab::SignalKind::wright) {
    const auto rep = isolab::run_lowerbound_study(cfg, opts);
    std::ostringstream table, plot;
    isolab::write_lowerbound_csv(table, rep, cfg.seed);
    std::vector<isolab::ScalingPoint> pts;
    for (const auto& r : rep.oscillation) pts.push_back({static_cast<double>(r.n), r.ratio});
    for (const auto& r : rep.wright) pts.push_back({static_cast<double>(r.n), r.ratio});
    isolab::write_plot_data(plot, pts, "ratio");
    write_file(dir / (cfg.name + "_table.csv"), table.str());
    write_file(dir / (cfg.name + "_summary.json"), isolab::io::dump(isolab::lowerbound_summary_json(cfg, rep)));
    write_file(dir / (cfg.name + "_ratio.dat"), plot.str());
    std::cout << cfg.name << ": ";
    for (const auto& p : pts) std::cout << "n=" << format_double(p.n) << " ratio=" << format_double(p.value) << "  ";
    if (rep.ratio_trend) {
      std::cout << "trend slope=" << format_double(rep.ratio_trend->slope) << " +- "
                << format_double(rep.ratio_trend->slope_se);
    }
    std::cout << " (seed=" << cfg.seed << ")\n";
    return kOk;
  }

  isolab::BiasStudyResult r;
  try {
    r = isolab::run_bias_scaling_study(cfg, opts);
  } catch (const isolab::NoiseDominatedError& e) {
    std::ostringstream table;
    isolab::BiasStudyResult partial;
    partial.points = e.points();
    isolab::write_study_table_csv(table, partial, cfg.seed);
    write_file(dir / (cfg.name + "_table.csv"), table.str());
    std::cerr << "error: " << e.what() << "; flagged n:";
    for (auto n : e.flagged_n()) std::cerr << ' ' << n;
    std::cerr << " (seed=" << cfg.seed << ")\n";
    return kNoiseDominated;
  }
  std::ostringstream table, points, plot;
  isolab::write_study_table_csv(table, r, cfg.seed);
  isolab::write_study_points_csv(points, r.points, cfg.seed);
  isolab::write_plot_data(plot, r.fit.points, "abs_bias");
  write_file(dir / (cfg.name + "_table.csv"), table.str());
  write_file(dir / (cfg.name + "_points.csv"), points.str());
  write_file(dir / (cfg.name + "_summary.json"), isolab::io::dump(isolab::study_summary_json(cfg, r)));
  write_file(dir / (cfg.name + "_bias.dat"), plot.str());
  std::cout << cfg.name << ": slope = " << format_double(r.fit.slope) << " +- " << format_double(r.fit.slope_se)
            << " (r2 " << format_double(r.fit.r_squared) << ", seed=" << cfg.seed << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isolab: isotonic regression bias experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "base RNG seed (default 0)");
  app.add_option("--threads", g.threads, "worker threads (default: ISOLAB_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "output file (output directory for scaling)");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string fit_input;
  auto* fit = app.add_subcommand("fit", "isotonic fit of a one-column CSV (file or stdin)");
  fit->add_option("input", fit_input, "CSV path; '-' or omitted reads stdin");

  SignalArgs bias_sig;
  NoiseArgs bias_noise;
  std::vector<std::size_t> bias_indices;
  std::string bias_rule = "midpoint";
  std::uint64_t bias_trials = 10000;
  auto* bias = app.add_subcommand("bias", "Monte Carlo bias of the fit at chosen indices");
  bias_sig.add(bias);
  bias_noise.add(bias);
  bias->add_option("--indices", bias_indices, "0-based indices (default: index rule)")->delimiter(',');
  bias->add_option("--index-rule", bias_rule, "midpoint | grid_average")
      ->check(CLI::IsMember({"midpoint", "grid_average"}));
  bias->add_option("--trials", bias_trials, "Monte Carlo trials")->check(CLI::Range(2ull, ~0ull >> 1));

  std::string scaling_config;
  auto* scaling = app.add_subcommand("scaling", "run a study config; writes artifacts to --out directory");
  scaling->add_option("config", scaling_config, "study JSON")->required();

  SignalArgs bp_sig;
  NoiseArgs bp_noise;
  std::optional<std::size_t> bp_index;
  std::uint64_t bp_trials = 10000;
  auto* bp = app.add_subcommand("breakpoints", "probability of a breakpoint after an index");
  bp_sig.kind = "constant";
  bp_noise.sigma = 1.0;
  bp_sig.add(bp);
  bp_noise.add(bp);
  bp->add_option("--index", bp_index, "0-based index (default n/2 - 1)");
  bp->add_option("--trials", bp_trials, "Monte Carlo trials (>= 100)");

  std::size_t and_m = 10;
  std::uint64_t and_trials = 100000;
  bool and_negative = false;
  auto* andersen = app.add_subcommand("andersen", "segment-count law of a fitted pure-noise vector");
  andersen->add_option("--m", and_m, "vector length");
  andersen->add_option("--trials", and_trials, "Monte Carlo trials (>= 1000)");
  andersen->add_flag("--negative-control", and_negative, "reuse one noise draw for every trial (must be rejected)");

  SignalArgs me_sig;
  NoiseArgs me_noise;
  double me_delta = 0.05;
  double me_level = 0.95;
  std::optional<double> me_lambda, me_L1;
  std::uint64_t me_trials = 10000;
  auto* maxerror = app.add_subcommand("maxerror", "interior sup-error against its high-probability bound");
  me_sig.add(maxerror);
  me_noise.add(maxerror);
  maxerror->add_option("--delta", me_delta, "failure probability of the bound");
  maxerror->add_option("--lambda", me_lambda, "subgaussian parameter (default: sigma)");
  maxerror->add_option("--lipschitz", me_L1, "Lipschitz constant (default: signal metadata)");
  maxerror->add_option("--quantile", me_level, "reported quantile of the max error")->check(CLI::Range(0.0, 1.0));
  maxerror->add_option("--trials", me_trials, "Monte Carlo trials");

  SignalArgs vs_sig;
  std::optional<double> vs_L0, vs_L1, vs_beta, vs_M;
  std::size_t vs_samples = 100000;
  auto* verify = app.add_subcommand("verify-signal", "check regularity of a signal (defaults: its metadata)");
  vs_sig.add(verify);
  verify->add_option("--check-L0", vs_L0, "lower derivative bound");
  verify->add_option("--check-L1", vs_L1, "Lipschitz constant");
  verify->add_option("--check-beta", vs_beta, "smoothness exponent");
  verify->add_option("--check-M", vs_M, "smoothness constant");
  verify->add_option("--samples", vs_samples, "sampled triples for long signals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    require_format(g);
    if (*fit) return cmd_fit(g, fit_input);
    if (*bias) return cmd_bias(g, bias_sig, bias_noise, bias_indices, bias_rule, bias_trials);
    if (*scaling) return cmd_scaling(g, scaling_config);
    if (*bp) return cmd_breakpoints(g, bp_sig, bp_noise, bp_index, bp_trials);
    if (*andersen) return cmd_andersen(g, and_m, and_trials, and_negative);
    if (*maxerror) return cmd_maxerror(g, me_sig, me_noise, me_delta, me_lambda, me_L1, me_level, me_trials);
    if (*verify) return cmd_verify(g, vs_sig, vs_L0, vs_L1, vs_beta, vs_M, vs_samples);
  } catch (const isolab::ConstructionError& e) {
    std::cerr << "infeasible construction: " << e.what() << '\n';
    return kInfeasible;
  } catch (const isolab::NoiseDominatedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoiseDominated;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kInput;
}
