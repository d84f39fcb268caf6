#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "inar_lab/cls.hpp"
#include "inar_lab/io.hpp"
#include "inar_lab/limit_laws.hpp"
#include "inar_lab/montecarlo.hpp"
#include "inar_lab/process.hpp"

namespace inar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const CLI::Validator& innovation_validator() {
  static const CLI::Validator v(
      [](std::string& s) -> std::string {
        try {
          InnovationSpec::parse(s);
          return {};
        } catch (const std::exception& e) {
          return e.what();
        }
      },
      "LAW:PARAM", "innovation");
  return v;
}

// Destination for a command's output: the caller's stream, or a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

// --threads when given, otherwise INAR_LAB_THREADS, otherwise 0 (hardware
// concurrency). A malformed environment value is a usage error.
inline unsigned cli_threads(unsigned flag) {
  if (flag > 0) return flag;
  const char* env = std::getenv("INAR_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  unsigned v = 0;
  const std::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
    throw UsageError("INAR_LAB_THREADS must be a positive integer, got '" + std::string(s) + "'");
  }
  return v;
}

inline SamplePath load_path(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open input file '" + file + "'");
  try {
    return read_path(in);
  } catch (const FormatError& e) {
    throw UsageError(file + ": " + e.what());
  }
}

struct SimulateOptions {
  double alpha = 0.0;
  double beta = 0.0;
  std::string innov;
  std::size_t n = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  std::string format = "csv";
};

struct EstimateOptions {
  std::vector<std::string> inputs;
  double mu = 0.0;
  std::string output;
  std::string format = "json";
};

struct DiagOptions {
  std::string input;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string innov;
  std::size_t n = 0;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> mu;
  double det_exponent = 4.0;
  double sumsq_exponent = 3.0;
  std::string output;
  std::string format = "json";
};

struct LimitSampleOptions {
  std::size_t draws = 1000;
  int steps = kDefaultDfSteps;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::string output;
  std::string format = "text";
};

struct McOptions {
  std::string innov = "poisson:1";
  std::size_t n = 2000;
  std::size_t reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  int steps = kDefaultDfSteps;
  std::size_t oracle_size = kDefaultDfOracleSize;
  std::optional<double> allowance;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";
};

inline int do_simulate(const SimulateOptions& o, std::ostream& out) {
  const InarParams params(o.alpha, o.beta);
  const auto spec = InnovationSpec::parse(o.innov);
  if (!(spec.mean() > 0.0)) throw UsageError("innovation mean must be positive");
  const auto path = simulate(params, spec, o.n, o.seed);
  const json config{{"command", "simulate"}, {"alpha", o.alpha}, {"beta", o.beta},
                    {"innov", spec.to_string()}, {"n", o.n}, {"seed", o.seed}};
  Sink sink(o.output, out);
  if (o.format == "json") {
    auto j = path_to_json(path);
    j["config"] = config;
    sink.stream() << j.dump(2) << '\n';
  } else {
    write_path_csv(sink.stream(), path, config.dump());
  }
  return kExitOk;
}

inline int do_estimate(const EstimateOptions& o, std::ostream& out) {
  struct Row {
    std::string input;
    NormalEquations eq;
    ClsEstimate est;
  };
  std::vector<Row> rows;
  for (const auto& file : o.inputs) {
    const auto path = load_path(file);
    if (path.empty()) throw UsageError(file + ": path is empty");
    auto eq = accumulate(path, o.mu);
    auto est = estimate(eq);
    rows.push_back({file, eq, est});
  }
  const json config{{"command", "estimate"}, {"mu", o.mu}, {"inputs", o.inputs}};
  Sink sink(o.output, out);
  if (o.format == "csv") {
    sink.stream() << "# " << config.dump() << '\n' << kEstimateCsvHeader << '\n';
    for (const auto& r : rows) write_estimate_csv_row(sink.stream(), r.input, r.est, r.eq);
    return kExitOk;
  }
  if (rows.size() == 1) {
    auto j = estimate_to_json(rows[0].est, rows[0].eq);
    j["config"] = config;
    sink.stream() << j.dump(2) << '\n';
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      auto j = estimate_to_json(r.est, r.eq);
      j["input"] = r.input;
      arr.push_back(std::move(j));
    }
    sink.stream() << json{{"config", config}, {"estimates", arr}}.dump(2) << '\n';
  }
  return kExitOk;
}

inline int do_diag(const DiagOptions& o, std::ostream& out) {
  SamplePath path;
  json config{{"command", "diag"}};
  double mu = 0.0;
  if (!o.input.empty()) {
    if (o.alpha || o.beta || !o.innov.empty()) {
      throw UsageError("diag takes either --input or simulation flags, not both");
    }
    if (!o.mu) throw UsageError("diag --input requires --mu");
    path = load_path(o.input);
    mu = *o.mu;
    config["input"] = o.input;
  } else {
    if (!o.alpha || !o.beta || o.innov.empty() || o.n < 1) {
      throw UsageError("diag needs --input, or --alpha --beta --innov --n to simulate a path");
    }
    const InarParams params(*o.alpha, *o.beta);
    const auto spec = InnovationSpec::parse(o.innov);
    if (!(spec.mean() > 0.0)) throw UsageError("innovation mean must be positive");
    path = simulate(params, spec, o.n, o.seed);
    mu = o.mu.value_or(spec.mean());
    config.update(json{{"alpha", *o.alpha}, {"beta", *o.beta}, {"innov", spec.to_string()},
                       {"n", o.n}, {"seed", o.seed}});
  }
  if (path.empty()) throw UsageError("diag needs a nonempty path");
  if (!(mu > 0.0)) throw UsageError("--mu must be positive");
  config.update(json{{"mu", mu}, {"det_exponent", o.det_exponent}, {"sumsq_exponent", o.sumsq_exponent}});

  const auto eq = accumulate(path, mu);
  json result{{"n", path.size()},
              {"det", eq.det()},
              {"det_scaled", det_scaling(eq, o.det_exponent)},
              {"sum_sq_lag1_scaled", sum_sq_scaling(path, Lag::One, o.sumsq_exponent)},
              {"sum_sq_lag2_scaled", sum_sq_scaling(path, Lag::Two, o.sumsq_exponent)}};
  if (path.size() >= 2) {
    const auto blocks = building_blocks(path, mu);
    result["building_blocks"] = std::vector<double>(blocks.begin(), blocks.end());
  } else {
    result["building_blocks"] = nullptr;
  }

  Sink sink(o.output, out);
  if (o.format == "csv") {
    auto& os = sink.stream();
    os.precision(17);
    os << "# " << config.dump() << '\n' << "quantity,value\n";
    for (const char* key : {"n", "det", "det_scaled", "sum_sq_lag1_scaled", "sum_sq_lag2_scaled"}) {
      os << key << ',' << result[key].dump() << '\n';
    }
    if (!result["building_blocks"].is_null()) {
      for (std::size_t i = 0; i < 9; ++i) os << "S" << (i + 1) << ',' << result["building_blocks"][i].dump() << '\n';
    }
  } else {
    result["config"] = config;
    sink.stream() << result.dump(2) << '\n';
  }
  return kExitOk;
}

inline int do_limit_sample(const LimitSampleOptions& o, std::ostream& out) {
  const auto draws = sample_df_batch(o.draws, o.steps, o.seed, cli_threads(o.threads));
  const json config{{"command", "limit-sample"}, {"n", o.draws}, {"steps", o.steps}, {"seed", o.seed}};
  Sink sink(o.output, out);
  auto& os = sink.stream();
  if (o.format == "json") {
    std::vector<double> v;
    v.reserve(draws.size());
    for (const auto& d : draws) v.push_back(d.value);
    os << json{{"config", config}, {"values", v}}.dump(2) << '\n';
    return kExitOk;
  }
  os.precision(17);
  os << "# " << config.dump() << '\n';
  if (o.format == "csv") os << "rep,value\n";
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (o.format == "csv") os << i << ',';
    os << draws[i].value << '\n';
  }
  return kExitOk;
}

inline int do_mc(Case kind, const McOptions& o, std::ostream& out, std::ostream& err) {
  McConfig config;
  config.kind = kind;
  config.spec = InnovationSpec::parse(o.innov);
  config.n = o.n;
  config.reps = o.reps;
  config.master_seed = o.seed;
  config.df_steps = o.steps;
  config.df_oracle_size = o.oracle_size;
  config.finite_n_allowance = o.allowance;
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto report = run_experiment(config, cli_threads(o.threads));
  Sink sink(o.output, out);
  if (o.format == "csv") {
    sink.stream() << "# " << config_to_json(config).dump() << '\n';
    write_samples_csv(sink.stream(), report);
  } else {
    sink.stream() << report_to_json(report).dump(2) << '\n';
  }
  err << to_string(kind) << ": ks_stat=" << report.ks_stat << " threshold=" << report.ks_threshold
      << " skipped=" << report.skipped << (report.passed ? " PASSED" : " FAILED") << '\n';
  return report.passed ? kExitOk : kExitFailed;
}

}  // namespace detail

/// Entry point of the `inar_lab` tool. Returns 0 on success, 1 when an
/// experiment fails its acceptance check (or a computation fails), 2 on usage
/// errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Simulation and CLS estimation for nonprimitive unstable INAR(2) models", "inar_lab"};
  app.require_subcommand(1);
  std::function<int()> action;

  const auto prob = CLI::Range(0.0, 1.0);
  const auto out_formats = [](std::initializer_list<std::string> f) { return CLI::IsMember(std::vector<std::string>(f)); };
  const auto thread_opt = [](CLI::Option* opt) { return opt->check(CLI::Range(1u, std::numeric_limits<unsigned>::max())); };

  detail::SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate a zero-start INAR(2) path (CSV k,x)");
  c_sim->add_option("--alpha", sim.alpha, "lag-1 thinning probability")->required()->check(prob);
  c_sim->add_option("--beta", sim.beta, "lag-2 thinning probability")->required()->check(prob);
  c_sim->add_option("--innov", sim.innov, "innovation law")->required()->check(detail::innovation_validator());
  c_sim->add_option("--n", sim.n, "path length")->required()->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  c_sim->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  c_sim->add_option("--output", sim.output, "output file (default stdout)");
  c_sim->add_option("--format", sim.format, "csv or json")->check(out_formats({"csv", "json"}))->capture_default_str();
  c_sim->callback([&] { action = [&] { return detail::do_simulate(sim, out); }; });

  detail::EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate", "CLS estimate from one or more path files");
  c_est->add_option("--input", est.inputs, "path file(s), CSV k,x or JSON")->required()->take_all();
  c_est->add_option("--mu", est.mu, "known innovation mean")->required()->check(CLI::PositiveNumber);
  c_est->add_option("--output", est.output, "output file (default stdout)");
  c_est->add_option("--format", est.format, "json or csv")->check(out_formats({"json", "csv"}))->capture_default_str();
  c_est->callback([&] { action = [&] { return detail::do_estimate(est, out); }; });

  detail::DiagOptions diag;
  auto* c_diag = app.add_subcommand("diag", "scaling diagnostics and building blocks of a path");
  c_diag->add_option("--input", diag.input, "path file; otherwise a path is simulated");
  c_diag->add_option("--alpha", diag.alpha)->check(prob);
  c_diag->add_option("--beta", diag.beta)->check(prob);
  c_diag->add_option("--innov", diag.innov)->check(detail::innovation_validator());
  c_diag->add_option("--n", diag.n)->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  c_diag->add_option("--seed", diag.seed)->capture_default_str();
  c_diag->add_option("--mu", diag.mu, "innovation mean (default: mean of --innov)")->check(CLI::PositiveNumber);
  c_diag->add_option("--det-exponent", diag.det_exponent, "det(A_n) / n^e")->capture_default_str();
  c_diag->add_option("--sumsq-exponent", diag.sumsq_exponent, "sum x^2 / n^e")->capture_default_str();
  c_diag->add_option("--output", diag.output);
  c_diag->add_option("--format", diag.format)->check(out_formats({"json", "csv"}))->capture_default_str();
  c_diag->callback([&] { action = [&] { return detail::do_diag(diag, out); }; });

  detail::LimitSampleOptions lim;
  auto* c_lim = app.add_subcommand("limit-sample", "draws of the Dickey-Fuller functional");
  c_lim->add_option("--n", lim.draws, "number of draws")->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
  c_lim->add_option("--steps", lim.steps, "grid resolution")->check(CLI::Range(kMinDfSteps, std::numeric_limits<int>::max()))->capture_default_str();
  c_lim->add_option("--seed", lim.seed)->capture_default_str();
  thread_opt(c_lim->add_option("--threads", lim.threads, "worker threads (default: $INAR_LAB_THREADS, else all cores)"));
  c_lim->add_option("--output", lim.output);
  c_lim->add_option("--format", lim.format, "text, csv or json")->check(out_formats({"text", "csv", "json"}))->capture_default_str();
  c_lim->callback([&] { action = [&] { return detail::do_limit_sample(lim, out); }; });

  detail::McOptions mc;
  auto add_mc = [&](const char* name, const char* desc, Case kind) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("--innov", mc.innov, "innovation law")->check(detail::innovation_validator())->capture_default_str();
    c->add_option("--n", mc.n, "path length")->check(CLI::Range(std::size_t{10}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
    c->add_option("--reps", mc.reps, "replications")->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
    c->add_option("--seed", mc.seed, "master seed")->capture_default_str();
    c->add_option("--allowance", mc.allowance, "finite-n KS allowance")->check(CLI::NonNegativeNumber);
    thread_opt(c->add_option("--threads", mc.threads, "worker threads (default: $INAR_LAB_THREADS, else all cores)"));
    c->add_option("--output", mc.output);
    c->add_option("--format", mc.format, "json report or csv samples")->check(out_formats({"json", "csv"}))->capture_default_str();
    if (kind == Case::Case01) {
      c->add_option("--steps", mc.steps, "DF oracle grid resolution")->check(CLI::Range(kMinDfSteps, std::numeric_limits<int>::max()))->capture_default_str();
      c->add_option("--oracle-size", mc.oracle_size, "DF oracle draws")->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
    }
    c->callback([&, kind] { action = [&, kind] { return detail::do_mc(kind, mc, out, err); }; });
  };
  add_mc("mc-clt", "Monte Carlo check of the (1,0) normal limit", Case::Case10);
  add_mc("mc-df", "Monte Carlo check of the (0,1) Dickey-Fuller limit", Case::Case01);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace inar::cli
