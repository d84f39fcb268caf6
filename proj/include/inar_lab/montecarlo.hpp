#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "inar_lab/cls.hpp"
#include "inar_lab/ks.hpp"
#include "inar_lab/limit_laws.hpp"
#include "inar_lab/parallel.hpp"
#include "inar_lab/process.hpp"
#include "inar_lab/random.hpp"

namespace inar {

/// Which nonprimitive unstable model an experiment simulates.
enum class Case { Case10, Case01 };

inline std::string_view to_string(Case c) noexcept {
  return c == Case::Case10 ? "Case10" : "Case01";
}

inline InarParams true_params(Case c) {
  return c == Case::Case10 ? InarParams(1.0, 0.0) : InarParams(0.0, 1.0);
}

// Allowances added to the asymptotic 5% KS critical values. The limit theorems
// carry no rates, so these were calibrated at n = 2000, reps = 1000.
inline constexpr double kCltFiniteNAllowance = 0.017;
inline constexpr double kDfFiniteNAllowance = 0.035;
inline constexpr double kMaxLineConcentration = 0.2;
inline constexpr std::size_t kDefaultDfOracleSize = 10000;
// Oracle draws use streams keyed by master_seed ^ kDfOracleTag.
inline constexpr std::uint64_t kDfOracleTag = 0x9e3779b97f4a7c15ULL;

struct McConfig {
  Case kind = Case::Case10;
  InnovationSpec spec = InnovationSpec::poisson(1.0);
  std::size_t n = 2000;
  std::size_t reps = 1000;
  std::uint64_t master_seed = kDefaultSeed;
  int df_steps = kDefaultDfSteps;
  std::size_t df_oracle_size = kDefaultDfOracleSize;
  std::optional<double> finite_n_allowance;

  double allowance() const noexcept {
    if (finite_n_allowance) return *finite_n_allowance;
    return kind == Case::Case10 ? kCltFiniteNAllowance : kDfFiniteNAllowance;
  }
};

inline void validate(const McConfig& c) {
  if (c.reps < 2) throw std::invalid_argument("an experiment needs at least 2 replications");
  if (c.n < 10) throw std::invalid_argument("an experiment needs paths of length >= 10");
  if (!(c.spec.mean() > 0.0)) throw std::invalid_argument("innovation mean must be positive");
  if (c.kind == Case::Case10) {
    if (!c.spec.has_finite_fourth_moment()) {
      throw std::invalid_argument("the normal limit requires a finite fourth innovation moment");
    }
    clt_limit(c.spec.mean(), c.spec.variance());  // rejects sigma^2 = 0
  } else {
    if (c.df_steps < kMinDfSteps) throw std::invalid_argument("df_steps must be >= 100");
    if (c.df_oracle_size < 1) throw std::invalid_argument("df_oracle_size must be >= 1");
  }
  if (c.allowance() < 0.0) throw std::invalid_argument("finite-n allowance must be nonnegative");
}

/// A replication failed for a reason other than a non-FullRank estimate.
class ReplicationError : public std::runtime_error {
 public:
  ReplicationError(std::size_t rep, const std::string& what)
      : std::runtime_error("replication " + std::to_string(rep) + ": " + what), rep_(rep) {}

  std::size_t replication() const noexcept { return rep_; }

 private:
  std::size_t rep_;
};

struct ReplicationSample {
  std::size_t rep;
  double coord1;
  double coord2;
};

struct McReport {
  McConfig config;
  std::vector<ReplicationSample> samples;
  std::size_t skipped = 0;
  double ks_stat = 1.0;
  double ks_critical = 0.0;
  double finite_n_allowance = 0.0;
  double ks_threshold = 0.0;
  double line_concentration = std::numeric_limits<double>::quiet_NaN();
  // Case10: the same one-sample KS test for the second coordinate.
  std::optional<double> ks_stat_coord2;
  // Case10: variance of the normal limit of each coordinate.
  std::optional<double> limit_variance;
  // Case01: two-sample KS between coord1 and -coord2.
  std::optional<double> line_ks_stat;
  bool passed = false;

  std::vector<double> coord1() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.coord1);
    return v;
  }
  std::vector<double> coord2() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.coord2);
    return v;
  }
};

namespace detail {

// mean((c1 + c2)^2) / sample variance of c1; NaN with fewer than 2 samples.
inline double line_concentration(const std::vector<ReplicationSample>& s) {
  if (s.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = static_cast<double>(s.size());
  double mean1 = 0.0;
  double sum_sq = 0.0;
  for (const auto& r : s) {
    mean1 += r.coord1;
    sum_sq += (r.coord1 + r.coord2) * (r.coord1 + r.coord2);
  }
  mean1 /= m;
  double var1 = 0.0;
  for (const auto& r : s) var1 += (r.coord1 - mean1) * (r.coord1 - mean1);
  var1 /= (m - 1.0);
  return (sum_sq / m) / var1;
}

// Runs every replication of `c`, keeping scaled errors of FullRank estimates.
inline void replicate(const McConfig& c, Rate rate, unsigned threads, McReport& report) {
  const InarParams truth = true_params(c.kind);
  const double mu = c.spec.mean();
  std::vector<std::optional<std::array<double, 2>>> slots(c.reps);
  parallel_for(c.reps, resolve_threads(threads), [&](std::size_t r) {
    try {
      auto rng = make_stream(c.master_seed, r);
      const auto path = simulate(truth, c.spec, c.n, rng);
      ClsEstimate est;
      try {
        est = estimate(path, mu);
      } catch (const CollinearRegressors&) {
        return;
      }
      if (est.branch == Branch::FullRank) slots[r] = scaled_error(est, truth, c.n, rate);
    } catch (const std::exception& e) {
      throw ReplicationError(r, e.what());
    }
  });
  for (std::size_t r = 0; r < slots.size(); ++r) {
    if (slots[r]) {
      report.samples.push_back({r, (*slots[r])[0], (*slots[r])[1]});
    } else {
      ++report.skipped;
    }
  }
}

}  // namespace detail

/// `count` Dickey-Fuller draws, draw i taken from make_stream(seed, i).
inline std::vector<DfSample> sample_df_batch(std::size_t count, int steps, std::uint64_t seed,
                                             unsigned threads = 0) {
  if (steps < kMinDfSteps) throw std::invalid_argument("DF sampler needs at least 100 steps");
  std::vector<DfSample> out(count);
  parallel_for(count, resolve_threads(threads), [&](std::size_t i) {
    auto rng = make_stream(seed, i);
    out[i] = sample_df(steps, rng);
  });
  return out;
}

/// (1,0) experiment: records (sqrt(n)(alpha_hat - 1), sqrt(n) beta_hat) per
/// FullRank replication and tests both coordinates against
/// N(0, 4 sigma^2 / (mu^2 + 4 sigma^2)).
inline McReport run_clt_experiment(const McConfig& config, unsigned threads = 0) {
  if (config.kind != Case::Case10) throw std::invalid_argument("CLT experiment needs Case10");
  validate(config);
  McReport report;
  report.config = config;
  detail::replicate(config, Rate::SqrtN, threads, report);

  const auto limit = clt_limit(config.spec.mean(), config.spec.variance());
  report.limit_variance = limit.variance();
  report.ks_critical = kKsCritical05 / std::sqrt(static_cast<double>(std::max<std::size_t>(report.samples.size(), 1)));
  report.finite_n_allowance = config.allowance();
  report.ks_threshold = report.ks_critical + report.finite_n_allowance;
  if (report.samples.empty()) return report;

  const double sd = limit.scale;
  auto cdf = [sd](double x) { return normal_cdf(x / sd); };
  const auto c1 = report.coord1();
  const auto c2 = report.coord2();
  report.ks_stat = ks_one_sample(c1, cdf).stat;
  report.ks_stat_coord2 = ks_one_sample(c2, cdf).stat;
  report.line_concentration = detail::line_concentration(report.samples);
  report.passed = report.ks_stat <= report.ks_threshold &&
                  *report.ks_stat_coord2 <= report.ks_threshold &&
                  report.line_concentration <= kMaxLineConcentration;
  return report;
}

/// (0,1) experiment: records (n alpha_hat, n(beta_hat - 1)) per FullRank
/// replication; the second coordinate is compared with fresh Dickey-Fuller
/// draws, and coord1 with -coord2.
inline McReport run_df_experiment(const McConfig& config, unsigned threads = 0) {
  if (config.kind != Case::Case01) throw std::invalid_argument("DF experiment needs Case01");
  validate(config);
  McReport report;
  report.config = config;
  detail::replicate(config, Rate::N, threads, report);

  report.finite_n_allowance = config.allowance();
  const std::size_t m = std::max<std::size_t>(report.samples.size(), 1);
  const std::size_t o = config.df_oracle_size;
  report.ks_critical = kKsCritical05 * std::sqrt(static_cast<double>(m + o) / (static_cast<double>(m) * static_cast<double>(o)));
  report.ks_threshold = report.ks_critical + report.finite_n_allowance;
  if (report.samples.empty()) return report;

  const auto draws = sample_df_batch(o, config.df_steps, config.master_seed ^ kDfOracleTag, threads);
  std::vector<double> oracle;
  oracle.reserve(draws.size());
  for (const auto& d : draws) oracle.push_back(d.value);

  const auto c1 = report.coord1();
  auto neg_c2 = report.coord2();
  report.ks_stat = ks_two_sample(neg_c2, oracle).stat;
  for (auto& v : neg_c2) v = -v;
  report.line_ks_stat = ks_two_sample(c1, neg_c2).stat;
  report.line_concentration = detail::line_concentration(report.samples);
  report.passed = report.ks_stat <= report.ks_threshold && *report.line_ks_stat <= report.ks_threshold;
  return report;
}

inline McReport run_experiment(const McConfig& config, unsigned threads = 0) {
  return config.kind == Case::Case10 ? run_clt_experiment(config, threads)
                                     : run_df_experiment(config, threads);
}

}  // namespace inar
