#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "inar_lab/cls.hpp"
#include "inar_lab/montecarlo.hpp"
#include "inar_lab/process.hpp"

namespace inar {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Paths

inline json to_json(const PathOrigin& o) {
  return json{{"alpha", o.params.alpha()},
              {"beta", o.params.beta()},
              {"innov", o.spec.to_string()},
              {"seed", o.seed},
              {"stream", o.stream}};
}

// CSV: optional '#' comment lines, then the header `k,x`, then one row per
// observation with k = 1..n in order.
inline void write_path_csv(std::ostream& os, const SamplePath& path, std::string_view comment = {}) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "k,x\n";
  for (std::size_t k = 1; k <= path.size(); ++k) os << k << ',' << path.values[k - 1] << '\n';
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::int64_t parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("line " + std::to_string(line) + ": expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline SamplePath read_path_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<std::int64_t> values;
  while (std::getline(is, line)) {
    ++lineno;
    const auto row = detail::trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (!header) {
      if (row != "k,x") throw FormatError("path CSV must start with the header 'k,x'");
      header = true;
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos) throw FormatError("line " + std::to_string(lineno) + ": expected 'k,x'");
    const auto k = detail::parse_int(row.substr(0, comma), lineno);
    const auto x = detail::parse_int(row.substr(comma + 1), lineno);
    if (k != static_cast<std::int64_t>(values.size()) + 1) {
      throw FormatError("line " + std::to_string(lineno) + ": k must run 1, 2, ... in order");
    }
    if (x < 0) throw FormatError("line " + std::to_string(lineno) + ": counts must be nonnegative");
    values.push_back(x);
  }
  if (!header) throw FormatError("path CSV is missing the header 'k,x'");
  return SamplePath(std::move(values));
}

inline json path_to_json(const SamplePath& path) {
  json j;
  j["n"] = path.size();
  j["origin"] = path.origin ? to_json(*path.origin) : json(nullptr);
  j["values"] = path.values;
  return j;
}

inline SamplePath path_from_json(const json& j) {
  try {
    auto values = j.at("values").get<std::vector<std::int64_t>>();
    std::optional<PathOrigin> origin;
    if (j.contains("origin") && !j["origin"].is_null()) {
      const auto& o = j["origin"];
      origin = PathOrigin{InarParams(o.at("alpha").get<double>(), o.at("beta").get<double>()),
                          InnovationSpec::parse(o.at("innov").get<std::string>()),
                          o.at("seed").get<std::uint64_t>(), o.value("stream", std::uint64_t{0})};
    }
    return SamplePath(std::move(values), std::move(origin));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed path JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed path JSON: ") + e.what());
  }
}

// Reads either serialization, deciding by the first non-blank character.
inline SamplePath read_path(std::istream& is) {
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("malformed path JSON: ") + e.what());
    }
    return path_from_json(j);
  }
  std::istringstream in(text);
  return read_path_csv(in);
}

// ---------------------------------------------------------------------------
// Estimates

inline json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json estimate_to_json(const ClsEstimate& est, const NormalEquations& eq) {
  return json{{"alpha_hat", optional_number(est.alpha_hat)},
              {"beta_hat", optional_number(est.beta_hat)},
              {"branch", std::string(to_string(est.branch))},
              {"det", eq.det()},
              {"n", eq.n}};
}

// Batch rows; undefined coordinates are left empty.
inline constexpr std::string_view kEstimateCsvHeader = "input,n,alpha_hat,beta_hat,branch,det";

inline void write_estimate_csv_row(std::ostream& os, std::string_view input, const ClsEstimate& est,
                                   const NormalEquations& eq) {
  auto num = [&os](const std::optional<double>& v) {
    if (v) os << *v;
  };
  const auto old = os.precision(17);
  os << input << ',' << eq.n << ',';
  num(est.alpha_hat);
  os << ',';
  num(est.beta_hat);
  os << ',' << to_string(est.branch) << ',' << eq.det() << '\n';
  os.precision(old);
}

// ---------------------------------------------------------------------------
// Monte Carlo reports

inline json config_to_json(const McConfig& c) {
  json j{{"case", std::string(to_string(c.kind))},
         {"innov", c.spec.to_string()},
         {"n", c.n},
         {"reps", c.reps},
         {"seed", c.master_seed}};
  if (c.kind == Case::Case01) {
    j["df_steps"] = c.df_steps;
    j["df_oracle_size"] = c.df_oracle_size;
  }
  j["finite_n_allowance"] = c.allowance();
  return j;
}

// Non-finite values serialize as null.
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json report_to_json(const McReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back({{"rep", s.rep}, {"coord1", s.coord1}, {"coord2", s.coord2}});
  json j{{"config", config_to_json(r.config)},
         {"reps", r.config.reps},
         {"accepted", r.samples.size()},
         {"skipped", r.skipped},
         {"ks_stat", r.ks_stat},
         {"ks_critical", r.ks_critical},
         {"finite_n_allowance", r.finite_n_allowance},
         {"ks_threshold", r.ks_threshold},
         {"line_concentration", finite_or_null(r.line_concentration)}};
  if (r.ks_stat_coord2) j["ks_stat_coord2"] = *r.ks_stat_coord2;
  if (r.limit_variance) j["limit_variance"] = *r.limit_variance;
  if (r.line_ks_stat) j["line_ks_stat"] = *r.line_ks_stat;
  j["passed"] = r.passed;
  j["samples"] = std::move(samples);
  return j;
}

inline void write_samples_csv(std::ostream& os, const McReport& r) {
  const auto old = os.precision(17);
  os << "rep,coord1,coord2\n";
  for (const auto& s : r.samples) os << s.rep << ',' << s.coord1 << ',' << s.coord2 << '\n';
  os.precision(old);
}

}  // namespace inar
