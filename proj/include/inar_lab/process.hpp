#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "inar_lab/innovations.hpp"
#include "inar_lab/random.hpp"

namespace inar {

/// Autoregressive pair (alpha, beta) of an INAR(2) model, restricted to [0,1]^2.
class InarParams {
 public:
  InarParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("autoregressive parameters must lie in [0,1]^2");
    }
  }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  friend bool operator==(const InarParams&, const InarParams&) = default;

 private:
  double alpha_;
  double beta_;
};

enum class Stability { Stable, Unstable, Explosive };

inline std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Explosive: return "explosive";
  }
  return "?";
}

// alpha + beta is compared to 1 with this absolute slack so that decimal
// inputs such as (0.3, 0.7) land on the unit root.
inline constexpr double kUnitRootTolerance = 1e-12;

inline Stability classify(const InarParams& p) noexcept {
  const double s = p.alpha() + p.beta();
  if (std::abs(s - 1.0) <= kUnitRootTolerance) return Stability::Unstable;
  return s < 1.0 ? Stability::Stable : Stability::Explosive;
}

inline bool is_primitive(const InarParams& p) noexcept {
  return p.alpha() > 0.0 && p.beta() > 0.0;
}

struct PathOrigin {
  InarParams params;
  InnovationSpec spec;
  std::uint64_t seed;
  std::uint64_t stream;
};

/// Observed trajectory X_1..X_n. The zero start X_0 = X_{-1} = 0 is implicit:
/// at(k) returns 0 for every k <= 0.
struct SamplePath {
  std::vector<std::int64_t> values;
  std::optional<PathOrigin> origin;

  SamplePath() = default;
  explicit SamplePath(std::vector<std::int64_t> v, std::optional<PathOrigin> o = std::nullopt)
      : values(std::move(v)), origin(std::move(o)) {
    for (auto x : values) {
      if (x < 0) throw std::invalid_argument("sample paths hold nonnegative counts");
    }
  }

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }

  std::int64_t at(std::ptrdiff_t k) const {
    if (k <= 0) return 0;
    return values.at(static_cast<std::size_t>(k - 1));
  }
};

/// One transition X_k = alpha o X_{k-1} + beta o X_{k-2} + eps_k. The draws
/// happen in a fixed order: alpha-thinning, beta-thinning, innovation.
template <class Rng>
std::int64_t step(const InarParams& params, const InnovationSpec& spec, std::int64_t lag1,
                  std::int64_t lag2, Rng& rng) {
  const std::int64_t a = thin(lag1, params.alpha(), rng);
  const std::int64_t b = thin(lag2, params.beta(), rng);
  const std::int64_t e = sample_innovation(spec, rng);
  std::int64_t next = 0;
  if (__builtin_add_overflow(a, b, &next) || __builtin_add_overflow(next, e, &next)) {
    throw std::overflow_error("path count exceeds 64-bit range");
  }
  return next;
}

/// One zero-start path of length n drawn from `rng`.
template <class Rng>
SamplePath simulate(const InarParams& params, const InnovationSpec& spec, std::size_t n,
                    Rng& rng) {
  if (n < 1) throw std::invalid_argument("path length must be at least 1");
  if (!(spec.mean() > 0.0)) {
    throw std::invalid_argument("innovation mean must be positive (the zero-mean path is identically 0)");
  }
  std::vector<std::int64_t> x;
  x.reserve(n);
  std::int64_t lag1 = 0;
  std::int64_t lag2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t next = step(params, spec, lag1, lag2, rng);
    x.push_back(next);
    lag2 = lag1;
    lag1 = next;
  }
  return SamplePath(std::move(x));
}

inline SamplePath simulate(const InarParams& params, const InnovationSpec& spec, std::size_t n,
                           std::uint64_t seed, std::uint64_t stream = 0) {
  auto rng = make_stream(seed, stream);
  auto path = simulate(params, spec, n, rng);
  path.origin = PathOrigin{params, spec, seed, stream};
  return path;
}

/// Martingale differences M_k = X_k - alpha X_{k-1} - beta X_{k-2} - mu, k = 1..n.
inline std::vector<double> residuals(const SamplePath& path, const InarParams& params, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("innovation mean must be positive");
  std::vector<double> m;
  m.reserve(path.size());
  for (std::size_t k = 1; k <= path.size(); ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    m.push_back(static_cast<double>(path.at(i)) -
                params.alpha() * static_cast<double>(path.at(i - 1)) -
                params.beta() * static_cast<double>(path.at(i - 2)) - mu);
  }
  return m;
}

struct EvenOddWalks {
  std::vector<std::int64_t> even;  // U_k = X_{2k}
  std::vector<std::int64_t> odd;   // V_k = X_{2k-1}
};

/// Under (alpha, beta) = (0, 1) the even- and odd-indexed observations form two
/// independent random walks with drift mu.
inline EvenOddWalks split_even_odd(const SamplePath& path) {
  EvenOddWalks w;
  w.even.reserve(path.size() / 2);
  w.odd.reserve((path.size() + 1) / 2);
  for (std::size_t k = 1; k <= path.size(); ++k) {
    (k % 2 == 0 ? w.even : w.odd).push_back(path.values[k - 1]);
  }
  return w;
}

}  // namespace inar
