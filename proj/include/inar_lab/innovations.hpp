#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>

namespace inar {

namespace law {

struct Poisson {
  double lambda;
};

struct Bernoulli {
  double p;
};

// Number of failures before the first success, support {0, 1, ...}.
struct Geometric {
  double p;
};

struct Deterministic {
  std::int64_t value;
};

}  // namespace law

struct Moments {
  double mean;
  double variance;
  bool fourth_moment_finite;
};

/// Law of the i.i.d. innovations. A closed set of laws with analytic moments;
/// every instance is validated at construction.
class InnovationSpec {
 public:
  using Law = std::variant<law::Poisson, law::Bernoulli, law::Geometric,
                           law::Deterministic>;

  static InnovationSpec poisson(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("poisson rate must be positive and finite");
    }
    return InnovationSpec(law::Poisson{lambda});
  }

  static InnovationSpec bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("bernoulli probability must lie in [0,1]");
    }
    return InnovationSpec(law::Bernoulli{p});
  }

  static InnovationSpec geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("geometric success probability must lie in (0,1]");
    }
    return InnovationSpec(law::Geometric{p});
  }

  static InnovationSpec deterministic(std::int64_t value) {
    if (value < 0) {
      throw std::invalid_argument("deterministic innovation must be nonnegative");
    }
    return InnovationSpec(law::Deterministic{value});
  }

  // Grammar: `poisson:<rate> | bernoulli:<p> | geometric:<p> | det:<count>`.
  static InnovationSpec parse(std::string_view text);

  const Law& law() const noexcept { return law_; }

  Moments moments() const noexcept {
    return std::visit(
        [](const auto& l) -> Moments {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, law::Poisson>) {
            return {l.lambda, l.lambda, true};
          } else if constexpr (std::is_same_v<T, law::Bernoulli>) {
            return {l.p, l.p * (1.0 - l.p), true};
          } else if constexpr (std::is_same_v<T, law::Geometric>) {
            return {(1.0 - l.p) / l.p, (1.0 - l.p) / (l.p * l.p), true};
          } else {
            return {static_cast<double>(l.value), 0.0, true};
          }
        },
        law_);
  }

  double mean() const noexcept { return moments().mean; }
  double variance() const noexcept { return moments().variance; }
  bool has_finite_fourth_moment() const noexcept {
    return moments().fourth_moment_finite;
  }

  // Inverse of parse(); doubles are printed with round-trip precision.
  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, law::Poisson>) {
            os << "poisson:" << l.lambda;
          } else if constexpr (std::is_same_v<T, law::Bernoulli>) {
            os << "bernoulli:" << l.p;
          } else if constexpr (std::is_same_v<T, law::Geometric>) {
            os << "geometric:" << l.p;
          } else {
            os << "det:" << l.value;
          }
        },
        law_);
    return os.str();
  }

  friend bool operator==(const InnovationSpec& a, const InnovationSpec& b) {
    return a.to_string() == b.to_string();
  }

 private:
  explicit InnovationSpec(Law l) : law_(l) {}

  Law law_;
};

namespace detail {

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument("malformed " + std::string(what) + " parameter '" +
                                std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

inline InnovationSpec InnovationSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("innovation spec '" + std::string(text) +
                                "' must have the form <law>:<parameter>");
  }
  const auto name = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  if (name == "poisson") return poisson(detail::parse_number<double>(arg, "poisson"));
  if (name == "bernoulli") return bernoulli(detail::parse_number<double>(arg, "bernoulli"));
  if (name == "geometric") return geometric(detail::parse_number<double>(arg, "geometric"));
  if (name == "det") return deterministic(detail::parse_number<std::int64_t>(arg, "det"));
  throw std::invalid_argument("unknown innovation law '" + std::string(name) + "'");
}

inline Moments moments(const InnovationSpec& spec) noexcept { return spec.moments(); }

template <class Rng>
std::int64_t sample_innovation(const InnovationSpec& spec, Rng& rng) {
  return std::visit(
      [&rng](const auto& l) -> std::int64_t {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, law::Poisson>) {
          return std::poisson_distribution<std::int64_t>(l.lambda)(rng);
        } else if constexpr (std::is_same_v<T, law::Bernoulli>) {
          return std::bernoulli_distribution(l.p)(rng) ? 1 : 0;
        } else if constexpr (std::is_same_v<T, law::Geometric>) {
          if (l.p == 1.0) return 0;
          return std::geometric_distribution<std::int64_t>(l.p)(rng);
        } else {
          return l.value;
        }
      },
      spec.law());
}

/// Binomial thinning `prob ∘ x`: the number of successes among x independent
/// Bernoulli(prob) counting variables, drawn as a single binomial variate.
/// The endpoints prob = 0 and prob = 1 consume no randomness.
template <class Rng>
std::int64_t thin(std::int64_t x, double prob, Rng& rng) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("thinning probability must lie in [0,1]");
  }
  if (x < 0) {
    throw std::invalid_argument("cannot thin a negative count");
  }
  if (x == 0 || prob == 0.0) return 0;
  if (prob == 1.0) return x;
  return std::binomial_distribution<std::int64_t>(x, prob)(rng);
}

}  // namespace inar
