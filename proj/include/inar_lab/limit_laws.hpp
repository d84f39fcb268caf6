#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

namespace inar {

/// Centered normal limit of (sqrt(n)(alpha_hat - 1), sqrt(n) beta_hat) when
/// (alpha, beta) = (1, 0): scale * Z * (-1, 1) with
/// scale = 2 sigma / sqrt(mu^2 + 4 sigma^2).
struct CltLimit {
  double scale = 0.0;
  std::array<std::array<double, 2>, 2> covariance{};

  double variance() const noexcept { return covariance[0][0]; }
};

inline CltLimit clt_limit(double mu, double sigma2) {
  if (!(mu > 0.0)) throw std::invalid_argument("innovation mean must be positive");
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("innovation variance must be positive; the normal limit degenerates");
  }
  const double v = 4.0 * sigma2 / (mu * mu + 4.0 * sigma2);
  CltLimit lim;
  lim.scale = 2.0 * std::sqrt(sigma2) / std::sqrt(mu * mu + 4.0 * sigma2);
  lim.covariance = {{{v, -v}, {-v, v}}};
  return lim;
}

/// Standard normal distribution function.
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline constexpr int kMinDfSteps = 100;
inline constexpr int kDefaultDfSteps = 10000;

/// One draw of the Dickey-Fuller functional int_0^1 W dW / int_0^1 W^2 dt.
struct DfSample {
  double value = 0.0;
  double numerator = 0.0;    // (W_1^2 - 1) / 2
  double denominator = 0.0;  // left-endpoint Riemann sum of W^2
  int steps = 0;
};

/// W is built on t_j = j/steps from increments sqrt(1/steps) * g_j where each
/// g_j = next_normal(rng). The numerator uses the Ito identity
/// int W dW = (W_1^2 - 1)/2 exactly; the denominator is
/// (1/steps) sum_{j<steps} W_{t_j}^2. A zero denominator (only reachable with
/// a degenerate increment source) discards the draw and resamples.
template <class Rng, class NormalSource>
DfSample sample_df(int steps, Rng& rng, NormalSource&& next_normal) {
  if (steps < kMinDfSteps) throw std::invalid_argument("DF sampler needs at least 100 steps");
  const double dt = 1.0 / steps;
  const double sd = std::sqrt(dt);
  for (;;) {
    double w = 0.0;
    double area = 0.0;
    for (int j = 0; j < steps; ++j) {
      area += w * w;
      w += sd * next_normal(rng);
    }
    area *= dt;
    if (area > 0.0) {
      const double num = 0.5 * (w * w - 1.0);
      return DfSample{num / area, num, area, steps};
    }
  }
}

template <class Rng>
DfSample sample_df(int steps, Rng& rng) {
  boost::random::normal_distribution<double> normal;
  return sample_df(steps, rng, [&normal](Rng& r) { return normal(r); });
}

}  // namespace inar
