#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace inar {

// Asymptotic 5% critical value of the Kolmogorov distribution.
inline constexpr double kKsCritical05 = 1.358;

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
/// summed until a term drops below 1e-10. Below lambda = 0.2 the value is 1
/// to within 1e-12 and the alternating series converges too slowly to be useful.
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1;; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-10) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct KsOneSample {
  double stat;
  double p_value;
};

/// sup_x |F_m(x) - F(x)| evaluated on both sides of every jump of the ECDF.
template <class Cdf>
KsOneSample ks_one_sample(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS test needs a nonempty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return {d, kolmogorov_q(std::sqrt(m) * d)};
}

struct KsTwoSample {
  double stat;
  double threshold;  // 5% critical value c(0.05) sqrt((m+n)/(mn))
};

inline KsTwoSample ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  return {d, kKsCritical05 * std::sqrt((m + n) / (m * n))};
}

}  // namespace inar
