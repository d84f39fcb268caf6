#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "inar_lab/process.hpp"

namespace inar {

using Int128 = __int128;

/// An exact integer accumulator left the 64-bit range.
class AccumulatorOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Lag-2 regressors are nonzero but proportional to the lag-1 regressors, so
/// the normal equations are singular and the CLS minimizer is not unique.
class CollinearRegressors : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw AccumulatorOverflow("normal-equation product overflow");
  return r;
}

inline void checked_add(std::int64_t& acc, std::int64_t v) {
  if (__builtin_add_overflow(acc, v, &acc)) throw AccumulatorOverflow("normal-equation sum overflow");
}

}  // namespace detail

/// Sufficient statistics of the CLS problem for a path x_1..x_n with known
/// innovation mean. All integer sums are exact; the right-hand side
///   b1 = sum (x_k - mu) x_{k-1},  b2 = sum (x_k - mu) x_{k-2}
/// is recovered from the exact cross and lag sums.
struct NormalEquations {
  std::size_t n = 0;
  double mu = 0.0;
  std::int64_t s11 = 0;  // sum x_{k-1}^2
  std::int64_t s12 = 0;  // sum x_{k-1} x_{k-2}
  std::int64_t s22 = 0;  // sum x_{k-2}^2
  std::int64_t cross1 = 0;  // sum x_k x_{k-1}
  std::int64_t cross2 = 0;  // sum x_k x_{k-2}
  std::int64_t lag_sum1 = 0;  // sum x_{k-1}
  std::int64_t lag_sum2 = 0;  // sum x_{k-2}
  std::int64_t last = 0;  // x_n
  std::int64_t second_last = 0;  // x_{n-1}

  double b1() const noexcept {
    return static_cast<double>(static_cast<long double>(cross1) -
                               static_cast<long double>(mu) * static_cast<long double>(lag_sum1));
  }
  double b2() const noexcept {
    return static_cast<double>(static_cast<long double>(cross2) -
                               static_cast<long double>(mu) * static_cast<long double>(lag_sum2));
  }

  // s11 s22 - s12^2; cannot overflow 128 bits for 64-bit inputs.
  Int128 det_exact() const noexcept {
    return static_cast<Int128>(s11) * s22 - static_cast<Int128>(s12) * s12;
  }
  double det() const noexcept { return static_cast<double>(det_exact()); }
};

/// One left-to-right pass over the path with x_0 = x_{-1} = 0.
inline NormalEquations accumulate(const SamplePath& path, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("innovation mean must be positive");
  NormalEquations eq;
  eq.n = path.size();
  eq.mu = mu;
  std::int64_t lag1 = 0;
  std::int64_t lag2 = 0;
  for (std::int64_t x : path.values) {
    detail::checked_add(eq.s11, detail::checked_mul(lag1, lag1));
    detail::checked_add(eq.s12, detail::checked_mul(lag1, lag2));
    detail::checked_add(eq.s22, detail::checked_mul(lag2, lag2));
    detail::checked_add(eq.cross1, detail::checked_mul(x, lag1));
    detail::checked_add(eq.cross2, detail::checked_mul(x, lag2));
    detail::checked_add(eq.lag_sum1, lag1);
    detail::checked_add(eq.lag_sum2, lag2);
    lag2 = lag1;
    lag1 = x;
  }
  eq.last = lag1;
  eq.second_last = lag2;
  return eq;
}

enum class Branch { FullRank, Lag1Only, Degenerate };

inline std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::FullRank: return "FullRank";
    case Branch::Lag1Only: return "Lag1Only";
    case Branch::Degenerate: return "Degenerate";
  }
  return "?";
}

struct ClsEstimate {
  std::optional<double> alpha_hat;
  std::optional<double> beta_hat;
  Branch branch = Branch::Degenerate;
};

/// Closed-form CLS estimator.
///
///  - sum x_{k-2}^2 > 0: the unique minimizer A_n^{-1} b_n, evaluated through
///    the adjoint of A_n. Both adjoint products are formed exactly in 128-bit
///    integers, so rounding enters only in the final division.
///  - sum x_{k-2}^2 = 0 and x_{n-1} != 0: alpha_hat = (x_n - mu) / x_{n-1};
///    beta does not enter the objective and is left undefined.
///  - sum x_{k-2}^2 = 0 and x_{n-1} = 0: the objective is constant, nothing is
///    identified.
///
/// Throws CollinearRegressors when sum x_{k-2}^2 > 0 but det A_n = 0. For
/// zero-start paths this cannot happen: the first nonzero observation appears
/// as a lag-1 regressor while its lag-2 partner is still 0.
inline ClsEstimate estimate(const NormalEquations& eq) {
  ClsEstimate est;
  if (eq.s22 > 0) {
    const Int128 det = eq.det_exact();
    if (det == 0) {
      throw CollinearRegressors("lag-1 and lag-2 regressors are proportional; CLS estimate not unique");
    }
    const Int128 a_int = static_cast<Int128>(eq.s22) * eq.cross1 - static_cast<Int128>(eq.s12) * eq.cross2;
    const Int128 a_lin = static_cast<Int128>(eq.s22) * eq.lag_sum1 - static_cast<Int128>(eq.s12) * eq.lag_sum2;
    const Int128 b_int = static_cast<Int128>(eq.s11) * eq.cross2 - static_cast<Int128>(eq.s12) * eq.cross1;
    const Int128 b_lin = static_cast<Int128>(eq.s11) * eq.lag_sum2 - static_cast<Int128>(eq.s12) * eq.lag_sum1;
    const long double mu = eq.mu;
    const long double d = static_cast<long double>(det);
    est.alpha_hat = static_cast<double>((static_cast<long double>(a_int) - mu * static_cast<long double>(a_lin)) / d);
    est.beta_hat = static_cast<double>((static_cast<long double>(b_int) - mu * static_cast<long double>(b_lin)) / d);
    est.branch = Branch::FullRank;
  } else if (eq.second_last != 0) {
    est.alpha_hat = (static_cast<double>(eq.last) - eq.mu) / static_cast<double>(eq.second_last);
    est.branch = Branch::Lag1Only;
  } else {
    est.branch = Branch::Degenerate;
  }
  return est;
}

inline ClsEstimate estimate(const SamplePath& path, double mu) {
  return estimate(accumulate(path, mu));
}

/// Q_n(alpha', beta') = sum_{k=1}^n (x_k - alpha' x_{k-1} - beta' x_{k-2} - mu)^2.
inline double objective(const SamplePath& path, double mu, double alpha_p, double beta_p) {
  if (!(mu > 0.0)) throw std::invalid_argument("innovation mean must be positive");
  long double q = 0.0L;
  for (std::size_t k = 1; k <= path.size(); ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    const long double r = static_cast<long double>(path.at(i)) -
                          static_cast<long double>(alpha_p) * path.at(i - 1) -
                          static_cast<long double>(beta_p) * path.at(i - 2) - mu;
    q += r * r;
  }
  return static_cast<double>(q);
}

enum class Rate { SqrtN, N };

/// Estimation error scaled by sqrt(n) or n, coordinatewise.
inline std::array<double, 2> scaled_error(const ClsEstimate& est, const InarParams& truth,
                                          std::size_t n, Rate rate) {
  if (est.branch != Branch::FullRank) {
    throw std::invalid_argument("scaled error needs a FullRank estimate");
  }
  const double nd = static_cast<double>(n);
  const double scale = rate == Rate::SqrtN ? std::sqrt(nd) : nd;
  return {scale * (*est.alpha_hat - truth.alpha()), scale * (*est.beta_hat - truth.beta())};
}

/// det(A_n) / n^exponent.
inline double det_scaling(const NormalEquations& eq, double exponent) {
  if (eq.n < 1) throw std::invalid_argument("det scaling needs n >= 1");
  return static_cast<double>(static_cast<long double>(eq.det_exact()) /
                             std::pow(static_cast<long double>(eq.n), static_cast<long double>(exponent)));
}

enum class Lag { One = 1, Two = 2 };

/// (sum_{k=1}^n x_{k-lag}^2) / n^exponent, with the sum formed exactly.
inline double sum_sq_scaling(const SamplePath& path, Lag lag, double exponent) {
  if (path.empty()) throw std::invalid_argument("sum-of-squares scaling needs n >= 1");
  const auto shift = static_cast<std::ptrdiff_t>(lag);
  Int128 sum = 0;
  for (std::size_t k = 1; k <= path.size(); ++k) {
    const Int128 x = path.at(static_cast<std::ptrdiff_t>(k) - shift);
    sum += x * x;
  }
  return static_cast<double>(static_cast<long double>(sum) /
                             std::pow(static_cast<long double>(path.size()), static_cast<long double>(exponent)));
}

/// The nine functionals S_n^(1..9) of the centered even/odd walks
/// u_k = U_k - k mu, v_k = V_k - k mu, k = 1..n:
///   u_n/n^{1/2}, v_n/n^{1/2}, sum k u_k/n^{5/2}, sum k v_k/n^{5/2},
///   sum u_k^2/n^2, sum v_k^2/n^2, sum u_k/n^{3/2}, sum v_k/n^{3/2},
///   sum u_k v_k/n^2.
/// n is the common walk length floor(path length / 2); for odd-length paths
/// the final odd observation is ignored.
inline std::array<double, 9> building_blocks(const SamplePath& path, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("innovation mean must be positive");
  const std::size_t n = path.size() / 2;
  if (n < 1) throw std::invalid_argument("building blocks need a path of length >= 2");
  const auto walks = split_even_odd(path);
  const long double m = mu;
  long double s_ku = 0, s_kv = 0, s_uu = 0, s_vv = 0, s_u = 0, s_v = 0, s_uv = 0;
  long double u = 0, v = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const long double kk = static_cast<long double>(k);
    u = static_cast<long double>(walks.even[k - 1]) - kk * m;
    v = static_cast<long double>(walks.odd[k - 1]) - kk * m;
    s_ku += kk * u;
    s_kv += kk * v;
    s_uu += u * u;
    s_vv += v * v;
    s_u += u;
    s_v += v;
    s_uv += u * v;
  }
  const long double nn = static_cast<long double>(n);
  const long double r_half = std::sqrt(nn);
  const long double n2 = nn * nn;
  return {
      static_cast<double>(u / r_half),
      static_cast<double>(v / r_half),
      static_cast<double>(s_ku / (n2 * r_half)),
      static_cast<double>(s_kv / (n2 * r_half)),
      static_cast<double>(s_uu / n2),
      static_cast<double>(s_vv / n2),
      static_cast<double>(s_u / (nn * r_half)),
      static_cast<double>(s_v / (nn * r_half)),
      static_cast<double>(s_uv / n2),
  };
}

}  // namespace inar
