#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "inar_lab/ks.hpp"
#include "inar_lab/limit_laws.hpp"
#include "inar_lab/montecarlo.hpp"
#include "inar_lab/random.hpp"
#include "oracles.hpp"

namespace {

TEST(CltLimit, UnitMomentsGiveFourFifths) {
  const auto lim = inar::clt_limit(1.0, 1.0);
  EXPECT_EQ(lim.variance(), 0.8);
  EXPECT_DOUBLE_EQ(lim.scale, 2.0 / std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(lim.covariance[0][0], 0.8);
  EXPECT_DOUBLE_EQ(lim.covariance[0][1], -0.8);
}

TEST(CltLimit, SmallVarianceShrinksLimit) {
  const auto lim = inar::clt_limit(2.0, 1e-4);
  EXPECT_NEAR(lim.covariance[1][1], 1e-4, 1e-7);
}

TEST(CltLimit, RankOneAlongAntiDiagonal) {
  for (auto [mu, s2] : {std::pair{1.0, 1.0}, std::pair{0.5, 0.25}, std::pair{3.0, 7.0}}) {
    const auto lim = inar::clt_limit(mu, s2);
    const auto& c = lim.covariance;
    EXPECT_EQ(c[0][1], c[1][0]);
    EXPECT_DOUBLE_EQ(c[0][0], lim.variance());
    EXPECT_DOUBLE_EQ(c[1][1], lim.variance());
    EXPECT_NEAR(c[0][0] + c[0][1], 0.0, 1e-15);
    EXPECT_NEAR(c[1][0] + c[1][1], 0.0, 1e-15);
    // Eigenvalues of a symmetric 2x2 matrix.
    const double tr = c[0][0] + c[1][1];
    const double det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    EXPECT_NEAR(tr / 2.0 + disc, 2.0 * lim.variance(), 1e-12);
    EXPECT_NEAR(tr / 2.0 - disc, 0.0, 1e-12);
    // (-1, 1) is an eigenvector for 2 scale^2.
    EXPECT_NEAR(-c[0][0] + c[0][1], -2.0 * lim.variance(), 1e-12);
    EXPECT_NEAR(-c[1][0] + c[1][1], 2.0 * lim.variance(), 1e-12);
  }
}

TEST(CltLimit, RejectsDegenerateInputs) {
  EXPECT_THROW(inar::clt_limit(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(inar::clt_limit(0.0, 1.0), std::invalid_argument);
}

TEST(NormalCdf, KnownValuesAndSymmetry) {
  EXPECT_EQ(inar::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(inar::normal_cdf(1.959964), 0.975, 1e-6);
  EXPECT_NEAR(oracle::normal_cdf_series(1.959964), 0.975, 1e-6);
  for (double x : {0.5, 1.0, 2.0, 3.0}) {
    EXPECT_NEAR(inar::normal_cdf(-x), 1.0 - inar::normal_cdf(x), 1e-7);
  }
}

TEST(NormalCdf, AgreesWithSeriesOracle) {
  for (int i = 0; i <= 800; ++i) {
    const double x = -4.0 + i * 0.01;
    EXPECT_NEAR(inar::normal_cdf(x), oracle::normal_cdf_series(x), 1e-7) << x;
  }
}

TEST(NormalCdf, MonotoneAndSymmetricOnGrid) {
  double prev = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const double x = -8.0 + 16.0 * i / 9999.0;
    const double f = inar::normal_cdf(x);
    EXPECT_GE(f, prev);
    EXPECT_NEAR(f + inar::normal_cdf(-x), 1.0, 1e-7);
    prev = f;
  }
}

TEST(SampleDf, DegenerateIncrementsAreResampled) {
  auto rng = inar::make_stream(1, 0);
  boost::random::normal_distribution<double> normal;
  constexpr int steps = 200;
  long calls = 0;
  auto source = [&](inar::Engine& r) {
    ++calls;
    return calls <= steps ? 0.0 : normal(r);
  };
  const auto d = inar::sample_df(steps, rng, source);
  EXPECT_EQ(calls, 2 * steps);
  EXPECT_GT(d.denominator, 0.0);
  EXPECT_TRUE(std::isfinite(d.value));
  EXPECT_EQ(d.steps, steps);
  EXPECT_DOUBLE_EQ(d.value, d.numerator / d.denominator);
}

TEST(SampleDf, RejectsCoarseGrids) {
  auto rng = inar::make_stream(1, 0);
  EXPECT_THROW(inar::sample_df(99, rng), std::invalid_argument);
}

TEST(SampleDf, ItoNumeratorIsCentered) {
  // (W_1^2 - 1)/2 has mean 0 and variance 1/2 at every resolution.
  const auto draws = inar::sample_df_batch(100'000, 100, 5, 1);
  double mean = 0.0;
  for (const auto& d : draws) mean += d.numerator;
  mean /= static_cast<double>(draws.size());
  EXPECT_NEAR(mean, 0.0, 0.02);
}

TEST(SampleDf, ResolutionDoublingBarelyMovesTheLaw) {
  constexpr std::size_t m = 20'000;
  const auto coarse = inar::sample_df_batch(m, 500, 17, 1);
  const auto fine = inar::sample_df_batch(m, 1000, 18, 1);
  std::vector<double> a, b;
  for (const auto& d : coarse) a.push_back(d.value);
  for (const auto& d : fine) b.push_back(d.value);
  EXPECT_LT(inar::ks_two_sample(a, b).stat, 2.0 / std::sqrt(static_cast<double>(m)) + 0.01);
}

TEST(SampleDf, BatchIsReproducibleAcrossThreadCounts) {
  const auto a = inar::sample_df_batch(64, 300, 3, 1);
  const auto b = inar::sample_df_batch(64, 300, 3, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

}  // namespace
