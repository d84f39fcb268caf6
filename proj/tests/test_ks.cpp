#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "inar_lab/ks.hpp"
#include "inar_lab/limit_laws.hpp"
#include "inar_lab/random.hpp"
#include "oracles.hpp"

namespace {

auto phi = [](double x) { return inar::normal_cdf(x); };

// sup |F_a - F_b| over every pooled point, by counting.
double brute_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double t : pooled) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [t](double v) { return v <= t; })) / a.size();
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [t](double v) { return v <= t; })) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

TEST(KsOneSample, ExactQuantileGrid) {
  constexpr int m = 1000;
  std::vector<double> q;
  for (int i = 1; i <= m; ++i) q.push_back(oracle::normal_quantile((i - 0.5) / m));
  // The grid sits at the midpoints of the ECDF steps, so D = 1/(2m) up to
  // rounding in the quantiles themselves.
  EXPECT_LE(inar::ks_one_sample(q, phi).stat, 0.0005 + 1e-12);
}

TEST(KsOneSample, SinglePointAndDisjointSupport) {
  const std::vector<double> zero{0.0};
  EXPECT_DOUBLE_EQ(inar::ks_one_sample(zero, phi).stat, 0.5);

  auto rng = inar::make_stream(3, 0);
  boost::random::normal_distribution<double> normal;
  std::vector<double> shifted;
  for (int i = 0; i < 500; ++i) shifted.push_back(normal(rng) + 10.0);
  const auto r = inar::ks_one_sample(shifted, phi);
  EXPECT_NEAR(r.stat, 1.0, 1e-6);
  EXPECT_LT(r.p_value, 1e-10);
}

TEST(KsOneSample, RejectsEmpty) {
  EXPECT_THROW(inar::ks_one_sample(std::vector<double>{}, phi), std::invalid_argument);
}

TEST(KsOneSample, PValueOfNullSampleIsNotExtreme) {
  auto rng = inar::make_stream(4, 0);
  boost::random::normal_distribution<double> normal;
  std::vector<double> s;
  for (int i = 0; i < 5000; ++i) s.push_back(normal(rng));
  const auto r = inar::ks_one_sample(s, phi);
  EXPECT_GT(r.p_value, 0.001);
  EXPECT_LT(r.stat, 1.95 / std::sqrt(5000.0));
}

TEST(KolmogorovQ, KnownValues) {
  EXPECT_NEAR(inar::kolmogorov_q(1.358), 0.05, 5e-4);
  EXPECT_NEAR(inar::kolmogorov_q(0.5), 0.963945, 1e-5);
  EXPECT_NEAR(inar::kolmogorov_q(1.0), 0.269999, 1e-5);
  EXPECT_EQ(inar::kolmogorov_q(0.0), 1.0);
  EXPECT_LT(inar::kolmogorov_q(5.0), 1e-20);
}

TEST(KsTwoSample, IdenticalSamplesHaveZeroDistance) {
  const std::vector<double> a{3.0, 1.0, 2.0, 2.0, 5.0};
  EXPECT_EQ(inar::ks_two_sample(a, a).stat, 0.0);
}

TEST(KsTwoSample, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> value(0, 6);
  std::uniform_int_distribution<int> size(1, 25);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> a(size(rng)), b(size(rng));
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng) * 0.5;
    EXPECT_NEAR(inar::ks_two_sample(a, b).stat, brute_two_sample(a, b), 1e-15);
  }
}

TEST(KsTwoSample, ThresholdFormula) {
  const std::vector<double> a(1000, 0.0), b(10000, 0.0);
  EXPECT_NEAR(inar::ks_two_sample(a, b).threshold, 1.358 * std::sqrt(11000.0 / 1e7), 1e-12);
}

TEST(KsTwoSample, SameLawPassesAtFivePercent) {
  boost::random::normal_distribution<double> normal;
  int below = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto rng = inar::make_stream(77, rep);
    std::vector<double> a(10'000), b(10'000);
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng);
    const auto r = inar::ks_two_sample(a, b);
    below += r.stat < r.threshold;
  }
  EXPECT_GE(below, 93);
}

TEST(KsTwoSample, SeparatedLawsAreFarApart) {
  auto rng = inar::make_stream(78, 0);
  boost::random::normal_distribution<double> normal;
  std::vector<double> a(1000), b(1000);
  for (auto& v : a) v = normal(rng);
  for (auto& v : b) v = normal(rng) + 3.0;
  EXPECT_GT(inar::ks_two_sample(a, b).stat, 0.8);
}

TEST(KsTwoSample, RejectsEmpty) {
  const std::vector<double> a{1.0};
  EXPECT_THROW(inar::ks_two_sample(a, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(inar::ks_two_sample(std::vector<double>{}, a), std::invalid_argument);
}

}  // namespace
