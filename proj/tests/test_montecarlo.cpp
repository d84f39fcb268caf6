#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "inar_lab/io.hpp"
#include "inar_lab/montecarlo.hpp"

namespace {

using inar::Case;
using inar::InnovationSpec;
using inar::McConfig;

McConfig config(Case kind, std::size_t n, std::size_t reps, std::uint64_t seed = 11) {
  McConfig c;
  c.kind = kind;
  c.n = n;
  c.reps = reps;
  c.master_seed = seed;
  c.df_steps = 200;
  c.df_oracle_size = 500;
  return c;
}

TEST(Validate, RejectsBadConfigs) {
  auto c = config(Case::Case10, 100, 10);
  c.spec = InnovationSpec::deterministic(1);
  EXPECT_THROW(inar::validate(c), std::invalid_argument);  // sigma^2 = 0

  EXPECT_THROW(inar::validate(config(Case::Case10, 100, 1)), std::invalid_argument);
  EXPECT_THROW(inar::validate(config(Case::Case10, 9, 10)), std::invalid_argument);

  auto d = config(Case::Case01, 100, 10);
  d.df_steps = 50;
  EXPECT_THROW(inar::validate(d), std::invalid_argument);
  d = config(Case::Case01, 100, 10);
  d.df_oracle_size = 0;
  EXPECT_THROW(inar::validate(d), std::invalid_argument);
  d = config(Case::Case01, 100, 10);
  d.finite_n_allowance = -0.1;
  EXPECT_THROW(inar::validate(d), std::invalid_argument);

  EXPECT_THROW(inar::run_clt_experiment(config(Case::Case01, 100, 10)), std::invalid_argument);
  EXPECT_THROW(inar::run_df_experiment(config(Case::Case10, 100, 10)), std::invalid_argument);
}

TEST(Validate, DefaultAllowances) {
  EXPECT_EQ(config(Case::Case10, 100, 10).allowance(), inar::kCltFiniteNAllowance);
  EXPECT_EQ(config(Case::Case01, 100, 10).allowance(), inar::kDfFiniteNAllowance);
}

TEST(CltExperiment, NoSkipsAtModerateN) {
  const auto r = inar::run_clt_experiment(config(Case::Case10, 1000, 200), 1);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_EQ(r.samples.size(), 200u);
  ASSERT_TRUE(r.limit_variance);
  EXPECT_DOUBLE_EQ(*r.limit_variance, 0.8);
  EXPECT_NEAR(r.ks_threshold, 1.358 / std::sqrt(200.0) + 0.017, 1e-12);
}

TEST(CltExperiment, CoordinatesAreCenteredAndOpposed) {
  const auto r = inar::run_clt_experiment(config(Case::Case10, 1000, 400, 21), 1);
  const auto c1 = r.coord1();
  const auto c2 = r.coord2();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    m1 += c1[i];
    m2 += c2[i];
  }
  m1 /= static_cast<double>(c1.size());
  m2 /= static_cast<double>(c2.size());
  // Limit sd is sqrt(0.8); allow 4 standard errors plus a little bias.
  const double tol = 4.0 * std::sqrt(0.8 / c1.size()) + 0.05;
  EXPECT_NEAR(m1, 0.0, tol);
  EXPECT_NEAR(m2, 0.0, tol);
  EXPECT_LT(r.line_concentration, inar::kMaxLineConcentration);
}

TEST(CltExperiment, ParallelEqualsSerial) {
  const auto c = config(Case::Case10, 300, 64, 5);
  const auto a = inar::report_to_json(inar::run_clt_experiment(c, 1));
  const auto b = inar::report_to_json(inar::run_clt_experiment(c, 4));
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(CltExperiment, DifferentSeedsDiffer) {
  const auto a = inar::run_clt_experiment(config(Case::Case10, 100, 10, 1), 1);
  const auto b = inar::run_clt_experiment(config(Case::Case10, 100, 10, 2), 1);
  EXPECT_NE(a.coord1(), b.coord1());
}

TEST(CltExperiment, SamplesMatchDirectReplication) {
  const auto c = config(Case::Case10, 200, 8, 9);
  const auto r = inar::run_clt_experiment(c, 2);
  for (const auto& s : r.samples) {
    auto rng = inar::make_stream(c.master_seed, s.rep);
    const auto path = inar::simulate({1, 0}, c.spec, c.n, rng);
    const auto e = inar::scaled_error(inar::estimate(path, 1.0), {1, 0}, c.n, inar::Rate::SqrtN);
    EXPECT_EQ(s.coord1, e[0]);
    EXPECT_EQ(s.coord2, e[1]);
  }
}

TEST(DfExperiment, MinimalRunCompletes) {
  const auto r = inar::run_df_experiment(config(Case::Case01, 10, 2), 1);
  EXPECT_LE(r.skipped, 2u);
  EXPECT_EQ(r.samples.size() + r.skipped, 2u);
}

TEST(DfExperiment, ReproducibleAcrossThreadCounts) {
  const auto c = config(Case::Case01, 200, 40, 3);
  const auto a = inar::report_to_json(inar::run_df_experiment(c, 1));
  const auto b = inar::report_to_json(inar::run_df_experiment(c, 3));
  EXPECT_EQ(a.dump(), b.dump());
  ASSERT_TRUE(inar::run_df_experiment(c, 1).line_ks_stat);
}

TEST(DfExperiment, DeterministicInnovationsFail) {
  // Path 1,1,2,2,... has full-rank normal equations and estimates exactly
  // (0, 1), so every sample sits at the origin and the KS check fails.
  auto c = config(Case::Case01, 50, 20);
  c.spec = InnovationSpec::deterministic(1);
  const auto r = inar::run_df_experiment(c, 1);
  EXPECT_EQ(r.skipped, 0u);
  for (const auto& s : r.samples) {
    EXPECT_NEAR(s.coord1, 0.0, 1e-9);
    EXPECT_NEAR(s.coord2, 0.0, 1e-9);
  }
  EXPECT_FALSE(r.passed);
}

TEST(DfExperiment, SkippedFractionShrinksWithN) {
  auto small = config(Case::Case01, 50, 500, 8);
  auto large = config(Case::Case01, 2000, 500, 8);
  const auto a = inar::run_df_experiment(small, 0);
  const auto b = inar::run_df_experiment(large, 0);
  EXPECT_GE(a.skipped, b.skipped);
}

TEST(DfExperiment, LimitIsAlongAntiDiagonal) {
  const auto r = inar::run_df_experiment(config(Case::Case01, 1000, 300, 4), 0);
  EXPECT_LT(r.line_concentration, 0.2);
  EXPECT_LT(*r.line_ks_stat, 0.15);
}

TEST(LineConcentration, ExactAntiDiagonalIsZero) {
  std::vector<inar::ReplicationSample> s{{0, 1.0, -1.0}, {1, -2.0, 2.0}, {2, 0.5, -0.5}};
  EXPECT_EQ(inar::detail::line_concentration(s), 0.0);
  s = {{0, 1.0, 1.0}, {1, -1.0, -1.0}};
  // mean((2,-2)^2) = 4, var(1,-1) = 2.
  EXPECT_DOUBLE_EQ(inar::detail::line_concentration(s), 2.0);
  EXPECT_TRUE(std::isnan(inar::detail::line_concentration({{0, 1.0, 1.0}})));
}

TEST(ReplicationError, CarriesIndex) {
  const inar::ReplicationError e(7, "boom");
  EXPECT_EQ(e.replication(), 7u);
  EXPECT_NE(std::string(e.what()).find("replication 7"), std::string::npos);
}

TEST(ReplicationError, RaisedByFailingReplication) {
  // Geometric(1e-18) innovations overflow the int64 accumulators.
  auto c = config(Case::Case10, 500, 4);
  c.spec = InnovationSpec::geometric(1e-18);
  EXPECT_THROW(inar::run_clt_experiment(c, 1), inar::ReplicationError);
}

}  // namespace
