#include <gtest/gtest.h>

#include <numeric>

#include "blockcode/schemes.hpp"

using namespace blockcode;

namespace {

SystemConfig make_cfg(int N, int L, double M, double rate, double shift) {
  SystemConfig cfg;
  cfg.workers = N;
  cfg.coordinates = L;
  cfg.samples = M;
  cfg.cycles_per_derivative = 1;
  cfg.dist = StragglerDistribution::shifted_exponential(rate, shift);
  return cfg;
}

}  // namespace

TEST(Rounding, LargestRemainder) {
  EXPECT_EQ(largest_remainder_round({1.5, 1.5, 2.0}), (std::vector<long long>{2, 1, 2}));
  EXPECT_EQ(largest_remainder_round({0.2, 0.7, 3.1}), (std::vector<long long>{0, 1, 3}));
  EXPECT_EQ(largest_remainder_round({4, 0, 0}), (std::vector<long long>{4, 0, 0}));
  RandomStream rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(1 + rng.below(10));
    double s = 0;
    for (double& v : x) s += v = 5 * rng.uniform();
    for (double& v : x) v *= 37 / s;
    const auto r = largest_remainder_round(x);
    EXPECT_EQ(std::accumulate(r.begin(), r.end(), 0LL), 37);
    for (std::size_t n = 0; n < x.size(); ++n) EXPECT_LE(std::abs(r[n] - x[n]), 1.0);
  }
}

TEST(Rounding, LocalSearchNeverWorse) {
  const SystemConfig cfg = make_cfg(5, 50, 5, 0.1, 1);
  const AllocationObjective cost = make_runtime_objective(cfg, 2000, 3);
  RandomStream rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(5);
    double s = 0;
    for (double& v : x) s += v = rng.uniform();
    for (double& v : x) v *= 50 / s;
    const auto base = largest_remainder_round(x);
    const BlockAllocation r = round_allocation(x, cost);
    EXPECT_TRUE(r.is_integer());
    EXPECT_EQ(r.total(), 50);
    EXPECT_LE(cost(r.sizes()), cost(std::vector<double>(base.begin(), base.end())));
  }
}

TEST(Rounding, IntegerInputUnchanged) {
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 0.1);
  const BlockAllocation r = round_allocation({1, 2, 3}, make_failure_objective(cfg, 10));
  EXPECT_EQ(r.as_integers(), (std::vector<long long>{1, 2, 3}));
}

TEST(Objectives, RuntimeUsesCommonDraws) {
  const SystemConfig cfg = make_cfg(4, 20, 4, 0.5, 1);
  const AllocationObjective a = make_runtime_objective(cfg, 5000, 9);
  const std::vector<double> x = {5, 5, 5, 5};
  EXPECT_EQ(a(x), a(x));
  EXPECT_NEAR(a(x), expected_runtime_mc(x, cfg, 5000, 9).estimate, 1e-9 * a(x));
  const AllocationObjective f = make_failure_objective(cfg, 80);
  EXPECT_NEAR(f(x), 1 - completion_prob_exact(x, 80, cfg), 1e-12);
}

TEST(SingleBlock, PicksBestLevel) {
  const SystemConfig cfg = make_cfg(6, 60, 6, 1e-2, 10);
  const SchemeSpec s = single_bcgc(cfg, Metric::ExpectedRuntime, 0, 4000, 5);
  const AllocationObjective cost = make_runtime_objective(cfg, 4000, 5);
  const double chosen = cost(s.allocation.sizes());
  for (int n = 0; n < 6; ++n) {
    std::vector<double> x(6, 0.0);
    x[n] = 60;
    EXPECT_LE(chosen, cost(x));
  }
  EXPECT_EQ(s.provenance.rfind("single block s=", 0), 0u);
}

TEST(SingleBlock, CompletionMetric) {
  const SystemConfig cfg = make_cfg(4, 12, 4, 1.0, 0.1);
  const double t = 25;
  const SchemeSpec s = single_bcgc(cfg, Metric::CompletionProbability, t, 0, 0);
  const double chosen = completion_prob_exact(s.allocation.sizes(), t, cfg);
  for (int n = 0; n < 4; ++n) {
    std::vector<double> x(4, 0.0);
    x[n] = 12;
    EXPECT_GE(chosen, completion_prob_exact(x, t, cfg));
  }
}

TEST(Comparison, FourWorkerExampleOrdering) {
  // Per-block redundancy beats both single-level schemes on the example times.
  SystemConfig cfg = make_cfg(4, 4, 4, 1, 0);
  const RuntimeVector T = RuntimeVector::from_values({2, 2, 5, 20});
  const double single1 = runtime_of_x(std::vector<double>{0, 4, 0, 0}, T, cfg);
  const double single2 = runtime_of_x(std::vector<double>{0, 0, 4, 0}, T, cfg);
  const double mixed = runtime_of_x(std::vector<double>{0, 2, 2, 0}, T, cfg);
  EXPECT_LT(mixed, single1);
  EXPECT_LT(mixed, single2);
}

TEST(Comparison, SameDrawsAcrossSchemes) {
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 0.1);
  const std::vector<SchemeSpec> schemes = {
      {"a", BlockAllocation::integer({6, 0, 0}), "test"},
      {"b", BlockAllocation::integer({2, 2, 2}), "test"},
  };
  const auto rows = compare_schemes(schemes, cfg, Metric::ExpectedRuntime, 0, 10000, 4);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].name, "a");
  EXPECT_EQ(rows[1].evaluation.estimate, expected_runtime_mc({2, 2, 2}, cfg, 10000, 4).estimate);
  const auto cdf = compare_schemes(schemes, cfg, Metric::CompletionProbability, 20, 10000, 4);
  EXPECT_EQ(cdf[0].evaluation.metric, Metric::CompletionProbability);
}

TEST(PairedGain, SelfIsZeroAndMatchesMeans) {
  const SystemConfig cfg = make_cfg(5, 50, 5, 0.1, 1);
  const std::vector<double> a = {20, 10, 10, 5, 5};
  const std::vector<double> b = {50, 0, 0, 0, 0};
  const PairedGain self = paired_runtime_gain(a, a, cfg, 1000, 1);
  EXPECT_EQ(self.gain, 0.0);
  EXPECT_EQ(self.std_error, 0.0);
  const PairedGain g = paired_runtime_gain(a, b, cfg, 20000, 2);
  EXPECT_NEAR(g.mean_a, expected_runtime_mc(a, cfg, 20000, 2).estimate, 1e-9 * g.mean_a);
  EXPECT_NEAR(g.gain, 1 - g.mean_a / g.mean_b, 1e-15);
  EXPECT_GT(g.std_error, 0.0);
  EXPECT_LT(g.std_error, 0.05);
}
