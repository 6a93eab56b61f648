#include <gtest/gtest.h>

#include <cmath>

#include "blockcode/catalan.hpp"
#include "blockcode/opt_cdf.hpp"
#include "blockcode/oracles/oracles.hpp"
#include "blockcode/runtime_model.hpp"

using namespace blockcode;

namespace {

SystemConfig make_cfg(int N, int L, double M, double b, double rate, double shift) {
  SystemConfig cfg;
  cfg.workers = N;
  cfg.coordinates = L;
  cfg.samples = M;
  cfg.cycles_per_derivative = b;
  cfg.dist = StragglerDistribution::shifted_exponential(rate, shift);
  return cfg;
}

// Worker times 0.1, 0.1, 0.25, 1 (times T0 = 20) of the four-worker example.
RuntimeVector example_times() { return RuntimeVector::from_values({2.0, 2.0, 5.0, 20.0}); }

CodingVector levels(std::vector<int> s) { return CodingVector{std::move(s), false}; }

std::vector<double> random_feasible(int N, double L, RandomStream& rng) {
  std::vector<double> x(N);
  double s = 0;
  for (double& v : x) s += v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
  if (s == 0) x[0] = s = 1;
  for (double& v : x) v *= L / s;
  return x;
}

}  // namespace

TEST(Transforms, HistogramAndInverse) {
  EXPECT_EQ(s_to_x(levels({1, 1, 2, 2}), 4).as_integers(), (std::vector<long long>{0, 2, 2, 0}));
  EXPECT_EQ(s_to_x(levels({0, 0, 0, 0, 0}), 3).as_integers(), (std::vector<long long>{5, 0, 0}));
  EXPECT_EQ(s_to_x(levels({0, 2, 2}), 3).as_integers(), (std::vector<long long>{1, 0, 2}));
  EXPECT_EQ(x_to_s({0, 2, 2, 0}, 4).levels, (std::vector<int>{1, 1, 2, 2}));
  EXPECT_EQ(x_to_s({3, 0, 0}, 3).levels, (std::vector<int>{0, 0, 0}));
  EXPECT_THROW(x_to_s({1, 1}, 3), std::invalid_argument);
  EXPECT_THROW(s_to_x(levels({0, 4}), 4), std::invalid_argument);
}

TEST(Transforms, RoundTripOnRandomAllocations) {
  RandomStream rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int N = 1 + static_cast<int>(rng.below(12));
    std::vector<long long> x(N);
    for (auto& v : x) v = static_cast<long long>(rng.below(6));
    long long L = 0;
    for (auto v : x) L += v;
    if (L == 0) continue;
    const CodingVector s = x_to_s(x, L);
    EXPECT_TRUE(std::is_sorted(s.levels.begin(), s.levels.end()));
    EXPECT_EQ(s_to_x(s, N).as_integers(), x);
  }
}

TEST(Allocation, Validation) {
  EXPECT_NO_THROW(BlockAllocation::continuous({1.5, 2.5}, 4.0));
  EXPECT_THROW(BlockAllocation::continuous({1.5, 2.6}, 4.0), std::invalid_argument);
  EXPECT_THROW(BlockAllocation::continuous({-1.0, 5.0}, 4.0), std::invalid_argument);
  EXPECT_THROW(BlockAllocation::integer({1, 2}, 4), std::invalid_argument);
  EXPECT_THROW(x_to_s(BlockAllocation::continuous({1.5, 2.5}, 4.0)), std::invalid_argument);
}

TEST(Runtime, FourWorkerExample) {
  const SystemConfig cfg = make_cfg(4, 4, 4, 1, 1, 0);
  const RuntimeVector T = example_times();
  const double T0 = 20.0;
  // M b / 2 T0, 3 M b / 10 T0, M b / 4 T0 with M = 4, b = 1.
  EXPECT_EQ(runtime_of_s(levels({1, 1, 1, 1}), T, cfg), 2.0 * T0);
  EXPECT_EQ(runtime_of_s(levels({2, 2, 2, 2}), T, cfg), 1.2 * T0);
  EXPECT_EQ(runtime_of_s(levels({1, 1, 2, 2}), T, cfg), 1.0 * T0);
  EXPECT_EQ(runtime_of_x(std::vector<double>{0, 2, 2, 0}, T, cfg), 1.0 * T0);
}

TEST(Runtime, SingleBlockAtZero) {
  const SystemConfig cfg = make_cfg(3, 6, 5, 2, 1, 0);
  const RuntimeVector T = RuntimeVector::from_values({1.0, 4.0, 2.0});
  EXPECT_DOUBLE_EQ(runtime_of_x(std::vector<double>{6, 0, 0}, T, cfg), 5.0 / 3.0 * 2 * 6 * 4.0);
}

TEST(Runtime, BlockFormEqualsCoordinateForm) {
  RandomStream rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const int N = 1 + static_cast<int>(rng.below(16));
    const SystemConfig cfg = make_cfg(N, 1, 1 + rng.below(50), 1 + rng.below(3), 1e-3, 100);
    std::vector<long long> x(N);
    long long L = 0;
    for (auto& v : x) L += v = static_cast<long long>(rng.below(7));
    if (L == 0) continue;
    const RuntimeVector T = sample_runtimes(cfg.dist, N, rng);
    const CodingVector s = x_to_s(x, L);
    EXPECT_EQ(runtime_of_s(s, T, cfg), runtime_of_x(std::vector<double>(x.begin(), x.end()), T, cfg));
  }
}

TEST(Runtime, SortingCodingVectorNeverHurts) {
  // Swapping an adjacent descent s_m > s_{m+1} cannot increase the runtime.
  RandomStream rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const int N = 2 + static_cast<int>(rng.below(6));
    const SystemConfig cfg = make_cfg(N, 1, 10, 1, 0.5, 1);
    const int L = 2 + static_cast<int>(rng.below(10));
    CodingVector s;
    for (int l = 0; l < L; ++l) s.levels.push_back(static_cast<int>(rng.below(N)));
    const RuntimeVector T = sample_runtimes(cfg.dist, N, rng);
    for (int m = 0; m + 1 < L; ++m) {
      if (s.levels[m] <= s.levels[m + 1]) continue;
      CodingVector swapped = s;
      std::swap(swapped.levels[m], swapped.levels[m + 1]);
      EXPECT_LE(runtime_of_s(swapped, T, cfg), runtime_of_s(s, T, cfg));
    }
  }
}

TEST(Runtime, MonotoneInWorkerTimes) {
  const SystemConfig cfg = make_cfg(4, 6, 4, 1, 1, 0);
  const std::vector<double> x = {1, 2, 2, 1};
  RandomStream rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    RuntimeVector T = sample_runtimes(cfg.dist, 4, rng);
    const double base = runtime_of_x(x, T, cfg);
    std::vector<double> v = T.values;
    v[rng.below(4)] *= 1.5;
    EXPECT_GE(runtime_of_x(x, RuntimeVector::from_values(v), cfg), base);
  }
}

TEST(ExpectedRuntime, SingleWorkerClosedForm) {
  const SystemConfig cfg = make_cfg(1, 10, 5, 2, 0.5, 3);
  const SchemeEvaluation e = expected_runtime_mc({10.0}, cfg, 200000, 9);
  EXPECT_NEAR(e.estimate, 5 * 2 * 10 * (1 / 0.5 + 3), 3 * e.std_error);
  const SchemeEvaluation again = expected_runtime_mc({10.0}, cfg, 200000, 9);
  EXPECT_EQ(e.estimate, again.estimate);
}

TEST(ExpectedRuntime, TwoWorkersMatchQuadrature) {
  const SystemConfig cfg = make_cfg(2, 10, 4, 1, 0.2, 1);
  for (const std::vector<double>& x : {std::vector<double>{10, 0}, {0, 10}, {6, 4}, {2.5, 7.5}}) {
    const SchemeEvaluation e = expected_runtime_mc(x, cfg, 400000, 21);
    const double q = oracles::expected_runtime_two_workers(x, cfg);
    EXPECT_NEAR(e.estimate, q, 3 * e.std_error) << x[0];
  }
}

TEST(ExpectedRuntime, SamplesAreCommonRandomNumbers) {
  const SystemConfig cfg = make_cfg(5, 20, 10, 1, 1e-3, 100);
  const auto a = runtime_samples({4, 4, 4, 4, 4}, cfg, 5000, 3);
  const auto b = runtime_samples({4, 4, 4, 4, 4}, cfg, 5000, 3);
  EXPECT_EQ(a, b);
  const auto draws = sorted_runtime_draws(cfg, 4090, 10, 3);
  const auto all = sorted_runtime_draws(cfg, 0, 4100, 3);
  for (int j = 0; j < 10; ++j) EXPECT_EQ(draws[j], all[4090 + j]);
}

TEST(CompletionProbability, SingleWorker) {
  const SystemConfig cfg = make_cfg(1, 1, 1, 1, 1, 0);
  EXPECT_NEAR(completion_prob_exact({1.0}, 1.0, cfg), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_EQ(completion_prob_exact({1.0}, 0.0, cfg), 0.0);
}

TEST(CompletionProbability, ReferenceValue) {
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 1.0, 0.1);
  // Independent enumeration in extended precision.
  EXPECT_NEAR(completion_prob_exact({3, 2, 1}, 5.0, cfg), 0.28785487745380356, 1e-14);
  EXPECT_NEAR(completion_prob_recursive({3, 2, 1}, 5.0, cfg), 0.28785487745380356, 1e-14);
  const SchemeEvaluation mc = completion_prob_mc({3, 2, 1}, 5.0, cfg, 1000000, 5);
  EXPECT_NEAR(mc.estimate, 0.28785487745380356, 3 * mc.std_error);
}

TEST(CompletionProbability, BelowMinimumRuntimeIsZero) {
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 1.0, 2.0);
  // Fastest possible runtime: all workers at t0.
  const double floor = cfg.work_scale() * 2.0 * 6;
  EXPECT_EQ(completion_prob_exact({6, 0, 0}, 0.99 * floor, cfg), 0.0);
}

TEST(CompletionProbability, ExactEqualsSumOfG) {
  RandomStream rng(8);
  for (int N = 1; N <= 6; ++N) {
    const SystemConfig cfg = make_cfg(N, 30, 10, 1, 0.5, 1);
    const std::vector<double> x = random_feasible(N, 30, rng);
    const double t = 300 + 400 * rng.uniform();
    double sum = 0;
    std::uint64_t terms = 0;
    for_each_ballot_vector(N, [&](const BallotVector& k) {
      sum += g_value(x, t, k, cfg);
      ++terms;
    });
    EXPECT_EQ(BigInt(terms), ballot_count(0, N));
    EXPECT_NEAR(completion_prob_exact(x, t, cfg), sum, 1e-12);
    EXPECT_NEAR(completion_prob_recursive(x, t, cfg), sum, 1e-12);
  }
}

TEST(CompletionProbability, AgreesWithMonteCarlo) {
  RandomStream rng(81);
  for (int trial = 0; trial < 8; ++trial) {
    const int N = 2 + trial % 5;
    const SystemConfig cfg = make_cfg(N, 20, 5, 1, 0.3, 1);
    const std::vector<double> x = random_feasible(N, 20, rng);
    const double median = [&] {
      auto v = runtime_samples(x, cfg, 999, 1);
      std::nth_element(v.begin(), v.begin() + 499, v.end());
      return v[499];
    }();
    const SchemeEvaluation mc = completion_prob_mc(x, median, cfg, 200000, 100 + trial);
    EXPECT_NEAR(completion_prob_exact(x, median, cfg), mc.estimate, 3.5 * mc.std_error);
  }
}

TEST(CompletionProbability, MonotoneInThreshold) {
  const SystemConfig cfg = make_cfg(5, 20, 5, 1, 0.3, 1);
  const std::vector<double> x = {8, 4, 4, 2, 2};
  double prev = 0;
  for (double t = 0; t < 2000; t += 10) {
    const double p = completion_prob_exact(x, t, cfg);
    EXPECT_GE(p + 1e-15, prev);
    prev = p;
  }
}

TEST(CompletionProbability, EnumerationGuard) {
  const SystemConfig cfg = make_cfg(16, 16, 1, 1, 1, 0);
  EXPECT_THROW(completion_prob_exact(std::vector<double>(16, 1.0), 10, cfg), std::length_error);
  EXPECT_NO_THROW(completion_prob_recursive(std::vector<double>(16, 1.0), 10, cfg));
}

TEST(CompletionProbability, MonteCarloEdges) {
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 1.0, 0.1);
  const SchemeEvaluation inf = completion_prob_mc({2, 2, 2}, kInfinity, cfg, 1000, 1);
  EXPECT_EQ(inf.estimate, 1.0);
  EXPECT_EQ(inf.std_error, 0.0);
  EXPECT_EQ(completion_prob_mc({2, 2, 2}, 0.0, cfg, 1000, 1).estimate, 0.0);
}

TEST(Asymptotics, RatioNearOneAtSmallFailure) {
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 1.0, 0.1);
  const std::vector<double> x = {2, 2, 2};
  const double t = 56.0;
  const double failure = 1.0 - completion_prob_exact(x, t, cfg);
  EXPECT_NEAR(failure, 1.150802555565988805e-6, 1e-12);
  const double ratio = failure / asymptotic_failure(x, t, cfg);
  EXPECT_NEAR(ratio, 1.0252628465910932, 2e-6);
}

TEST(Asymptotics, DecreasingAndDominated) {
  RandomStream rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int N = 1 + static_cast<int>(rng.below(8));
    const SystemConfig cfg = make_cfg(N, 40, 5, 1, 0.1 + rng.uniform(), rng.uniform());
    const std::vector<double> x = random_feasible(N, 40, rng);
    const double t = 100 + 1000 * rng.uniform();
    const double e = asymptotic_failure(x, t, cfg);
    EXPECT_LE(e, failure_upper_bound(x, t, cfg) * (1 + 1e-12));
    EXPECT_LT(asymptotic_failure(x, t + 10, cfg), e);
    EXPECT_LT(failure_upper_bound(x, t + 10, cfg), failure_upper_bound(x, t, cfg));
  }
}

TEST(Asymptotics, SingleWorkerIsExactTail) {
  const SystemConfig cfg = make_cfg(1, 5, 2, 1, 0.5, 1);
  for (double t : {20.0, 50.0, 80.0}) {
    const double tail = 1.0 - cfg.dist.cdf(t / (2 * 5));
    EXPECT_NEAR(asymptotic_failure({5}, t, cfg), tail, 1e-12 * tail);
    EXPECT_NEAR(failure_upper_bound({5}, t, cfg), tail, 1e-12 * tail);
  }
}

TEST(Asymptotics, AllMassOnFirstBlock) {
  // Failure means one of N workers is slower than c_0.
  const SystemConfig cfg = make_cfg(3, 6, 3, 1, 1.0, 0.1);
  const double t = 120;
  const double failure = 1.0 - completion_prob_exact({6, 0, 0}, t, cfg);
  EXPECT_NEAR(failure / asymptotic_failure({6, 0, 0}, t, cfg), 1.0, 1e-3);
}

TEST(Asymptotics, RequiresShiftedExponential) {
  SystemConfig cfg = make_cfg(2, 2, 1, 1, 1, 0);
  cfg.dist = StragglerDistribution(Bernoulli{0.1, 1, 2});
  EXPECT_THROW(asymptotic_failure({1, 1}, 10, cfg), std::invalid_argument);
}
