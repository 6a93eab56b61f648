#include <gtest/gtest.h>

#include <numeric>

#include "blockcode/opt_runtime.hpp"
#include "blockcode/oracles/oracles.hpp"
#include "blockcode/runtime_model.hpp"

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

double sum(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0); }

}  // namespace

TEST(Equalizing, TwoWorkerHandComputed) {
  // t = (1.5, 2.5): z = 10 / (1/3 + 1/5) = 18.75.
  const auto x = equalizing_allocation({1.5, 2.5}, 10);
  EXPECT_NEAR(x[0], 7.5, 1e-12);
  EXPECT_NEAR(x[1], 2.5, 1e-12);
}

TEST(Equalizing, EqualizesEveryBlock) {
  RandomStream rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const int N = 1 + static_cast<int>(rng.below(30));
    std::vector<double> t(N);
    for (double& v : t) v = 0.1 + 10 * rng.uniform();
    std::sort(t.begin(), t.end());
    const auto x = equalizing_allocation(t, 100);
    EXPECT_NEAR(sum(x), 100, 1e-9);
    const auto prefix = weighted_prefix_sums(x);
    for (int n = 0; n < N; ++n) {
      EXPECT_GE(x[n], 0.0);
      EXPECT_NEAR(t[N - 1 - n] * prefix[n], t[N - 1] * prefix[0], 1e-9 * t[N - 1] * prefix[0]);
    }
  }
}

TEST(Equalizing, MinimizesDeterministicRuntime) {
  RandomStream rng(3);
  const SystemConfig cfg = make_cfg(5, 40, 5, 1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(5);
    for (double& v : t) v = 1 + 5 * rng.uniform();
    std::sort(t.begin(), t.end());
    const RuntimeVector T = RuntimeVector::from_values(t);
    const double best = runtime_of_x(equalizing_allocation(t, 40), T, cfg);
    oracles::for_each_composition(40, 5, [&](const std::vector<long long>& x) {
      EXPECT_GE(runtime_of_x(std::vector<double>(x.begin(), x.end()), T, cfg), best * (1 - 1e-12));
    });
  }
}

TEST(Equalizing, EqualTimesUseOneBlock) {
  const auto x = equalizing_allocation({2, 2, 2, 2}, 12);
  EXPECT_NEAR(x[0], 12, 1e-12);
  for (int n = 1; n < 4; ++n) EXPECT_EQ(x[n], 0.0);
  EXPECT_THROW(equalizing_allocation({2, 1}, 1), std::invalid_argument);
  EXPECT_THROW(equalizing_allocation({0, 1}, 1), std::invalid_argument);
}

TEST(ClosedForms, UseOrderStatistics) {
  const SystemConfig cfg = make_cfg(2, 10, 2, 1.0, 1.0);
  const auto times = closed_form_deterministic_times(cfg);
  EXPECT_NEAR(times[0], 7.5, 1e-12);
  EXPECT_NEAR(times[1], 2.5, 1e-12);
  // Reference 1 / E[1 / T_(n)] computed in extended precision.
  const auto freq = closed_form_deterministic_frequencies(cfg);
  const auto expected = equalizing_allocation({1.3837818999945846, 2.1274898692638435}, 10);
  EXPECT_NEAR(freq[0], expected[0], 1e-12);
  EXPECT_NEAR(freq[1], expected[1], 1e-12);
}

TEST(Subgradient, MatchesFiniteDifferences) {
  const SystemConfig cfg = make_cfg(4, 20, 8, 0.5, 1);
  const auto draws = sorted_runtime_draws(cfg, 0, 5, 17);
  const std::vector<double> x = {6.3, 5.1, 4.9, 3.7};
  auto f = [&](const std::vector<double>& y) {
    double s = 0;
    for (const auto& t : draws) s += runtime_of_x(y, RuntimeVector::from_values(t), cfg);
    return s / draws.size();
  };
  const auto g = noisy_subgradient(x, draws, cfg);
  const auto fd = oracles::central_difference(f, x, 1e-7);
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(g[n], fd[n], 1e-5 * std::abs(fd[n]) + 1e-9);
}

TEST(Subgradient, SupportingHyperplane) {
  // Convexity: f(y) >= f(x) + g . (y - x) for the sample average.
  const SystemConfig cfg = make_cfg(5, 30, 5, 0.2, 1);
  const auto draws = sorted_runtime_draws(cfg, 0, 10, 4);
  auto f = [&](const std::vector<double>& y) {
    double s = 0;
    for (const auto& t : draws) s += runtime_of_x(y, RuntimeVector::from_values(t), cfg);
    return s / draws.size();
  };
  RandomStream rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(5), y(5);
    for (int n = 0; n < 5; ++n) {
      x[n] = 6 * rng.uniform();
      y[n] = 6 * rng.uniform();
    }
    const auto g = noisy_subgradient(x, draws, cfg);
    double lin = f(x);
    for (int n = 0; n < 5; ++n) lin += g[n] * (y[n] - x[n]);
    EXPECT_GE(f(y), lin - 1e-9 * std::abs(lin));
  }
}

TEST(GapBounds, Formulas) {
  const SystemConfig cfg = make_cfg(2, 10, 2, 1.0, 1.0);
  // H_2 = 1.5.
  EXPECT_NEAR(deterministic_times_gap_bound(cfg), (1 + 1.5) * (1.5 + 1), 1e-12);
  EXPECT_NEAR(deterministic_frequencies_gap_bound(cfg), 2.5, 1e-12);
  EXPECT_THROW(deterministic_times_gap_bound(make_cfg(2, 10, 2, 1.0, 0.0)), std::invalid_argument);
}

TEST(Solver, TwoWorkersReachGridOptimum) {
  const SystemConfig cfg = make_cfg(2, 100, 4, 0.2, 1);
  double grid_best = kInfinity;
  for (int i = 0; i <= 400; ++i) {
    const double x0 = 100.0 * i / 400;
    grid_best = std::min(grid_best, oracles::expected_runtime_two_workers({x0, 100 - x0}, cfg));
  }
  SubgradientSolverOptions opts;
  opts.check_trials = 20000;
  const RuntimeSolution sol = solve_expected_runtime(cfg, opts);
  EXPECT_NEAR(sum(sol.x), 100, 1e-9);
  EXPECT_LE(oracles::expected_runtime_two_workers(sol.x, cfg), grid_best * 1.005);
}

TEST(Solver, DeterministicAndFeasible) {
  const SystemConfig cfg = make_cfg(8, 1000, 20, 1e-2, 10);
  SubgradientSolverOptions opts;
  opts.iterations = 300;
  const RuntimeSolution a = solve_expected_runtime(cfg, opts);
  const RuntimeSolution b = solve_expected_runtime(cfg, opts);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_NEAR(sum(a.x), 1000, 1e-8);
  for (double v : a.x) EXPECT_GE(v, 0.0);
  EXPECT_GT(a.step_scale, 0.0);
  // The reported best never exceeds the starting point's checked value.
  EXPECT_LE(a.objective, a.history.front().second);
}

TEST(Solver, ConstantTimesConvergeToEqualizer) {
  const SystemConfig cfg = make_cfg(4, 40, 4, 1, 1);
  const std::vector<double> fixed = {1, 2, 3, 5};
  const TimeSampler sampler = [&](RandomStream&, std::vector<double>& sorted) { sorted = fixed; };
  SubgradientSolverOptions opts;
  opts.initial = std::vector<double>(4, 10.0);
  opts.iterations = 5000;
  opts.patience = 1000;
  const RuntimeSolution sol = solve_expected_runtime(cfg, opts, sampler);
  const double optimum = runtime_of_x(equalizing_allocation(fixed, 40), RuntimeVector::from_values(fixed), cfg);
  EXPECT_NEAR(sol.objective, optimum, 0.02 * optimum);
}

TEST(Solver, ClosedFormsWithinGapBounds) {
  const SystemConfig cfg = make_cfg(10, 1000, 10, 1e-2, 50);
  SubgradientSolverOptions opts;
  opts.iterations = 1000;
  const RuntimeSolution sol = solve_expected_runtime(cfg, opts);
  const double opt = expected_runtime_mc(sol.x, cfg, 100000, 3).estimate;
  const double times = expected_runtime_mc(closed_form_deterministic_times(cfg), cfg, 100000, 3).estimate;
  const double freq = expected_runtime_mc(closed_form_deterministic_frequencies(cfg), cfg, 100000, 3).estimate;
  EXPECT_LE(times, deterministic_times_gap_bound(cfg) * opt);
  EXPECT_LE(freq, deterministic_frequencies_gap_bound(cfg) * opt);
}

TEST(Solver, RejectsBadOptions) {
  const SystemConfig cfg = make_cfg(3, 10, 3, 1, 1);
  SubgradientSolverOptions opts;
  opts.samples = 0;
  EXPECT_THROW(solve_expected_runtime(cfg, opts), std::invalid_argument);
  opts = {};
  opts.initial = std::vector<double>{1, 2};
  EXPECT_THROW(solve_expected_runtime(cfg, opts), std::invalid_argument);
}
