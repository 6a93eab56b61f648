#include <benchmark/benchmark.h>

#include <numeric>

#include "blockcode/catalan.hpp"
#include "blockcode/opt_cdf.hpp"
#include "blockcode/runtime_model.hpp"
#include "blockcode/simplex.hpp"

using namespace blockcode;

namespace {

SystemConfig config(int N) {
  SystemConfig cfg;
  cfg.workers = N;
  cfg.coordinates = 40'000;
  cfg.samples = 50;
  cfg.cycles_per_derivative = 1;
  cfg.dist = StragglerDistribution::shifted_exponential(0.1, 1.0);
  return cfg;
}

// Near the median runtime of the large-threshold closed form.
double threshold(const std::vector<double>& x, const SystemConfig& cfg) {
  std::vector<double> r = runtime_samples(x, cfg, 201, 7);
  std::nth_element(r.begin(), r.begin() + 100, r.end());
  return r[100];
}

void BM_CompletionExact(benchmark::State& state) {
  const SystemConfig cfg = config(static_cast<int>(state.range(0)));
  const auto x = closed_form_large_t(cfg);
  const double t = threshold(x, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(completion_prob_exact(x, t, cfg));
}
BENCHMARK(BM_CompletionExact)->DenseRange(4, 12, 4)->Unit(benchmark::kMicrosecond);

void BM_CompletionRecursive(benchmark::State& state) {
  const SystemConfig cfg = config(static_cast<int>(state.range(0)));
  const auto x = closed_form_large_t(cfg);
  const double t = threshold(x, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(completion_prob_recursive(x, t, cfg));
}
BENCHMARK(BM_CompletionRecursive)->Arg(4)->Arg(12)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_CompletionMonteCarlo(benchmark::State& state) {
  const SystemConfig cfg = config(static_cast<int>(state.range(0)));
  const auto x = closed_form_large_t(cfg);
  const double t = threshold(x, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(completion_prob_mc(x, t, cfg, 10'000, 3).estimate);
  state.SetItemsProcessed(state.iterations() * 10'000);
}
BENCHMARK(BM_CompletionMonteCarlo)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_BallotSampler(benchmark::State& state) {
  const BallotSampler sampler(static_cast<int>(state.range(0)));
  RandomStream rng(11);
  BallotVector k;
  for (auto _ : state) {
    sampler.sample_into(rng, k);
    benchmark::DoNotOptimize(k.data());
  }
}
BENCHMARK(BM_BallotSampler)->Arg(6)->Arg(20)->Arg(100);

void BM_SimplexProjection(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  RandomStream rng(5);
  std::vector<double> point(static_cast<std::size_t>(N));
  for (double& v : point) v = 1000.0 * (rng.uniform() - 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_simplex_scaled(point, 40'000.0));
}
BENCHMARK(BM_SimplexProjection)->Arg(20)->Arg(1000);

void BM_GradientSummand(benchmark::State& state) {
  const SystemConfig cfg = config(static_cast<int>(state.range(0)));
  const auto x = closed_form_large_t(cfg);
  const double t = threshold(x, cfg);
  RandomStream rng(2);
  const BallotVector k = BallotSampler(cfg.workers).sample(rng);
  for (auto _ : state) benchmark::DoNotOptimize(g_gradient(x, t, k, cfg));
}
BENCHMARK(BM_GradientSummand)->Arg(20);

void BM_RuntimeKernel(benchmark::State& state) {
  const SystemConfig cfg = config(static_cast<int>(state.range(0)));
  const auto prefix = weighted_prefix_sums(closed_form_large_t(cfg));
  const auto draws = sorted_runtime_draws(cfg, 0, 1, 9);
  for (auto _ : state) benchmark::DoNotOptimize(runtime_kernel(prefix, draws[0]));
}
BENCHMARK(BM_RuntimeKernel)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
