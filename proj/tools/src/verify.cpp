#include "blockcode/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>

#include "blockcode/catalan.hpp"
#include "blockcode/codec.hpp"
#include "blockcode/opt_cdf.hpp"
#include "blockcode/opt_runtime.hpp"
#include "blockcode/oracles/oracles.hpp"
#include "blockcode/runtime_model.hpp"
#include "blockcode/simplex.hpp"

namespace blockcode::cli {
namespace {

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

SystemConfig make_config(int N, int L, double M, double rate, double shift) {
  SystemConfig cfg;
  cfg.workers = N;
  cfg.coordinates = L;
  cfg.samples = M;
  cfg.cycles_per_derivative = 1.0;
  cfg.dist = StragglerDistribution::shifted_exponential(rate, shift);
  return cfg;
}

std::vector<double> random_simplex_point(RandomStream& rng, int N, double L) {
  std::vector<double> x(static_cast<std::size_t>(N));
  for (double& v : x) v = 0.2 + rng.uniform();
  const double s = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v *= L / s;
  return x;
}

double median_runtime(const std::vector<double>& x, const SystemConfig& cfg, std::uint64_t seed) {
  std::vector<double> r = runtime_samples(x, cfg, 501, seed);
  std::nth_element(r.begin(), r.begin() + 250, r.end());
  return r[250];
}

struct Sizes {
  int ballot_max;
  int conditional_max;
  int sampler_draws;
  int equivalence_pairs;
  int exact_configs;
  int gradient_points;
  int projection_cases;
  std::uint64_t two_worker_trials;
  int codec_max;
};

constexpr Sizes kQuick{7, 5, 20'000, 1'000, 10, 50, 300, 200'000, 5};
constexpr Sizes kFull{8, 7, 200'000, 10'000, 40, 200, 3'000, 1'000'000, 8};

CheckResult ballot_enumeration(const Sizes& z) {
  for (int N = 1; N <= z.ballot_max; ++N) {
    std::vector<BallotVector> seen;
    for_each_ballot_vector(N, [&](const BallotVector& k) { seen.push_back(k); });
    std::vector<BallotVector> brute = oracles::brute_force_ballot_vectors(N);
    std::sort(brute.begin(), brute.end());
    if (seen != brute || ballot_count(0, N) != BigInt(brute.size())) {
      return {"ballot-enumeration", false, fmt("mismatch at N=%d", N)};
    }
  }
  return {"ballot-enumeration", true, fmt("N<=%d", z.ballot_max)};
}

CheckResult conditional_laws(const Sizes& z) {
  int compared = 0;
  for (int N = 2; N <= z.conditional_max; ++N) {
    for (const BallotVector& k : oracles::brute_force_ballot_vectors(N)) {
      for (int n = 0; n + 1 < N; ++n) {
        const BallotVector prefix(k.begin(), k.begin() + n);
        if (conditional_pmf_exact(prefix, N) != oracles::enumerated_conditional(N, prefix)) {
          return {"conditional-pmf", false, fmt("mismatch at N=%d", N)};
        }
        ++compared;
      }
    }
  }
  return {"conditional-pmf", true, fmt("%d prefixes exact", compared)};
}

CheckResult sampler_support(const Sizes& z, std::uint64_t seed) {
  const BallotSampler sampler(12);
  RandomStream rng(seed);
  BallotVector k;
  for (int i = 0; i < z.sampler_draws; ++i) {
    sampler.sample_into(rng, k);
    if (!is_ballot_vector(k) || k.size() != 12) return {"sampler-support", false, fmt("invalid draw %d", i)};
  }
  return {"sampler-support", true, fmt("%d draws at N=12", z.sampler_draws)};
}

CheckResult equivalence(const Sizes& z, std::uint64_t seed) {
  RandomStream rng(seed);
  for (int i = 0; i < z.equivalence_pairs; ++i) {
    const int N = 1 + static_cast<int>(rng.below(16));
    const int L = 1 + static_cast<int>(rng.below(40));
    const SystemConfig cfg = make_config(N, L, N, 0.5 + rng.uniform(), rng.uniform());
    CodingVector s;
    for (int l = 0; l < L; ++l) s.levels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(N))));
    std::sort(s.levels.begin(), s.levels.end());
    s.sorted = true;
    const RuntimeVector T = sample_runtimes(cfg.dist, N, rng);
    if (runtime_of_s(s, T, cfg) != runtime_of_x(s_to_x(s, N), T, cfg)) {
      return {"equivalence", false, fmt("pair %d differs", i)};
    }
  }
  return {"equivalence", true, fmt("%d pairs exact", z.equivalence_pairs)};
}

CheckResult exact_probability(const Sizes& z, std::uint64_t seed) {
  RandomStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < z.exact_configs; ++i) {
    const int N = 1 + static_cast<int>(rng.below(8));
    const SystemConfig cfg = make_config(N, 50, N, 0.5 + rng.uniform(), rng.uniform());
    const std::vector<double> x = random_simplex_point(rng, N, 50);
    const double t = median_runtime(x, cfg, seed + i) * (0.6 + 0.8 * rng.uniform());
    const double a = completion_prob_exact(x, t, cfg);
    const double b = completion_prob_recursive(x, t, cfg);
    worst = std::max(worst, std::abs(a - b));
  }
  return {"exact-vs-recursive", worst <= 1e-12, fmt("%d configs, max diff %.2e", z.exact_configs, worst)};
}

CheckResult gradient_fd(const Sizes& z, std::uint64_t seed) {
  RandomStream rng(seed);
  int points = 0;
  double worst = 0.0;
  while (points < z.gradient_points) {
    const int N = 1 + static_cast<int>(rng.below(8));
    const int L = 10 + static_cast<int>(rng.below(100));
    const SystemConfig cfg = make_config(N, L, N, 0.05 + rng.uniform(), 0.1 + rng.uniform());
    const std::vector<double> x = random_simplex_point(rng, N, L);
    const double t = median_runtime(x, cfg, seed + points) * (0.7 + 0.6 * rng.uniform());
    const BallotVector k = BallotSampler(N).sample(rng);
    const auto g = g_gradient(x, t, k, cfg);
    const auto fd =
        oracles::central_difference([&](const std::vector<double>& y) { return g_value(y, t, k, cfg); }, x, 1e-6);
    double scale = 0.0, err = 0.0;
    for (int n = 0; n < N; ++n) {
      scale = std::max(scale, std::abs(fd[n]));
      err = std::max(err, std::abs(g[n] - fd[n]));
    }
    if (scale < 1e-200) continue;  // underflowed summand, no signal
    ++points;
    worst = std::max(worst, err / scale);
  }
  return {"gradient-fd", worst <= 1e-5, fmt("%d points, worst relative %.2e", points, worst)};
}

CheckResult projections(const Sizes& z, std::uint64_t seed) {
  RandomStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < z.projection_cases; ++i) {
    const int N = 1 + static_cast<int>(rng.below(7));
    const double L = 1.0 + 100.0 * rng.uniform();
    std::vector<double> point(static_cast<std::size_t>(N)), h(static_cast<std::size_t>(N));
    for (double& v : point) v = L * (2.0 * rng.uniform() - 0.5);
    for (double& v : h) v = 10.0 * (2.0 * rng.uniform() - 1.0);
    const auto p = project_to_simplex_scaled(point, L);
    const auto q = oracles::projection_by_active_sets(point, L);
    const double tau = 0.01 + rng.uniform();
    const auto a = ssca_subproblem(q, h, tau, L);
    const auto b = oracles::proximal_step_by_active_sets(q, h, tau, L);
    for (int n = 0; n < N; ++n) worst = std::max({worst, std::abs(p[n] - q[n]) / L, std::abs(a[n] - b[n]) / L});
  }
  return {"projection", worst <= 1e-9, fmt("%d cases, worst relative %.2e", z.projection_cases, worst)};
}

CheckResult closed_forms() {
  double worst = 0.0;
  for (int N = 1; N <= 30; ++N) {
    std::vector<double> t(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) t[n] = 1.0 + n + 0.25 * n * n;
    const auto x = equalizing_allocation(t, 1000.0);
    const auto S = weighted_prefix_sums(x);
    const double level = t[N - 1] * S[0];
    for (int n = 0; n < N; ++n) worst = std::max(worst, std::abs(t[N - 1 - n] * S[n] - level) / level);
  }
  bool reduction = true;
  for (int N = 1; N <= 100; ++N) reduction = reduction && verify_large_t_reduction(make_config(N, 1000, N, 1, 1));
  const auto hand = equalizing_allocation({1.5, 2.5}, 10.0);
  const bool hand_ok = std::abs(hand[0] - 7.5) < 1e-12 && std::abs(hand[1] - 2.5) < 1e-12;
  return {"closed-forms", worst <= 1e-9 && reduction && hand_ok,
          fmt("equalization %.2e, large-t reduction %s", worst, reduction ? "exact" : "broken")};
}

CheckResult single_worker_inverse() {
  double worst = 0.0;
  for (double rate : {0.1, 1.0, 3.0}) {
    for (double shift : {0.05, 0.5, 2.0}) {
      const auto d = StragglerDistribution::shifted_exponential(rate, shift);
      const double a = expected_inverse_order_statistic(d, 1, 1);
      const double b = 1.0 / oracles::inverse_mean_by_quadrature(rate, shift);
      worst = std::max(worst, std::abs(a - b) / b);
    }
  }
  return {"inverse-moment-quadrature", worst <= 1e-8, fmt("worst relative %.2e", worst)};
}

CheckResult two_worker_runtime(const Sizes& z, std::uint64_t seed) {
  double worst = 0.0;
  for (const std::vector<double>& x : {std::vector<double>{3, 1}, {0, 4}, {2, 2}, {4, 0}}) {
    const SystemConfig cfg = make_config(2, 4, 2, 1.0, 1.0);
    const SchemeEvaluation mc = expected_runtime_mc(x, cfg, z.two_worker_trials, seed);
    worst = std::max(worst, std::abs(mc.estimate - oracles::expected_runtime_two_workers(x, cfg)) / mc.std_error);
  }
  return {"two-worker-runtime", worst <= 4.0, fmt("worst |z| %.2f", worst)};
}

CheckResult codec_recovery(const Sizes& z, std::uint64_t seed) {
  RandomStream rng(seed);
  int codes = 0;
  for (int N = 1; N <= z.codec_max; ++N) {
    for (int s = 0; s < N; ++s) {
      const CodeBlock block = build_code(N, s, rng);
      if (!check_decodability(block, rng)) return {"codec-recovery", false, fmt("N=%d s=%d not decodable", N, s)};
      ++codes;
    }
  }
  return {"codec-recovery", true, fmt("%d codes, every subset", codes)};
}

}  // namespace

std::vector<CheckResult> run_checks(VerifyLevel level, std::uint64_t seed,
                                    const std::function<void(const CheckResult&)>& on_result) {
  const Sizes& z = level == VerifyLevel::Quick ? kQuick : kFull;
  const std::vector<std::pair<const char*, std::function<CheckResult()>>> checks = {
      {"ballot-enumeration", [&] { return ballot_enumeration(z); }},
      {"conditional-pmf", [&] { return conditional_laws(z); }},
      {"sampler-support", [&] { return sampler_support(z, seed); }},
      {"equivalence", [&] { return equivalence(z, seed + 1); }},
      {"exact-vs-recursive", [&] { return exact_probability(z, seed + 2); }},
      {"gradient-fd", [&] { return gradient_fd(z, seed + 3); }},
      {"projection", [&] { return projections(z, seed + 4); }},
      {"closed-forms", [] { return closed_forms(); }},
      {"inverse-moment-quadrature", [] { return single_worker_inverse(); }},
      {"two-worker-runtime", [&] { return two_worker_runtime(z, seed + 5); }},
      {"codec-recovery", [&] { return codec_recovery(z, seed + 6); }},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {name, false, std::string("exception: ") + e.what()};
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace blockcode::cli
