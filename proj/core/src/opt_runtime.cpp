#include "blockcode/opt_runtime.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "blockcode/runtime_model.hpp"
#include "blockcode/simplex.hpp"
#include "blockcode/special_functions.hpp"

namespace blockcode {
namespace {

// Norm of v with its mean removed: the part of a step the projection keeps.
double tangent_norm(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double e : v) s += (e - mean) * (e - mean);
  return std::sqrt(s);
}

TimeSampler default_sampler(const SystemConfig& cfg) {
  return [&dist = cfg.dist](RandomStream& rng, std::vector<double>& sorted) {
    sample_into(dist, rng, sorted);
    std::sort(sorted.begin(), sorted.end());
  };
}

const ShiftedExponential& positive_shift(const SystemConfig& cfg) {
  const auto* e = cfg.dist.as_shifted_exponential();
  if (e == nullptr || !(e->shift > 0.0)) {
    throw std::invalid_argument("gap bound: requires a shifted exponential with positive shift");
  }
  return *e;
}

}  // namespace

std::vector<double> noisy_subgradient(const std::vector<double>& x,
                                      const std::vector<std::vector<double>>& sorted_draws,
                                      const SystemConfig& cfg) {
  if (sorted_draws.empty()) throw std::invalid_argument("noisy_subgradient: no samples");
  const std::size_t N = x.size();
  const std::vector<double> prefix = weighted_prefix_sums(x);
  // weight[n]: total of T_(N-n) over draws whose argmax is n.
  std::vector<double> weight(N, 0.0);
  for (const auto& t : sorted_draws) {
    const int n = runtime_argmax(prefix, t);
    weight[n] += t[N - 1 - n];
  }
  std::vector<double> g(N, 0.0);
  double tail = 0.0;
  for (std::size_t j = N; j-- > 0;) {
    tail += weight[j];
    g[j] = (j + 1) * tail;
  }
  const double scale = cfg.work_scale() / static_cast<double>(sorted_draws.size());
  for (double& v : g) v *= scale;
  return g;
}

std::vector<double> equalizing_allocation(const std::vector<double>& t, double total) {
  const std::size_t N = t.size();
  if (N == 0) throw std::invalid_argument("equalizing_allocation: empty time vector");
  for (std::size_t n = 0; n < N; ++n) {
    if (!(t[n] > 0.0) || (n > 0 && t[n] < t[n - 1])) {
      throw std::invalid_argument("equalizing_allocation: times must be positive and ascending");
    }
  }
  // With 1-based t_1..t_N: t_{N-n} S_n = z for every n.
  double denom = 1.0 / (N * t[0]);
  for (std::size_t n = 1; n < N; ++n) {
    denom += 1.0 / (static_cast<double>(n) * (n + 1) * t[N - n]);
  }
  const double z = total / denom;
  std::vector<double> x(N);
  x[0] = z / t[N - 1];
  for (std::size_t n = 1; n < N; ++n) {
    x[n] = (1.0 / t[N - n - 1] - 1.0 / t[N - n]) * z / (n + 1);
  }
  return x;
}

std::vector<double> closed_form_deterministic_times(const SystemConfig& cfg) {
  cfg.validate();
  return equalizing_allocation(expected_order_statistics(cfg.dist, cfg.workers), cfg.coordinates);
}

std::vector<double> closed_form_deterministic_frequencies(const SystemConfig& cfg) {
  cfg.validate();
  return equalizing_allocation(expected_inverse_order_statistics(cfg.dist, cfg.workers), cfg.coordinates);
}

double deterministic_times_gap_bound(const SystemConfig& cfg) {
  const ShiftedExponential& e = positive_shift(cfg);
  const double h = harmonic_number(cfg.workers);
  return (1.0 / e.shift + h / (e.rate * e.shift * e.shift)) * (h / e.rate + e.shift);
}

double deterministic_frequencies_gap_bound(const SystemConfig& cfg) {
  const ShiftedExponential& e = positive_shift(cfg);
  const double h = harmonic_number(cfg.workers);
  return (h / e.rate + e.shift) / e.shift;
}

RuntimeSolution solve_expected_runtime(const SystemConfig& cfg, const SubgradientSolverOptions& opts) {
  return solve_expected_runtime(cfg, opts, default_sampler(cfg));
}

RuntimeSolution solve_expected_runtime(const SystemConfig& cfg, const SubgradientSolverOptions& opts,
                                       const TimeSampler& sampler) {
  cfg.validate();
  if (opts.iterations < 1 || opts.samples < 1 || opts.check_interval < 1 || opts.check_trials < 1 ||
      opts.step_scale < 0.0 || opts.averaging_window < 0) {
    throw std::invalid_argument("solve_expected_runtime: invalid options");
  }
  const std::size_t N = static_cast<std::size_t>(cfg.workers);
  const double L = cfg.coordinates;

  std::vector<double> x = opts.initial ? *opts.initial : closed_form_deterministic_times(cfg);
  if (x.size() != N) throw std::invalid_argument("solve_expected_runtime: initial point has wrong length");
  x = project_to_simplex_scaled(x, L);

  // Fixed check draws: every candidate is scored on the same times.
  std::vector<std::vector<double>> check(opts.check_trials, std::vector<double>(N));
  {
    RandomStream rng = RandomStream::substream(opts.seed, 0xc4ec);
    for (auto& t : check) sampler(rng, t);
  }
  const double scale = cfg.work_scale();
  auto score = [&](const std::vector<double>& candidate) {
    const std::vector<double> prefix = weighted_prefix_sums(candidate);
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (const auto& t : check) {
      const long double v = scale * runtime_kernel(prefix, t);
      sum += v;
      sum_sq += v * v;
    }
    const long double n = static_cast<long double>(check.size());
    const long double mean = sum / n;
    const long double var = n > 1 ? std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1)) : 0.0L;
    return std::pair<double, double>(static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)));
  };

  RuntimeSolution best;
  best.x = x;
  std::tie(best.objective, best.std_error) = score(x);
  best.history.emplace_back(0, best.objective);
  if (N == 1) return best;

  RandomStream rng = RandomStream::substream(opts.seed, 0);
  std::vector<std::vector<double>> draws(static_cast<std::size_t>(opts.samples), std::vector<double>(N));
  auto draw_batch = [&] {
    for (auto& t : draws) sampler(rng, t);
  };

  double sigma0 = opts.step_scale;
  if (sigma0 == 0.0) {
    draw_batch();
    const double g0 = tangent_norm(noisy_subgradient(x, draws, cfg));
    sigma0 = g0 > 0.0 ? 0.1 * L / g0 : 1.0;
  }
  best.step_scale = sigma0;

  std::deque<std::vector<double>> window;
  std::vector<double> window_sum(N, 0.0);
  double reference = best.objective;
  int stale = 0;
  int i = 1;
  for (; i <= opts.iterations; ++i) {
    draw_batch();
    const std::vector<double> g = noisy_subgradient(x, draws, cfg);
    const double sigma = sigma0 / i;
    for (std::size_t n = 0; n < N; ++n) x[n] -= sigma * g[n];
    x = project_to_simplex_scaled(x, L);

    if (opts.averaging_window > 0) {
      window.push_back(x);
      for (std::size_t n = 0; n < N; ++n) window_sum[n] += x[n];
      if (static_cast<int>(window.size()) > opts.averaging_window) {
        for (std::size_t n = 0; n < N; ++n) window_sum[n] -= window.front()[n];
        window.pop_front();
      }
    }
    if (i % opts.check_interval != 0 && i != opts.iterations) continue;

    std::vector<double> candidate = x;
    if (!window.empty()) {
      for (std::size_t n = 0; n < N; ++n) candidate[n] = window_sum[n] / static_cast<double>(window.size());
      candidate = project_to_simplex_scaled(candidate, L);
    }
    const auto [value, se] = score(candidate);
    best.history.emplace_back(i, value);
    if (value < best.objective) {
      best.objective = value;
      best.std_error = se;
      best.x = candidate;
    }
    if (best.objective < reference * (1.0 - opts.min_improvement)) {
      reference = best.objective;
      stale = 0;
    } else if (++stale >= opts.patience) {
      break;
    }
  }
  best.iterations = std::min(i, opts.iterations);
  return best;
}

}  // namespace blockcode
