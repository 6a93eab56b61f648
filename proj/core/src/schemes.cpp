#include "blockcode/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace blockcode {

std::vector<long long> largest_remainder_round(const std::vector<double>& x) {
  const std::size_t N = x.size();
  std::vector<long long> out(N);
  std::vector<double> remainder(N);
  long double sum = 0.0L;
  long long floors = 0;
  for (std::size_t n = 0; n < N; ++n) {
    if (!(x[n] >= 0.0)) throw std::invalid_argument("largest_remainder_round: negative entry");
    const double f = std::floor(x[n]);
    out[n] = static_cast<long long>(f);
    remainder[n] = x[n] - f;
    floors += out[n];
    sum += x[n];
  }
  const long long target = std::llround(static_cast<double>(sum));
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (long long k = 0; k < target - floors; ++k) ++out[order[static_cast<std::size_t>(k) % N]];
  return out;
}

BlockAllocation round_allocation(const std::vector<double>& x, const AllocationObjective& objective,
                                 int max_moves) {
  const std::size_t N = x.size();
  std::vector<long long> r = largest_remainder_round(x);
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == std::floor(v); })) {
    return BlockAllocation::integer(r);
  }
  if (max_moves <= 0) max_moves = 10 * static_cast<int>(N);
  auto as_double = [](const std::vector<long long>& v) { return std::vector<double>(v.begin(), v.end()); };
  double current = objective(as_double(r));
  int moves = 0;
  bool improved = true;
  while (improved && moves < max_moves) {
    improved = false;
    for (std::size_t from = 0; from < N && !improved; ++from) {
      if (r[from] == 0) continue;
      for (std::size_t to = 0; to < N && !improved; ++to) {
        if (to == from) continue;
        --r[from];
        ++r[to];
        const double v = objective(as_double(r));
        if (v < current) {
          current = v;
          improved = true;
          ++moves;
        } else {
          ++r[from];
          --r[to];
        }
      }
    }
  }
  return BlockAllocation::integer(r);
}

AllocationObjective make_runtime_objective(const SystemConfig& cfg, std::uint64_t trials, std::uint64_t seed) {
  auto draws = std::make_shared<std::vector<std::vector<double>>>(sorted_runtime_draws(cfg, 0, trials, seed));
  const double scale = cfg.work_scale();
  return [draws, scale](const std::vector<double>& x) {
    const std::vector<double> prefix = weighted_prefix_sums(x);
    long double sum = 0.0L;
    for (const auto& t : *draws) sum += runtime_kernel(prefix, t);
    return static_cast<double>(scale * sum / static_cast<long double>(draws->size()));
  };
}

AllocationObjective make_failure_objective(const SystemConfig& cfg, double t) {
  return [cfg, t](const std::vector<double>& x) { return 1.0 - completion_prob_recursive(x, t, cfg); };
}

SchemeSpec single_bcgc(const SystemConfig& cfg, Metric metric, double t, std::uint64_t trials,
                       std::uint64_t seed) {
  cfg.validate();
  const int N = cfg.workers;
  const AllocationObjective cost =
      metric == Metric::ExpectedRuntime ? make_runtime_objective(cfg, trials, seed) : make_failure_objective(cfg, t);
  int best_n = 0;
  double best = 0.0;
  for (int n = 0; n < N; ++n) {
    std::vector<double> x(static_cast<std::size_t>(N), 0.0);
    x[n] = cfg.coordinates;
    const double v = cost(x);
    if (n == 0 || v < best) {
      best = v;
      best_n = n;
    }
  }
  std::vector<long long> x(static_cast<std::size_t>(N), 0);
  x[best_n] = cfg.coordinates;
  return {"single-bcgc", BlockAllocation::integer(x), "single block s=" + std::to_string(best_n)};
}

std::vector<SchemeRow> compare_schemes(const std::vector<SchemeSpec>& schemes, const SystemConfig& cfg,
                                       Metric metric, double t, std::uint64_t trials, std::uint64_t seed) {
  std::vector<SchemeRow> rows;
  rows.reserve(schemes.size());
  for (const SchemeSpec& s : schemes) {
    SchemeEvaluation e = metric == Metric::ExpectedRuntime
                             ? expected_runtime_mc(s.allocation.sizes(), cfg, trials, seed)
                             : completion_prob_mc(s.allocation.sizes(), t, cfg, trials, seed);
    rows.push_back({s.name, e});
  }
  return rows;
}

PairedGain paired_runtime_gain(const std::vector<double>& a, const std::vector<double>& b,
                               const SystemConfig& cfg, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("paired_runtime_gain: need at least two trials");
  const std::vector<double> ra = runtime_samples(a, cfg, trials, seed);
  const std::vector<double> rb = runtime_samples(b, cfg, trials, seed);
  const double n = static_cast<double>(trials);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  // gain = 1 - ma/mb; linearize: ratio error driven by a_j - (ma/mb) b_j.
  const double ratio = ma / mb;
  double var = 0.0;
  for (std::size_t j = 0; j < ra.size(); ++j) {
    const double d = ra[j] - ratio * rb[j];
    var += d * d;
  }
  var /= (n - 1);
  PairedGain g;
  g.mean_a = ma;
  g.mean_b = mb;
  g.gain = 1.0 - ratio;
  g.std_error = std::sqrt(var / n) / mb;
  return g;
}

}  // namespace blockcode
