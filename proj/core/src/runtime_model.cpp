#include "blockcode/runtime_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blockcode {
namespace {

void check_length(std::size_t got, const SystemConfig& cfg, const char* what) {
  if (got != static_cast<std::size_t>(cfg.workers)) {
    throw std::invalid_argument(std::string(what) + ": length " + std::to_string(got) +
                                " does not match N=" + std::to_string(cfg.workers));
  }
}

// Calls fn(sorted T_j) for trials j in [first, first + count).
template <class Fn>
void for_each_draw(const SystemConfig& cfg, std::uint64_t first, std::uint64_t count,
                   std::uint64_t seed, Fn&& fn) {
  std::vector<double> draw(static_cast<std::size_t>(cfg.workers));
  const std::uint64_t stop = first + count;
  std::uint64_t j = first;
  while (j < stop) {
    const std::uint64_t block = j / kTrialsPerSubstream;
    RandomStream rng = RandomStream::substream(seed, block);
    for (std::uint64_t skip = block * kTrialsPerSubstream; skip < j; ++skip) sample_into(cfg.dist, rng, draw);
    const std::uint64_t block_end = std::min(stop, (block + 1) * kTrialsPerSubstream);
    for (; j < block_end; ++j) {
      sample_into(cfg.dist, rng, draw);
      std::sort(draw.begin(), draw.end());
      fn(static_cast<const std::vector<double>&>(draw));
    }
  }
}

SchemeEvaluation summarize(Metric metric, long double sum, long double sum_sq, std::uint64_t trials,
                           std::uint64_t seed) {
  SchemeEvaluation e;
  e.metric = metric;
  e.trials = trials;
  e.seed = seed;
  const long double n = static_cast<long double>(trials);
  const long double mean = sum / n;
  e.estimate = static_cast<double>(mean);
  if (trials > 1 && std::isfinite(e.estimate)) {
    const long double var = std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1));
    e.std_error = static_cast<double>(std::sqrt(var / n));
  }
  return e;
}

// c_n = t / ((M/N) b S_n), +inf for an empty prefix.
std::vector<double> cdf_arguments(const std::vector<double>& x, double t, const SystemConfig& cfg) {
  const std::vector<double> prefix = weighted_prefix_sums(x);
  std::vector<double> c(prefix.size());
  for (std::size_t n = 0; n < prefix.size(); ++n) {
    c[n] = prefix[n] > 0.0 ? t / (cfg.work_scale() * prefix[n]) : kInfinity;
  }
  return c;
}

void enumerate_ballots(int n, int used, int workers, long double weight,
                       const std::vector<double>& gap, const std::vector<long double>& inv_factorial,
                       double last, long double& total) {
  if (n == workers - 1) {
    const int k = workers - used;
    total += weight * std::pow(static_cast<long double>(last), k) * inv_factorial[k];
    return;
  }
  long double power = 1.0L;
  for (int k = 0; used + k <= n + 1; ++k) {
    enumerate_ballots(n + 1, used + k, workers, weight * power * inv_factorial[k], gap, inv_factorial,
                      last, total);
    power *= gap[n];
    if (power == 0.0L) break;
  }
}

const ShiftedExponential& require_shifted_exponential(const SystemConfig& cfg, const char* what) {
  const auto* e = cfg.dist.as_shifted_exponential();
  if (e == nullptr) {
    throw std::invalid_argument(std::string(what) + ": requires the shifted exponential law");
  }
  return *e;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace

std::string_view metric_name(Metric m) noexcept {
  return m == Metric::ExpectedRuntime ? "expected_runtime" : "completion_probability";
}

double runtime_of_s(const CodingVector& s, const RuntimeVector& T, const SystemConfig& cfg) {
  check_length(T.sorted.size(), cfg, "runtime_of_s");
  double best = 0.0;
  double prefix = 0.0;
  for (int level : s.levels) {
    if (level < 0 || level >= cfg.workers) {
      throw std::invalid_argument("runtime_of_s: level " + std::to_string(level) + " out of range");
    }
    prefix += level + 1;
    best = std::max(best, T.sorted[cfg.workers - level - 1] * prefix);
  }
  return cfg.work_scale() * best;
}

double runtime_kernel(const std::vector<double>& prefix, const std::vector<double>& sorted) {
  const std::size_t N = sorted.size();
  double best = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    if (prefix[n] > 0.0) best = std::max(best, sorted[N - 1 - n] * prefix[n]);
  }
  return best;
}

int runtime_argmax(const std::vector<double>& prefix, const std::vector<double>& sorted) {
  const std::size_t N = sorted.size();
  int arg = 0;
  double best = -1.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double v = prefix[n] > 0.0 ? sorted[N - 1 - n] * prefix[n] : 0.0;
    if (v > best) {
      best = v;
      arg = static_cast<int>(n);
    }
  }
  return arg;
}

double runtime_of_x(const std::vector<double>& x, const RuntimeVector& T, const SystemConfig& cfg) {
  check_length(x.size(), cfg, "runtime_of_x");
  check_length(T.sorted.size(), cfg, "runtime_of_x");
  return cfg.work_scale() * runtime_kernel(weighted_prefix_sums(x), T.sorted);
}

double runtime_of_x(const BlockAllocation& x, const RuntimeVector& T, const SystemConfig& cfg) {
  return runtime_of_x(x.sizes(), T, cfg);
}

std::vector<std::vector<double>> sorted_runtime_draws(const SystemConfig& cfg, std::uint64_t first,
                                                      std::uint64_t count, std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for_each_draw(cfg, first, count, seed, [&](const std::vector<double>& t) { out.push_back(t); });
  return out;
}

std::vector<double> runtime_samples(const std::vector<double>& x, const SystemConfig& cfg,
                                    std::uint64_t trials, std::uint64_t seed) {
  check_length(x.size(), cfg, "runtime_samples");
  const std::vector<double> prefix = weighted_prefix_sums(x);
  const double scale = cfg.work_scale();
  std::vector<double> out;
  out.reserve(trials);
  for_each_draw(cfg, 0, trials, seed,
                [&](const std::vector<double>& t) { out.push_back(scale * runtime_kernel(prefix, t)); });
  return out;
}

SchemeEvaluation expected_runtime_mc(const std::vector<double>& x, const SystemConfig& cfg,
                                     std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("expected_runtime_mc: zero trials");
  check_length(x.size(), cfg, "expected_runtime_mc");
  const std::vector<double> prefix = weighted_prefix_sums(x);
  const double scale = cfg.work_scale();
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  for_each_draw(cfg, 0, trials, seed, [&](const std::vector<double>& t) {
    const long double v = scale * runtime_kernel(prefix, t);
    sum += v;
    sum_sq += v * v;
  });
  return summarize(Metric::ExpectedRuntime, sum, sum_sq, trials, seed);
}

double completion_prob_exact(const std::vector<double>& x, double t, const SystemConfig& cfg) {
  check_length(x.size(), cfg, "completion_prob_exact");
  if (cfg.workers > kMaxExactWorkers) {
    throw std::length_error("completion_prob_exact: N=" + std::to_string(cfg.workers) +
                            " exceeds the enumeration limit " + std::to_string(kMaxExactWorkers) +
                            "; use completion_prob_mc");
  }
  if (!(t >= 0.0)) return 0.0;
  const int N = cfg.workers;
  const std::vector<double> c = cdf_arguments(x, t, cfg);
  // gap[n] = F(c_n) - F(c_{n+1}), formed from survivals to keep small gaps accurate.
  std::vector<double> gap(static_cast<std::size_t>(N), 0.0);
  for (int n = 0; n + 1 < N; ++n) {
    gap[n] = std::max(0.0, cfg.dist.survival(c[n + 1]) - cfg.dist.survival(c[n]));
  }
  std::vector<long double> inv_factorial(static_cast<std::size_t>(N) + 1, 1.0L);
  long double factorial = 1.0L;
  for (int k = 1; k <= N; ++k) {
    factorial *= k;
    inv_factorial[k] = 1.0L / factorial;
  }
  long double total = 0.0L;
  enumerate_ballots(0, 0, N, 1.0L, gap, inv_factorial, cfg.dist.cdf(c[N - 1]), total);
  return std::clamp(static_cast<double>(total * factorial), 0.0, 1.0);
}

double completion_prob_recursive(const std::vector<double>& x, double t, const SystemConfig& cfg) {
  check_length(x.size(), cfg, "completion_prob_recursive");
  if (!(t >= 0.0)) return 0.0;
  const int N = cfg.workers;
  const std::vector<double> c = cdf_arguments(x, t, cfg);
  // mass[p]: sum over partial ballots with running sum p of prod gap^k / k!.
  // The final N!/k! factor is applied in log space.
  std::vector<long double> mass(static_cast<std::size_t>(N) + 1, 0.0L);
  std::vector<long double> next(mass.size());
  mass[0] = 1.0L;
  for (int n = 0; n + 1 < N; ++n) {
    const long double gap = std::max(0.0, cfg.dist.survival(c[n + 1]) - cfg.dist.survival(c[n]));
    std::fill(next.begin(), next.end(), 0.0L);
    for (int p = 0; p <= n; ++p) {
      if (mass[p] == 0.0L) continue;
      long double term = mass[p];
      for (int k = 0; p + k <= n + 1; ++k) {
        next[p + k] += term;
        term *= gap / (k + 1);
        if (term == 0.0L) break;
      }
    }
    mass.swap(next);
  }
  const long double last = cfg.dist.cdf(c[N - 1]);
  long double total = 0.0L;
  for (int p = 0; p < N; ++p) {
    if (mass[p] == 0.0L) continue;
    const int k = N - p;
    total += mass[p] * std::exp(k * std::log(last) + std::lgamma(N + 1.0L) - std::lgamma(k + 1.0L));
  }
  return std::clamp(static_cast<double>(total), 0.0, 1.0);
}

SchemeEvaluation completion_prob_mc(const std::vector<double>& x, double t,
                                    const SystemConfig& cfg, std::uint64_t trials,
                                    std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("completion_prob_mc: zero trials");
  check_length(x.size(), cfg, "completion_prob_mc");
  const std::vector<double> prefix = weighted_prefix_sums(x);
  const double scale = cfg.work_scale();
  long double hits = 0.0L;
  for_each_draw(cfg, 0, trials, seed, [&](const std::vector<double>& T) {
    const double v = scale * runtime_kernel(prefix, T);
    if (std::isfinite(v) && v <= t) hits += 1.0L;
  });
  return summarize(Metric::CompletionProbability, hits, hits, trials, seed);
}

SchemeEvaluation completion_prob_mc(const CodingVector& s, double t, const SystemConfig& cfg,
                                    std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("completion_prob_mc: zero trials");
  long double hits = 0.0L;
  for_each_draw(cfg, 0, trials, seed, [&](const std::vector<double>& T) {
    RuntimeVector rv;
    rv.sorted = T;
    const double v = runtime_of_s(s, rv, cfg);
    if (std::isfinite(v) && v <= t) hits += 1.0L;
  });
  return summarize(Metric::CompletionProbability, hits, hits, trials, seed);
}

double asymptotic_failure(const std::vector<double>& x, double t, const SystemConfig& cfg) {
  const ShiftedExponential& e = require_shifted_exponential(cfg, "asymptotic_failure");
  check_length(x.size(), cfg, "asymptotic_failure");
  const std::vector<double> prefix = weighted_prefix_sums(x);
  double rate = kInfinity;
  for (int n = 0; n < cfg.workers; ++n) {
    if (x[n] > 0.0) rate = std::min(rate, (n + 1) / prefix[n]);
  }
  if (!std::isfinite(rate)) throw std::invalid_argument("asymptotic_failure: empty allocation");
  double coefficient = 0.0;
  for (int n = 0; n < cfg.workers; ++n) {
    if (x[n] > 0.0 && (n + 1) / prefix[n] <= rate * (1.0 + 1e-12)) {
      coefficient += binomial(cfg.workers, n + 1) * std::exp(e.rate * e.shift * (n + 1));
    }
  }
  return coefficient * std::exp(-e.rate * cfg.workers * rate * t / (cfg.samples * cfg.cycles_per_derivative));
}

double failure_upper_bound(const std::vector<double>& x, double t, const SystemConfig& cfg) {
  const ShiftedExponential& e = require_shifted_exponential(cfg, "failure_upper_bound");
  check_length(x.size(), cfg, "failure_upper_bound");
  const std::vector<double> prefix = weighted_prefix_sums(x);
  double rate = kInfinity;
  double coefficient = 0.0;
  for (int n = 0; n < cfg.workers; ++n) {
    if (prefix[n] > 0.0) rate = std::min(rate, (n + 1) / prefix[n]);
    coefficient += binomial(cfg.workers, n + 1) * std::exp(e.rate * e.shift * (n + 1));
  }
  if (!std::isfinite(rate)) throw std::invalid_argument("failure_upper_bound: empty allocation");
  return coefficient * std::exp(-e.rate * cfg.workers * rate * t / (cfg.samples * cfg.cycles_per_derivative));
}

}  // namespace blockcode
