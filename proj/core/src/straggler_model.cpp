#include "blockcode/straggler_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "blockcode/special_functions.hpp"

namespace blockcode {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_rank(int rank, int workers) {
  if (workers < 1 || rank < 1 || rank > workers) {
    throw std::out_of_range("order statistic rank " + std::to_string(rank) +
                            " outside 1.." + std::to_string(workers));
  }
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  long double sum = 0.0L;
  long double carry = 0.0L;
  long double magnitude = 0.0L;

  void add(long double v) {
    const long double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
    magnitude += std::fabs(v);
  }
  long double value() const { return sum + carry; }
};

long double log_binomial(int n, int k) {
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1);
}

// E[1/T_(n)] by the alternating exponential-integral sum.
CompensatedSum inverse_moment_terms(const ShiftedExponential& d, int rank, int workers) {
  CompensatedSum acc;
  const int n = rank;
  const long double lead =
      std::log(static_cast<long double>(d.rate) * (workers - n + 1)) + log_binomial(workers, n - 1);
  for (int i = 0; i <= n - 1; ++i) {
    const long double y = static_cast<long double>(d.rate) * d.shift * (workers - n + 1 + i);
    const long double magnitude = std::exp(lead + log_binomial(n - 1, i));
    const long double term = magnitude * scaled_exponential_integral(y);
    acc.add(i % 2 == 0 ? term : -term);
  }
  return acc;
}

}  // namespace

StragglerDistribution::StragglerDistribution(Law law) : law_(std::move(law)) {
  std::visit(overloaded{
                 [](const ShiftedExponential& e) {
                   if (!(e.rate > 0.0) || !std::isfinite(e.rate)) {
                     throw std::invalid_argument("shifted exponential: rate must be positive and finite");
                   }
                   if (!(e.shift >= 0.0) || !std::isfinite(e.shift)) {
                     throw std::invalid_argument("shifted exponential: shift must be >= 0 and finite");
                   }
                 },
                 [](const Bernoulli& b) {
                   if (!(b.p >= 0.0 && b.p <= 1.0)) {
                     throw std::invalid_argument("bernoulli: p must lie in [0, 1]");
                   }
                   if (!(b.fast > 0.0) || !std::isfinite(b.fast) || !(b.slow >= b.fast)) {
                     throw std::invalid_argument("bernoulli: need 0 < fast <= slow");
                   }
                 },
                 [](Empirical& e) {
                   if (e.samples.empty()) throw std::invalid_argument("empirical: no samples");
                   for (double v : e.samples) {
                     if (!std::isfinite(v) || !(v > 0.0)) {
                       throw std::invalid_argument("empirical: samples must be positive and finite");
                     }
                   }
                   std::sort(e.samples.begin(), e.samples.end());
                 },
             },
             law_);
}

double StragglerDistribution::cdf(double x) const {
  return std::visit(
      overloaded{
          [x](const ShiftedExponential& e) {
            if (x == kInfinity) return 1.0;
            return x <= e.shift ? 0.0 : -std::expm1(-e.rate * (x - e.shift));
          },
          [x](const Bernoulli& b) {
            if (x < b.fast) return 0.0;
            if (x >= b.slow) return 1.0;
            return 1.0 - b.p;
          },
          [x](const Empirical& e) {
            const auto it = std::upper_bound(e.samples.begin(), e.samples.end(), x);
            return static_cast<double>(it - e.samples.begin()) / static_cast<double>(e.samples.size());
          },
      },
      law_);
}

double StragglerDistribution::survival(double x) const {
  if (const auto* e = as_shifted_exponential()) {
    if (x == kInfinity) return 0.0;
    return x <= e->shift ? 1.0 : std::exp(-e->rate * (x - e->shift));
  }
  return 1.0 - cdf(x);
}

double StragglerDistribution::density(double x) const {
  if (const auto* e = as_shifted_exponential()) {
    if (x < e->shift || x == kInfinity) return 0.0;
    return e->rate * std::exp(-e->rate * (x - e->shift));
  }
  return 0.0;
}

double StragglerDistribution::quantile(double u) const {
  return std::visit(
      overloaded{
          [u](const ShiftedExponential& e) { return e.shift - std::log1p(-u) / e.rate; },
          [u](const Bernoulli& b) { return u <= 1.0 - b.p ? b.fast : b.slow; },
          [u](const Empirical& e) {
            const auto n = e.samples.size();
            auto k = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n)));
            k = std::clamp<std::size_t>(k, 1, n);
            return e.samples[k - 1];
          },
      },
      law_);
}

double StragglerDistribution::support_min() const {
  return std::visit(overloaded{
                        [](const ShiftedExponential& e) { return e.shift; },
                        [](const Bernoulli& b) { return b.p < 1.0 ? b.fast : b.slow; },
                        [](const Empirical& e) { return e.samples.front(); },
                    },
                    law_);
}

double StragglerDistribution::mean() const {
  return std::visit(
      overloaded{
          [](const ShiftedExponential& e) { return 1.0 / e.rate + e.shift; },
          [](const Bernoulli& b) {
            if (b.p == 0.0) return b.fast;
            if (b.slow == kInfinity) return kInfinity;
            return (1.0 - b.p) * b.fast + b.p * b.slow;
          },
          [](const Empirical& e) {
            return std::accumulate(e.samples.begin(), e.samples.end(), 0.0) /
                   static_cast<double>(e.samples.size());
          },
      },
      law_);
}

RuntimeVector RuntimeVector::from_values(std::vector<double> values) {
  RuntimeVector r;
  r.sorted = values;
  std::sort(r.sorted.begin(), r.sorted.end());
  r.values = std::move(values);
  return r;
}

void sample_into(const StragglerDistribution& d, RandomStream& rng, std::vector<double>& out) {
  for (double& v : out) v = d.quantile(rng.uniform());
}

RuntimeVector sample_runtimes(const StragglerDistribution& d, int workers, RandomStream& rng) {
  if (workers < 1) throw std::invalid_argument("sample_runtimes: need at least one worker");
  std::vector<double> values(static_cast<std::size_t>(workers));
  sample_into(d, rng, values);
  return RuntimeVector::from_values(std::move(values));
}

namespace {

// Per-rank Monte-Carlo means of T_(n) (inverse=false) or 1/T_(n).
std::vector<double> order_statistic_means_mc(const StragglerDistribution& d, int workers,
                                             std::uint64_t trials, std::uint64_t seed,
                                             bool inverse) {
  std::vector<long double> acc(static_cast<std::size_t>(workers), 0.0L);
  std::vector<double> draw(static_cast<std::size_t>(workers));
  for (std::uint64_t start = 0; start < trials; start += kTrialsPerSubstream) {
    RandomStream rng = RandomStream::substream(seed, start / kTrialsPerSubstream);
    const std::uint64_t stop = std::min(trials, start + kTrialsPerSubstream);
    for (std::uint64_t j = start; j < stop; ++j) {
      sample_into(d, rng, draw);
      std::sort(draw.begin(), draw.end());
      for (int k = 0; k < workers; ++k) acc[k] += inverse ? 1.0 / draw[k] : draw[k];
    }
  }
  std::vector<double> out(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out[k] = static_cast<double>(acc[k] / static_cast<long double>(trials));
  }
  return out;
}

}  // namespace

double expected_order_statistic(const StragglerDistribution& d, int rank, int workers,
                                const OrderStatisticOptions& opts) {
  check_rank(rank, workers);
  if (const auto* e = d.as_shifted_exponential()) {
    // Exponential spacings: T_(n) - t0 is a sum of independent Exp(mu (N-k)) terms.
    long double h = 0.0L;
    for (int k = workers - rank + 1; k <= workers; ++k) h += 1.0L / k;
    return static_cast<double>(h / e->rate + e->shift);
  }
  return order_statistic_means_mc(d, workers, opts.mc_trials, opts.seed, false)[rank - 1];
}

std::vector<double> expected_order_statistics(const StragglerDistribution& d, int workers,
                                              const OrderStatisticOptions& opts) {
  check_rank(1, workers);
  if (d.as_shifted_exponential() == nullptr) {
    return order_statistic_means_mc(d, workers, opts.mc_trials, opts.seed, false);
  }
  std::vector<double> t(static_cast<std::size_t>(workers));
  for (int n = 1; n <= workers; ++n) t[n - 1] = expected_order_statistic(d, n, workers, opts);
  return t;
}

double inverse_order_statistic_cancellation(const ShiftedExponential& d, int rank, int workers) {
  check_rank(rank, workers);
  const CompensatedSum acc = inverse_moment_terms(d, rank, workers);
  const long double v = std::fabs(acc.value());
  if (v == 0.0L) return kInfinity;
  return static_cast<double>(std::numeric_limits<long double>::epsilon() * acc.magnitude / v);
}

std::vector<double> expected_inverse_order_statistics_mc(const StragglerDistribution& d,
                                                         int workers, std::uint64_t trials,
                                                         std::uint64_t seed) {
  check_rank(1, workers);
  if (trials == 0) throw std::invalid_argument("expected_inverse_order_statistics_mc: zero trials");
  std::vector<double> m = order_statistic_means_mc(d, workers, trials, seed, true);
  for (double& v : m) v = 1.0 / v;
  return m;
}

double expected_inverse_order_statistic(const StragglerDistribution& d, int rank, int workers,
                                        const OrderStatisticOptions& opts) {
  check_rank(rank, workers);
  const auto* e = d.as_shifted_exponential();
  if (e == nullptr) {
    return expected_inverse_order_statistics_mc(d, workers, opts.mc_trials, opts.seed)[rank - 1];
  }
  if (e->shift == 0.0) {
    throw std::domain_error(
        "expected_inverse_order_statistic: zero shift makes E[1/T] diverge on the exact path; "
        "use expected_inverse_order_statistics_mc");
  }
  const CompensatedSum acc = inverse_moment_terms(*e, rank, workers);
  const long double v = acc.value();
  const long double rel =
      v > 0.0L ? std::numeric_limits<long double>::epsilon() * acc.magnitude / v : kInfinity;
  if (rel > opts.cancellation_tolerance) {
    return expected_inverse_order_statistics_mc(d, workers, opts.mc_trials, opts.seed)[rank - 1];
  }
  return static_cast<double>(1.0L / v);
}

std::vector<double> expected_inverse_order_statistics(const StragglerDistribution& d, int workers,
                                                      const OrderStatisticOptions& opts) {
  check_rank(1, workers);
  std::vector<double> out(static_cast<std::size_t>(workers));
  std::vector<double> mc;
  const auto* e = d.as_shifted_exponential();
  if (e != nullptr && e->shift == 0.0) {
    throw std::domain_error(
        "expected_inverse_order_statistics: zero shift makes E[1/T] diverge on the exact path; "
        "use expected_inverse_order_statistics_mc");
  }
  for (int n = 1; n <= workers; ++n) {
    bool exact = false;
    if (e != nullptr) {
      const CompensatedSum acc = inverse_moment_terms(*e, n, workers);
      const long double v = acc.value();
      if (v > 0.0L &&
          std::numeric_limits<long double>::epsilon() * acc.magnitude / v <= opts.cancellation_tolerance) {
        out[n - 1] = static_cast<double>(1.0L / v);
        exact = true;
      }
    }
    if (!exact) {
      if (mc.empty()) mc = expected_inverse_order_statistics_mc(d, workers, opts.mc_trials, opts.seed);
      out[n - 1] = mc[n - 1];
    }
  }
  return out;
}

}  // namespace blockcode
