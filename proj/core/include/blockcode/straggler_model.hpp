#pragma once

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "blockcode/random.hpp"

namespace blockcode {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// F(t) = 1 - exp(-rate (t - shift)) for t >= shift.
struct ShiftedExponential {
  double rate = 1.0;
  double shift = 0.0;
};

/// Two-point law: `slow` with probability p, `fast` otherwise. `slow` may be
/// +inf to model a worker that never finishes.
struct Bernoulli {
  double p = 0.0;
  double fast = 1.0;
  double slow = kInfinity;
};

/// Uniform law over a finite sample set (kept sorted).
struct Empirical {
  std::vector<double> samples;
};

/// I.i.d. cycle-time law of a single worker. Immutable after construction.
class StragglerDistribution {
 public:
  using Law = std::variant<ShiftedExponential, Bernoulli, Empirical>;

  /// Validates parameters; throws std::invalid_argument.
  explicit StragglerDistribution(Law law);
  StragglerDistribution() : StragglerDistribution(ShiftedExponential{}) {}

  static StragglerDistribution shifted_exponential(double rate, double shift) {
    return StragglerDistribution(ShiftedExponential{rate, shift});
  }

  const Law& law() const noexcept { return law_; }
  const ShiftedExponential* as_shifted_exponential() const noexcept {
    return std::get_if<ShiftedExponential>(&law_);
  }

  double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation where possible.
  double survival(double x) const;
  /// Density for the continuous kind; one-sided from above at the shift.
  /// Zero for the discrete kinds.
  double density(double x) const;
  /// Smallest x with cdf(x) >= u, for u in (0, 1).
  double quantile(double u) const;
  double support_min() const;
  /// +inf when the law has an atom at +inf.
  double mean() const;

 private:
  Law law_;
};

/// Cycle times of the N workers of one iteration.
struct RuntimeVector {
  std::vector<double> values;
  /// Ascending copy; sorted[k-1] is the k-th order statistic T_(k).
  std::vector<double> sorted;

  static RuntimeVector from_values(std::vector<double> values);
};

/// Draws N i.i.d. times by inversion, consuming exactly N uniforms.
RuntimeVector sample_runtimes(const StragglerDistribution& d, int workers, RandomStream& rng);

/// Inversion into a caller-owned buffer (left unsorted).
void sample_into(const StragglerDistribution& d, RandomStream& rng, std::vector<double>& out);

struct OrderStatisticOptions {
  std::uint64_t mc_trials = 1'000'000;
  std::uint64_t seed = 0x5eed;
  /// Relative cancellation estimate above which the exact alternating sum
  /// is abandoned for Monte Carlo.
  double cancellation_tolerance = 1e-6;
};

/// t_n = E[T_(n)] for rank 1 <= n <= N. Closed form for the shifted
/// exponential, Monte Carlo otherwise.
double expected_order_statistic(const StragglerDistribution& d, int rank, int workers,
                                const OrderStatisticOptions& opts = {});
std::vector<double> expected_order_statistics(const StragglerDistribution& d, int workers,
                                              const OrderStatisticOptions& opts = {});

/// t'_n = 1 / E[1 / T_(n)]. Exact alternating sum for the shifted exponential
/// with positive shift; Monte Carlo for other kinds or when the sum loses
/// too many digits. Throws std::domain_error for a zero shift (the exact
/// integral diverges); use expected_inverse_order_statistic_mc instead.
double expected_inverse_order_statistic(const StragglerDistribution& d, int rank, int workers,
                                        const OrderStatisticOptions& opts = {});
std::vector<double> expected_inverse_order_statistics(const StragglerDistribution& d,
                                                      int workers,
                                                      const OrderStatisticOptions& opts = {});

/// Monte-Carlo estimate of 1/E[1/T_(n)] for every rank, from one shared set
/// of draws.
std::vector<double> expected_inverse_order_statistics_mc(const StragglerDistribution& d,
                                                         int workers, std::uint64_t trials,
                                                         std::uint64_t seed);

/// Relative cancellation estimate eps * sum|terms| / |sum| of the exact
/// alternating sum for E[1/T_(n)]. Exposed for diagnostics.
double inverse_order_statistic_cancellation(const ShiftedExponential& d, int rank, int workers);

}  // namespace blockcode
