#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/straggler_model.hpp"

namespace blockcode {

enum class Metric { ExpectedRuntime, CompletionProbability };

std::string_view metric_name(Metric m) noexcept;

/// Point estimate with its standard error (0 for analytic values).
struct SchemeEvaluation {
  Metric metric = Metric::ExpectedRuntime;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Overall runtime tau(s, T): the master recovers coordinate l once the
/// N - s_l fastest workers have processed it.
double runtime_of_s(const CodingVector& s, const RuntimeVector& T, const SystemConfig& cfg);

/// Block form tau_hat(x, T) = (M/N) b max_n T_(N-n) S_n. Equals runtime_of_s
/// on x_to_s(x) bit for bit for integer x.
double runtime_of_x(const std::vector<double>& x, const RuntimeVector& T, const SystemConfig& cfg);
double runtime_of_x(const BlockAllocation& x, const RuntimeVector& T, const SystemConfig& cfg);

/// Inner loop form: `prefix` from weighted_prefix_sums, `sorted` ascending.
/// Returns max_n sorted[N-1-n] * prefix[n] without the (M/N) b factor.
double runtime_kernel(const std::vector<double>& prefix, const std::vector<double>& sorted);

/// Index n attaining the maximum in runtime_kernel; smallest on ties.
int runtime_argmax(const std::vector<double>& prefix, const std::vector<double>& sorted);

/// Per-trial values tau_hat(x, T_j). Trial j always sees the same T_j for a
/// given seed, so different allocations are compared on common random numbers.
std::vector<double> runtime_samples(const std::vector<double>& x, const SystemConfig& cfg,
                                    std::uint64_t trials, std::uint64_t seed);

/// Sorted runtime vectors T_j for trials [first, first + count).
std::vector<std::vector<double>> sorted_runtime_draws(const SystemConfig& cfg, std::uint64_t first,
                                                      std::uint64_t count, std::uint64_t seed);

SchemeEvaluation expected_runtime_mc(const std::vector<double>& x, const SystemConfig& cfg,
                                     std::uint64_t trials, std::uint64_t seed);

/// Largest N for which the exact completion probability is enumerated.
inline constexpr int kMaxExactWorkers = 15;

/// P_hat(x, t) = Pr[tau_hat(x, T) <= t] summed exactly over ballot vectors.
/// Throws std::length_error beyond kMaxExactWorkers; use completion_prob_mc.
double completion_prob_exact(const std::vector<double>& x, double t, const SystemConfig& cfg);

/// Same value as completion_prob_exact, by dynamic programming over the
/// running ballot sum instead of enumeration. O(N^3), no size limit.
double completion_prob_recursive(const std::vector<double>& x, double t, const SystemConfig& cfg);

SchemeEvaluation completion_prob_mc(const std::vector<double>& x, double t,
                                    const SystemConfig& cfg, std::uint64_t trials,
                                    std::uint64_t seed);
/// Same estimator evaluated through tau(s, T).
SchemeEvaluation completion_prob_mc(const CodingVector& s, double t, const SystemConfig& cfg,
                                    std::uint64_t trials, std::uint64_t seed);

/// Large-threshold equivalent of 1 - P_hat(x, t) for the shifted exponential:
///   sum_{n in A*} C(N, n+1) e^{mu t0 (n+1)} * exp(-mu N r* t / (M b)),
/// r* = min over blocks with x_n > 0 of (n+1)/S_n, A* the minimizing blocks.
/// Throws std::invalid_argument for other laws.
double asymptotic_failure(const std::vector<double>& x, double t, const SystemConfig& cfg);

/// Upper bound on asymptotic_failure: coefficient summed over every n, rate
/// minimized over every n with S_n > 0.
double failure_upper_bound(const std::vector<double>& x, double t, const SystemConfig& cfg);

}  // namespace blockcode
