#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/runtime_model.hpp"

namespace blockcode {

/// Cost of a candidate allocation; lower is better.
using AllocationObjective = std::function<double(const std::vector<double>&)>;

/// Floors plus one unit to each of the largest remainders (ties to the lower
/// index) so the result sums to round(sum(x)).
std::vector<long long> largest_remainder_round(const std::vector<double>& x);

/// Largest-remainder rounding followed by first-improvement single-unit moves
/// between blocks, at most max_moves accepted moves (0 selects 10 N).
/// Integer input is returned unchanged.
BlockAllocation round_allocation(const std::vector<double>& x, const AllocationObjective& objective,
                                 int max_moves = 0);

/// Mean runtime over `trials` fixed common-random-number draws.
AllocationObjective make_runtime_objective(const SystemConfig& cfg, std::uint64_t trials, std::uint64_t seed);
/// Exact failure probability 1 - P_hat(x, t).
AllocationObjective make_failure_objective(const SystemConfig& cfg, double t);

struct SchemeSpec {
  std::string name;
  BlockAllocation allocation;
  std::string provenance;
};

/// Best allocation with a single nonzero block, x = L e_n. Expected runtime
/// is compared on common random numbers, completion probability exactly.
SchemeSpec single_bcgc(const SystemConfig& cfg, Metric metric, double t, std::uint64_t trials,
                       std::uint64_t seed);

struct SchemeRow {
  std::string name;
  SchemeEvaluation evaluation;
};

/// Evaluates every scheme on the same draws (same seed).
std::vector<SchemeRow> compare_schemes(const std::vector<SchemeSpec>& schemes, const SystemConfig& cfg,
                                       Metric metric, double t, std::uint64_t trials, std::uint64_t seed);

/// Paired relative runtime gain 1 - E[tau(a)] / E[tau(b)] on common draws,
/// with a delta-method standard error.
struct PairedGain {
  double gain = 0.0;
  double std_error = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};
PairedGain paired_runtime_gain(const std::vector<double>& a, const std::vector<double>& b,
                               const SystemConfig& cfg, std::uint64_t trials, std::uint64_t seed);

}  // namespace blockcode
