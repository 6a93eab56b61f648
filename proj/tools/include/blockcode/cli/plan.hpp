#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/cli/config.hpp"
#include "blockcode/runtime_model.hpp"

namespace blockcode::cli {

Metric parse_metric(const std::string& value);

/// Output of one allocation scheme before evaluation.
struct SchemeAllocation {
  std::string name;
  std::vector<double> continuous;
  BlockAllocation rounded;
};

/// Builds the allocation of a named scheme:
///   alg1, closed-t, closed-f   expected-runtime designs
///   ssca, closed-lgt           completion-probability designs (need t)
///   single-bcgc                best single nonzero block under `metric`
/// Closed forms are rounded by largest remainder; solver outputs by
/// largest remainder plus local search on the metric's objective.
SchemeAllocation build_scheme(const std::string& name, const SystemConfig& cfg, Metric metric, double t,
                              std::uint64_t seed);

/// Monte-Carlo estimate of the metric on `trials` draws from `seed`.
SchemeEvaluation evaluate(const BlockAllocation& x, const SystemConfig& cfg, Metric metric, double t,
                          std::uint64_t trials, std::uint64_t seed);

struct ExperimentPlan {
  KeyValues base;  // system keys of the plan file
  std::string axis;  // N | mu | L | t
  std::vector<double> values;
  Metric metric = Metric::ExpectedRuntime;
  std::vector<std::string> schemes;
  double threshold = 0.0;  // unused unless metric is completion probability
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 1;
  std::string output;  // empty or "-" for standard output
};

/// Plan keys: system keys plus sweep, values, metric, schemes, threshold,
/// trials, seed, output. `seed_flag` follows resolve_seed; a plan seed key
/// is used when the flag is empty.
ExperimentPlan parse_plan(const KeyValues& kv, const std::string& source, const std::string& seed_flag = "");

struct RunOptions {
  unsigned jobs = 0;    // 0 selects the hardware concurrency
  bool timing = false;  // wall_ms stays 0 otherwise, keeping output byte-stable
};

inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,scheme,metric,estimate,stderr,trials,seed,wall_ms,status";

/// Writes the header and one row per (sweep value, scheme) in plan order.
/// A failing cell yields nan estimates and its error message as status.
void run_plan(const ExperimentPlan& plan, std::ostream& out, const RunOptions& opts = {});

}  // namespace blockcode::cli
