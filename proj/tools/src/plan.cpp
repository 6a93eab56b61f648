#include "blockcode/cli/plan.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "blockcode/opt_cdf.hpp"
#include "blockcode/opt_runtime.hpp"
#include "blockcode/schemes.hpp"

namespace blockcode::cli {
namespace {

constexpr std::uint64_t kRoundingTrials = 2000;

const std::vector<std::string> kSchemes = {"alg1", "closed-t", "closed-f", "ssca", "closed-lgt", "single-bcgc"};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

bool needs_threshold(const std::string& scheme, Metric metric) {
  return scheme == "ssca" || metric == Metric::CompletionProbability;
}

struct Cell {
  std::size_t value_index = 0;
  std::string scheme;
  SchemeEvaluation evaluation;
  long long wall_ms = 0;
  std::string status = "ok";
};

}  // namespace

Metric parse_metric(const std::string& value) {
  if (value == "expected-runtime" || value == "expected_runtime") return Metric::ExpectedRuntime;
  if (value == "completion-probability" || value == "completion_probability") return Metric::CompletionProbability;
  throw CliError("invalid-value", "metric=" + value);
}

SchemeAllocation build_scheme(const std::string& name, const SystemConfig& cfg, Metric metric, double t,
                              std::uint64_t seed) {
  if (needs_threshold(name, metric) && !(t > 0.0)) throw CliError("invalid-value", name + " needs a positive threshold");
  const AllocationObjective objective = metric == Metric::ExpectedRuntime
                                            ? make_runtime_objective(cfg, kRoundingTrials, seed ^ 0x7011ULL)
                                            : make_failure_objective(cfg, t);
  SchemeAllocation out;
  out.name = name;
  auto closed = [&](std::vector<double> x) {
    out.continuous = std::move(x);
    out.rounded = BlockAllocation::integer(largest_remainder_round(out.continuous));
  };
  if (name == "alg1") {
    SubgradientSolverOptions opts;
    opts.seed = seed;
    out.continuous = solve_expected_runtime(cfg, opts).x;
    out.rounded = round_allocation(out.continuous, objective);
  } else if (name == "ssca") {
    SscaSolverOptions opts;
    opts.seed = seed;
    out.continuous = solve_completion_probability(cfg, t, opts).x;
    out.rounded = round_allocation(out.continuous, objective);
  } else if (name == "closed-t") {
    closed(closed_form_deterministic_times(cfg));
  } else if (name == "closed-f") {
    closed(closed_form_deterministic_frequencies(cfg));
  } else if (name == "closed-lgt") {
    closed(closed_form_large_t(cfg));
  } else if (name == "single-bcgc") {
    out.rounded = single_bcgc(cfg, metric, t, kRoundingTrials, seed).allocation;
    out.continuous = out.rounded.sizes();
  } else {
    throw CliError("invalid-value", "unknown scheme " + name);
  }
  return out;
}

SchemeEvaluation evaluate(const BlockAllocation& x, const SystemConfig& cfg, Metric metric, double t,
                          std::uint64_t trials, std::uint64_t seed) {
  if (metric == Metric::ExpectedRuntime) return expected_runtime_mc(x.sizes(), cfg, trials, seed);
  if (!(t > 0.0)) throw CliError("invalid-value", "completion probability needs a positive threshold");
  return completion_prob_mc(x.sizes(), t, cfg, trials, seed);
}

ExperimentPlan parse_plan(const KeyValues& kv, const std::string& source, const std::string& seed_flag) {
  reject_unknown_keys(kv, {"sweep", "values", "metric", "schemes", "threshold", "trials", "seed", "output"}, source);
  ExperimentPlan plan;
  for (const auto& [key, value] : kv) {
    if (is_system_key(key)) plan.base[key] = value;
  }
  for (const char* required : {"sweep", "values", "metric", "schemes"}) {
    if (!kv.count(required)) throw CliError("invalid-config", source + ": missing key " + required);
  }
  plan.axis = kv.at("sweep");
  if (plan.axis != "N" && plan.axis != "mu" && plan.axis != "L" && plan.axis != "t") {
    throw CliError("invalid-value", "sweep=" + plan.axis + " (expected N, mu, L or t)");
  }
  for (const auto& v : split_list(kv.at("values"))) {
    plan.values.push_back(plan.axis == "N" || plan.axis == "L" ? static_cast<double>(parse_integer(plan.axis, v))
                                                               : parse_number(plan.axis, v));
  }
  if (plan.values.empty()) throw CliError("invalid-config", source + ": empty sweep value list");
  plan.metric = parse_metric(kv.at("metric"));
  plan.schemes = split_list(kv.at("schemes"));
  if (plan.schemes.empty()) throw CliError("invalid-config", source + ": empty scheme list");
  for (const auto& s : plan.schemes) {
    if (std::find(kSchemes.begin(), kSchemes.end(), s) == kSchemes.end()) {
      throw CliError("invalid-value", "unknown scheme " + s);
    }
  }
  if (kv.count("threshold")) plan.threshold = parse_number("threshold", kv.at("threshold"));
  if (kv.count("trials")) {
    const long long trials = parse_integer("trials", kv.at("trials"));
    if (trials < 1) throw CliError("invalid-value", "trials must be >= 1");
    plan.trials = static_cast<std::uint64_t>(trials);
  }
  const std::string plan_seed = kv.count("seed") ? kv.at("seed") : "";
  plan.seed = resolve_seed(seed_flag.empty() ? plan_seed : seed_flag);
  if (kv.count("output")) plan.output = kv.at("output");

  bool threshold_used = plan.axis == "t" || plan.metric == Metric::CompletionProbability;
  for (const auto& s : plan.schemes) threshold_used = threshold_used || needs_threshold(s, plan.metric);
  if (threshold_used && plan.axis != "t" && !(plan.threshold > 0.0)) {
    throw CliError("invalid-config", source + ": a positive threshold is required");
  }
  // Validate the base system once so config errors stop the run early.
  KeyValues probe = plan.base;
  if (plan.axis == "N" || plan.axis == "L") probe[plan.axis] = format_double(plan.values.front());
  if (plan.axis == "mu") probe["dist.mu"] = format_double(plan.values.front());
  const SystemConfig cfg = system_config(probe);
  if (plan.axis == "mu" && cfg.dist.as_shifted_exponential() == nullptr) {
    throw CliError("invalid-config", source + ": sweep=mu needs dist.kind=shifted-exponential");
  }
  return plan;
}

void run_plan(const ExperimentPlan& plan, std::ostream& out, const RunOptions& opts) {
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < plan.values.size(); ++v) {
    for (const auto& s : plan.schemes) cells.push_back(Cell{v, s, {}, 0, "ok"});
  }

  auto run_cell = [&](Cell& cell) {
    const auto start = std::chrono::steady_clock::now();
    const double value = plan.values[cell.value_index];
    try {
      KeyValues kv = plan.base;
      double t = plan.threshold;
      if (plan.axis == "N" || plan.axis == "L") kv[plan.axis] = format_double(value);
      if (plan.axis == "mu") kv["dist.mu"] = format_double(value);
      if (plan.axis == "t") t = value;
      const SystemConfig cfg = system_config(kv);
      const SchemeAllocation a = build_scheme(cell.scheme, cfg, plan.metric, t, plan.seed);
      cell.evaluation = evaluate(a.rounded, cfg, plan.metric, t, plan.trials, plan.seed);
    } catch (const std::exception& e) {
      cell.evaluation.metric = plan.metric;
      cell.evaluation.estimate = std::numeric_limits<double>::quiet_NaN();
      cell.evaluation.std_error = std::numeric_limits<double>::quiet_NaN();
      cell.status = std::string("error: ") + e.what();
    }
    if (opts.timing) {
      cell.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                         .count();
    }
  };

  unsigned jobs = opts.jobs != 0 ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  out << kCsvHeader << '\n';
  for (const Cell& c : cells) {
    out << plan.axis << ',' << format_double(plan.values[c.value_index]) << ',' << c.scheme << ','
        << metric_name(plan.metric) << ',' << format_double(c.evaluation.estimate) << ','
        << format_double(c.evaluation.std_error) << ',' << plan.trials << ',' << plan.seed << ',' << c.wall_ms << ','
        << csv_field(c.status) << '\n';
  }
}

}  // namespace blockcode::cli
