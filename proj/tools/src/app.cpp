#include "blockcode/cli/app.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>

#include "blockcode/cli/config.hpp"
#include "blockcode/cli/plan.hpp"
#include "blockcode/cli/verify.hpp"
#include "blockcode/codec.hpp"
#include "blockcode/runtime_model.hpp"

namespace blockcode::cli {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string tuple(const std::vector<double>& x) {
  std::string s = "(";
  for (std::size_t n = 0; n < x.size(); ++n) s += (n ? "," : "") + num(x[n]);
  return s + ")";
}

void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets) {
  for (const auto& item : sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw CliError("invalid-value", "--set " + item + " (expected key=value)");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
}

KeyValues load_config(const std::string& path, const std::vector<std::string>& sets) {
  KeyValues kv = read_key_values(path);
  apply_overrides(kv, sets);
  reject_unknown_keys(kv, {"threshold"}, path);
  return kv;
}

double threshold_of(const KeyValues& kv, double flag) {
  if (flag > 0.0) return flag;
  if (kv.count("threshold")) return parse_number("threshold", kv.at("threshold"));
  return 0.0;
}

struct Flags {
  std::string config, alloc, plan, method, metric, level = "quick", seed, write_alloc, output, threshold_text;
  std::vector<std::string> sets;
  std::uint64_t trials = 10'000;
  int iters = 50;
  unsigned jobs = 0;
  bool timing = false;
  double noise = 0.1;
};

int optimize(const Flags& f, Metric metric, std::ostream& out) {
  const KeyValues kv = load_config(f.config, f.sets);
  const SystemConfig cfg = system_config(kv);
  const std::uint64_t seed = resolve_seed(f.seed);
  const double t = threshold_of(kv, f.threshold_text.empty() ? 0.0 : parse_number("threshold", f.threshold_text));
  const SchemeAllocation a = build_scheme(f.method, cfg, metric, t, seed);
  out << "method=" << f.method << '\n';
  if (metric == Metric::CompletionProbability) out << "threshold=" << num(t) << '\n';
  out << "x=" << tuple(a.continuous) << '\n' << "rounded=" << tuple(a.rounded.sizes()) << '\n';
  if (metric == Metric::ExpectedRuntime) {
    const SchemeEvaluation e = evaluate(a.rounded, cfg, metric, t, f.trials, seed);
    out << "expected_runtime=" << num(e.estimate) << " stderr=" << num(e.std_error) << " trials=" << f.trials
        << " seed=" << seed << '\n';
  } else {
    out << "completion_probability=" << num(completion_prob_recursive(a.rounded.sizes(), t, cfg))
        << " continuous=" << num(completion_prob_recursive(a.continuous, t, cfg)) << '\n';
  }
  if (!f.write_alloc.empty()) write_allocation(f.write_alloc, a.rounded.as_integers());
  return 0;
}

int simulate(const Flags& f, std::ostream& out) {
  const KeyValues kv = load_config(f.config, f.sets);
  const SystemConfig cfg = system_config(kv);
  const BlockAllocation x = read_allocation(f.alloc, cfg);
  const Metric metric = parse_metric(f.metric);
  const double t = threshold_of(kv, f.threshold_text.empty() ? 0.0 : parse_number("threshold", f.threshold_text));
  const std::uint64_t seed = resolve_seed(f.seed);
  const SchemeEvaluation e = evaluate(x, cfg, metric, t, f.trials, seed);
  out << "metric,estimate,stderr,trials,seed\n"
      << metric_name(metric) << ',' << num(e.estimate) << ',' << num(e.std_error) << ',' << f.trials << ',' << seed
      << '\n';
  return 0;
}

int sweep(const Flags& f, std::ostream& out) {
  KeyValues kv = read_key_values(f.plan);
  apply_overrides(kv, f.sets);
  ExperimentPlan plan = parse_plan(kv, f.plan, f.seed);
  if (!f.output.empty()) plan.output = f.output;
  RunOptions opts;
  opts.jobs = f.jobs;
  opts.timing = f.timing;
  if (plan.output.empty() || plan.output == "-") {
    run_plan(plan, out, opts);
    return 0;
  }
  std::ofstream file(plan.output, std::ios::binary);
  if (!file) throw CliError("io", "cannot write " + plan.output);
  run_plan(plan, file, opts);
  return 0;
}

int demo_gd(const Flags& f, std::ostream& out) {
  const SystemConfig cfg = system_config(load_config(f.config, f.sets));
  const BlockAllocation x = read_allocation(f.alloc, cfg);
  if (f.iters < 1) throw CliError("invalid-value", "--iters must be >= 1");
  if (cfg.samples != std::floor(cfg.samples)) throw CliError("invalid-config", "demo-gd needs an integer M");
  RandomStream rng(resolve_seed(f.seed));
  const LeastSquaresProblem data =
      make_synthetic_least_squares(static_cast<int>(cfg.samples), cfg.coordinates, f.noise, rng);
  CodedGdOptions opts;
  opts.iterations = f.iters;
  const CodedGdTrace trace = run_coded_gd(data, x, cfg, rng, opts);
  out << "iteration,loss,runtime,cumulative_runtime,gradient_error\n";
  for (const CodedGdStep& s : trace.steps) {
    out << s.iteration << ',' << num(s.loss) << ',' << num(s.runtime) << ',' << num(s.cumulative_runtime) << ','
        << num(s.gradient_error) << '\n';
  }
  return 0;
}

int verify(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.level != "quick" && f.level != "full") throw CliError("invalid-value", "--level " + f.level);
  const VerifyLevel level = f.level == "quick" ? VerifyLevel::Quick : VerifyLevel::Full;
  int passed = 0, failed = 0;
  run_checks(level, resolve_seed(f.seed), [&](const CheckResult& r) {
    (r.passed ? passed : failed)++;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n' << std::flush;
  });
  out << "verify level=" << f.level << " passed=" << passed << " failed=" << failed << '\n';
  if (failed > 0) {
    err << "error: verify-failed: " << failed << " of " << passed + failed << " checks failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block coordinate gradient coding: allocation optimizers, simulation and sweeps", "blockcode"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", f.seed, "RNG seed (falls back to BLOCKCODE_SEED, then 1)");
    sub->add_option("--set", f.sets, "Override a config key, key=value (repeatable)");
  };

  auto* opt_rt = app.add_subcommand("optimize-runtime", "Minimize expected runtime");
  opt_rt->add_option("--config", f.config, "System config file")->required();
  opt_rt->add_option("--method", f.method, "alg1 | closed-t | closed-f")
      ->check(CLI::IsMember({"alg1", "closed-t", "closed-f"}))
      ->default_str("alg1");
  opt_rt->add_option("--trials", f.trials, "Monte-Carlo trials for the reported estimate");
  opt_rt->add_option("--write-alloc", f.write_alloc, "Write the rounded allocation to this file");
  common(opt_rt);

  auto* opt_cdf = app.add_subcommand("optimize-cdf", "Maximize the completion probability at a threshold");
  opt_cdf->add_option("--config", f.config, "System config file")->required();
  opt_cdf->add_option("--threshold", f.threshold_text, "Threshold t (or the config key threshold)");
  opt_cdf->add_option("--method", f.method, "ssca | closed-lgt")->check(CLI::IsMember({"ssca", "closed-lgt"}));
  opt_cdf->add_option("--write-alloc", f.write_alloc, "Write the rounded allocation to this file");
  common(opt_cdf);

  auto* sim = app.add_subcommand("simulate", "Evaluate an allocation file by Monte Carlo");
  sim->add_option("--config", f.config, "System config file")->required();
  sim->add_option("--alloc", f.alloc, "Allocation file")->required();
  sim->add_option("--metric", f.metric, "expected-runtime | completion-probability")->required();
  sim->add_option("--threshold", f.threshold_text, "Threshold t for completion-probability");
  sim->add_option("--trials", f.trials, "Monte-Carlo trials");
  common(sim);

  auto* sw = app.add_subcommand("sweep", "Run an experiment plan and write CSV");
  sw->add_option("--plan", f.plan, "Plan file")->required();
  sw->add_option("--output", f.output, "CSV path, - for standard output (overrides the plan)");
  sw->add_option("--jobs", f.jobs, "Worker threads, 0 for all cores");
  sw->add_flag("--timing", f.timing, "Record wall_ms per cell (otherwise 0)");
  common(sw);

  auto* demo = app.add_subcommand("demo-gd", "Coded gradient descent on a synthetic least-squares problem");
  demo->add_option("--config", f.config, "System config file")->required();
  demo->add_option("--alloc", f.alloc, "Allocation file")->required();
  demo->add_option("--iters", f.iters, "Iterations");
  demo->add_option("--noise", f.noise, "Target noise level");
  common(demo);

  auto* ver = app.add_subcommand("verify", "Run the oracle self-checks");
  ver->add_option("--level", f.level, "quick | full");
  ver->add_option("--seed", f.seed, "RNG seed (falls back to BLOCKCODE_SEED, then 1)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (opt_rt->parsed()) {
      if (f.method.empty()) f.method = "alg1";
      return optimize(f, Metric::ExpectedRuntime, out);
    }
    if (opt_cdf->parsed()) {
      if (f.method.empty()) f.method = "ssca";
      return optimize(f, Metric::CompletionProbability, out);
    }
    if (sim->parsed()) return simulate(f, out);
    if (sw->parsed()) return sweep(f, out);
    if (demo->parsed()) return demo_gd(f, out);
    return verify(f, out, err);
  } catch (const CliError& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: invalid-argument: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace blockcode::cli
