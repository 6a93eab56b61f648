#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/random.hpp"

namespace blockcode {

/// Fills `sorted` (length N) with one ascending draw of the worker times.
using TimeSampler = std::function<void(RandomStream&, std::vector<double>& sorted)>;

struct SubgradientSolverOptions {
  int iterations = 2000;
  int samples = 10;
  /// sigma_0 in sigma_i = sigma_0 / i; 0 selects 0.1 L / |P g(x_0)| with P
  /// removing the mean, so the first step moves about 0.1 L within the simplex.
  double step_scale = 0.0;
  std::uint64_t seed = 1;
  int check_interval = 50;
  std::uint64_t check_trials = 1000;
  /// Consecutive checks without min_improvement relative gain before stopping.
  int patience = 5;
  double min_improvement = 1e-4;
  /// Iterates averaged into each checked candidate; 0 checks the raw iterate.
  int averaging_window = 0;
  /// Starting point; defaults to the deterministic-times closed form.
  std::optional<std::vector<double>> initial;
};

struct RuntimeSolution {
  std::vector<double> x;
  /// Mean runtime of x over the check draws.
  double objective = 0.0;
  double std_error = 0.0;
  int iterations = 0;
  double step_scale = 0.0;
  /// (iteration, checked objective) pairs in order.
  std::vector<std::pair<int, double>> history;
};

/// Subgradient of (1/S) sum_j tau_hat(x, t^j) over ascending draws t^j:
/// average of (M b / N) t^j_(N-n*) (1, 2, ..., n*+1, 0, ..., 0) with n* the
/// smallest maximizing block.
std::vector<double> noisy_subgradient(const std::vector<double>& x,
                                      const std::vector<std::vector<double>>& sorted_draws,
                                      const SystemConfig& cfg);

/// Stochastic projected subgradient descent on E[tau_hat(x, T)] over the
/// scaled simplex, reporting the best checked iterate.
RuntimeSolution solve_expected_runtime(const SystemConfig& cfg, const SubgradientSolverOptions& opts = {});
RuntimeSolution solve_expected_runtime(const SystemConfig& cfg, const SubgradientSolverOptions& opts,
                                       const TimeSampler& sampler);

/// Minimizer of tau_hat(x, t) for a fixed ascending time vector t: the
/// allocation that makes every t_{N-n} S_n equal.
std::vector<double> equalizing_allocation(const std::vector<double>& t, double total);

/// Equalizing allocation at t_n = E[T_(n)].
std::vector<double> closed_form_deterministic_times(const SystemConfig& cfg);
/// Equalizing allocation at t'_n = 1 / E[1 / T_(n)].
std::vector<double> closed_form_deterministic_frequencies(const SystemConfig& cfg);

/// Computable multiplicative-gap bounds on E[tau_hat] of the two closed forms
/// relative to the optimum, for the shifted exponential with positive shift.
double deterministic_times_gap_bound(const SystemConfig& cfg);
double deterministic_frequencies_gap_bound(const SystemConfig& cfg);

}  // namespace blockcode
