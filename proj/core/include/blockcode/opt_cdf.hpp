#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/catalan.hpp"

namespace blockcode {

struct SscaSolverOptions {
  int iterations = 3000;
  /// Proximal weight of the surrogate, relative to the warm-up gradient
  /// magnitude per unit of L (see solve_completion_probability).
  double proximal_weight = 1.0;
  /// Each start is run once per multiple of proximal_weight listed here; the
  /// good weight varies by orders of magnitude with N and t.
  std::vector<double> proximal_scales = {0.3, 1.0, 3.0};
  double sigma_exponent = 0.7;
  double gamma_exponent = 1.0;
  /// sigma_i = (i + offset)^-a_sigma, gamma_i = (i + offset)^-a_gamma. A
  /// positive offset keeps the first iterates from jumping on one sample.
  int step_offset = 300;
  std::uint64_t seed = 1;
  int check_interval = 100;
  /// Scores candidates with the exact probability when true, otherwise with
  /// check_trials common-random-number draws.
  bool exact_objective = true;
  std::uint64_t check_trials = 10'000;
  int warmup_samples = 64;
  /// Start also from closed_form_large_t when t exceeds this multiple of the
  /// median runtime of the uniform allocation; 0 disables.
  double warm_start_factor = 10.0;
  std::optional<std::vector<double>> initial;
};

struct CdfSolution {
  std::vector<double> x;
  double probability = 0.0;
  double std_error = 0.0;
  int iterations = 0;
  /// "uniform", "large-t" or "initial".
  std::string start;
  /// Proximal weight of the winning run.
  double proximal_weight = 0.0;
  std::vector<std::pair<int, double>> history;
};

/// Summand g(x, t, k) of the completion probability:
///   N!/prod k_n! * prod_{n<N-1} (F(c_n) - F(c_{n+1}))^{k_n} * F(c_{N-1})^{k_{N-1}},
/// c_n = t / ((M/N) b S_n).
double g_value(const std::vector<double>& x, double t, const BallotVector& k, const SystemConfig& cfg);

/// Analytic gradient of g_value in x. The density is taken from above at a
/// kink of the law.
std::vector<double> g_gradient(const std::vector<double>& x, double t, const BallotVector& k,
                               const SystemConfig& cfg);

/// argmax_x h^T (x - x_prev) - tau ||x - x_prev||^2 over the scaled simplex.
std::vector<double> ssca_subproblem(const std::vector<double>& x_prev, const std::vector<double>& h,
                                    double tau, double total);

/// Stochastic successive convex approximation for max_x P_hat(x, t).
CdfSolution solve_completion_probability(const SystemConfig& cfg, double t,
                                         const SscaSolverOptions& opts = {});

/// x_0 = L / H_N, x_n = x_0 / (n + 1).
std::vector<double> closed_form_large_t(const SystemConfig& cfg);

/// True iff the equalizing allocation at t_n = 1/(N-n+1) reproduces
/// closed_form_large_t to 1e-12 relative.
bool verify_large_t_reduction(const SystemConfig& cfg);

/// Whether sigma_i = i^-a_sigma, gamma_i = i^-a_gamma meet the SSCA step
/// conditions (0.5 < a_sigma < a_gamma <= 1).
bool stepsize_conditions_hold(double sigma_exponent, double gamma_exponent);

}  // namespace blockcode
