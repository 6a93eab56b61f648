#pragma once

// Slow, direct reference computations. Nothing here shares code paths with
// the optimized implementations it is used to check.

#include <cstdint>
#include <functional>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/catalan.hpp"

namespace blockcode::oracles {

/// K_0(N) by filtering every vector in {0..N}^N.
std::vector<BallotVector> brute_force_ballot_vectors(int length);

/// Pr(k_n = v | prefix) as frequencies among brute-force ballot vectors.
std::vector<Rational> enumerated_conditional(int length, const BallotVector& prefix);

/// Euclidean projection onto {x >= 0, sum x = total} by trying every active set.
std::vector<double> projection_by_active_sets(const std::vector<double>& point, double total);

/// argmax h^T (x - x_prev) - tau |x - x_prev|^2 on the scaled simplex, from
/// the KKT system of each active set.
std::vector<double> proximal_step_by_active_sets(const std::vector<double>& x_prev, const std::vector<double>& h,
                                                 double tau, double total);

/// Central differences with a per-coordinate step of rel_step * max(1, |x_j|).
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double rel_step = 1e-6);

/// E[tau_hat(x, T)] for N = 2 by integrating the survival function of the
/// runtime with adaptive Gauss-Kronrod quadrature.
double expected_runtime_two_workers(const std::vector<double>& x, const SystemConfig& cfg);

/// E[1/T] of a single worker by quadrature of f(t)/t.
double inverse_mean_by_quadrature(double rate, double shift);

/// e^y E1(y) as the integral of e^{-y u} / (1 + u) over u >= 0.
double scaled_e1_by_quadrature(double y);

struct OrderMoments {
  std::vector<double> mean;          // E[T_(n)]
  std::vector<double> mean_se;
  std::vector<double> inverse_mean;  // E[1/T_(n)]
  std::vector<double> inverse_se;
};

/// Monte-Carlo order-statistic moments with a private std::mt19937_64 and
/// std::exponential_distribution.
OrderMoments order_statistic_moments(double rate, double shift, int workers, std::uint64_t trials,
                                     std::uint64_t seed);

/// Calls fn(x) for every nonnegative integer x of length N summing to L.
void for_each_composition(int total, int length, const std::function<void(const std::vector<long long>&)>& fn);

/// Mean and standard error of a sample.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& v);

}  // namespace blockcode::oracles
