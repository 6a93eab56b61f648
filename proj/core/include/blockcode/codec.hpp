#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "blockcode/allocation.hpp"
#include "blockcode/random.hpp"

namespace blockcode {

/// Data subsets held by each worker: worker n (0-based) holds the cyclic
/// window {n, n+1, ..., n+s_max} mod N.
struct WorkerAllocation {
  int workers = 0;
  int max_redundancy = 0;
  std::vector<std::vector<int>> subsets;
};

WorkerAllocation allocate(int workers, int max_redundancy);

/// Encoding matrix for one redundancy level s. Row n is supported on the
/// cyclic window of size s + 1 starting at n, and the all-ones vector is a
/// combination of any N - s rows. Decoding coefficients are cached per
/// worker subset, so a CodeBlock must not be shared across threads.
class CodeBlock {
 public:
  CodeBlock() = default;
  CodeBlock(int redundancy, Eigen::MatrixXd encoding);

  int workers() const { return static_cast<int>(encoding_.rows()); }
  int redundancy() const noexcept { return redundancy_; }
  const Eigen::MatrixXd& encoding() const noexcept { return encoding_; }

  /// Coefficients a (one per listed worker, ascending ids) with
  /// a^T B_W = 1^T, or nullopt when the subset cannot recover the sum.
  std::optional<Eigen::VectorXd> decoding_coefficients(const std::vector<int>& subset) const;

 private:
  int redundancy_ = 0;
  Eigen::MatrixXd encoding_;
  mutable std::map<std::uint64_t, std::optional<Eigen::VectorXd>> cache_;
};

/// Random code on the cyclic support: rows span the null space of a random
/// s x N matrix H with H 1 = 0. Every (N - s)-subset is checked (sampled
/// beyond N = 12); failing codes are redrawn up to 10 times, then
/// std::runtime_error.
CodeBlock build_code(int workers, int redundancy, RandomStream& rng);

/// Wraps a given matrix after checking its support. Throws std::invalid_argument.
CodeBlock code_from_matrix(const Eigen::MatrixXd& encoding, int redundancy);

/// Whether every (N - s)-subset decodes (all subsets up to `exhaustive_limit`
/// workers, otherwise `samples` random subsets drawn from rng).
bool check_decodability(const CodeBlock& block, RandomStream& rng, int exhaustive_limit = 12,
                        int samples = 256);

/// Sum of the uncoded values from coded values c_n = sum_j B_nj g_j of the
/// workers in `received`. Throws std::invalid_argument when fewer than
/// N - s workers reported, std::runtime_error naming the subset when it is
/// numerically singular.
Eigen::VectorXd decode(const CodeBlock& block, const std::map<int, Eigen::VectorXd>& received);

/// Least-squares instance: loss(theta) = |A theta - y|^2 / (2 m).
struct LeastSquaresProblem {
  Eigen::MatrixXd features;
  Eigen::VectorXd targets;

  double loss(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
};

LeastSquaresProblem make_synthetic_least_squares(int samples, int coordinates, double noise, RandomStream& rng);

struct CodedGdOptions {
  int iterations = 50;
  /// 0 selects 1 / lambda_max(A^T A / m).
  double step_size = 0.0;
  /// Worker times used every iteration instead of fresh draws.
  std::optional<std::vector<double>> fixed_times;
};

struct CodedGdStep {
  int iteration = 0;
  double loss = 0.0;
  double runtime = 0.0;
  double cumulative_runtime = 0.0;
  /// max_l |decoded_l - centralized_l| / max |centralized|.
  double gradient_error = 0.0;
};

struct CodedGdTrace {
  std::vector<CodedGdStep> steps;
  /// iterates[k] is theta after k steps, starting from zero.
  std::vector<Eigen::VectorXd> iterates;
};

/// Gradient descent where every partial derivative is recovered from the
/// fastest workers of its block. Rows of the dataset are split evenly over
/// the N workers; the simulated per-iteration runtime equals runtime_of_x.
CodedGdTrace run_coded_gd(const LeastSquaresProblem& data, const BlockAllocation& x, const SystemConfig& cfg,
                          RandomStream& rng, const CodedGdOptions& opts = {});

/// Plain gradient descent from zero; iterates[k] is theta after k steps.
std::vector<Eigen::VectorXd> centralized_gd(const LeastSquaresProblem& data, int iterations, double step_size);

}  // namespace blockcode
