#pragma once

#include <cstdint>
#include <vector>

#include "blockcode/straggler_model.hpp"

namespace blockcode {

/// N workers, L coordinates, M samples, b cycles per partial derivative.
struct SystemConfig {
  int workers = 1;
  int coordinates = 1;
  double samples = 1.0;
  double cycles_per_derivative = 1.0;
  StragglerDistribution dist;

  /// Throws std::invalid_argument on a nonpositive field.
  void validate() const;
  /// (M / N) * b, the per-unit-work time factor.
  double work_scale() const { return samples / workers * cycles_per_derivative; }
};

/// Redundancy level s_l in {0..N-1} per coordinate.
struct CodingVector {
  std::vector<int> levels;
  bool sorted = false;
};

/// Block sizes x_n, n = 0..N-1: x_n coordinates tolerate n stragglers.
/// Integer allocations store exact integers in doubles.
class BlockAllocation {
 public:
  BlockAllocation() = default;

  /// Nonnegative sizes summing to `total` within 1e-9 * total.
  static BlockAllocation continuous(std::vector<double> sizes, double total);
  /// Nonnegative integers; the total is their sum.
  static BlockAllocation integer(const std::vector<long long>& sizes);
  /// Integer sizes that must sum to `total` exactly.
  static BlockAllocation integer(const std::vector<long long>& sizes, long long total);

  const std::vector<double>& sizes() const noexcept { return sizes_; }
  double operator[](std::size_t n) const { return sizes_[n]; }
  std::size_t size() const noexcept { return sizes_.size(); }
  double total() const noexcept { return total_; }
  bool is_integer() const noexcept { return integer_; }
  std::vector<long long> as_integers() const;

 private:
  std::vector<double> sizes_;
  double total_ = 0.0;
  bool integer_ = false;
};

/// x_n = #{l : s_l = n}.
BlockAllocation s_to_x(const CodingVector& s, int workers);

/// Sorted coding vector with s_l = min{i : x_0 + ... + x_i >= l}.
/// Throws std::invalid_argument for a continuous allocation.
CodingVector x_to_s(const BlockAllocation& x);
/// Throws std::invalid_argument when the sizes do not sum to `total`.
CodingVector x_to_s(const std::vector<long long>& sizes, long long total);

/// S_n = sum_{i<=n} (i+1) x_i.
std::vector<double> weighted_prefix_sums(const std::vector<double>& x);

}  // namespace blockcode
