#include "blockcode/allocation.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace blockcode {

void SystemConfig::validate() const {
  if (workers < 1) throw std::invalid_argument("config: N must be >= 1");
  if (coordinates < 1) throw std::invalid_argument("config: L must be >= 1");
  if (!(samples > 0.0) || !std::isfinite(samples)) throw std::invalid_argument("config: M must be positive");
  if (!(cycles_per_derivative > 0.0) || !std::isfinite(cycles_per_derivative)) {
    throw std::invalid_argument("config: b must be positive");
  }
}

BlockAllocation BlockAllocation::continuous(std::vector<double> sizes, double total) {
  if (sizes.empty()) throw std::invalid_argument("allocation: empty");
  long double sum = 0.0L;
  for (double v : sizes) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("allocation: entries must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::fabs(static_cast<double>(sum) - total) > 1e-9 * total) {
    throw std::invalid_argument("allocation: sum " + std::to_string(static_cast<double>(sum)) +
                                " differs from L=" + std::to_string(total));
  }
  BlockAllocation a;
  a.sizes_ = std::move(sizes);
  a.total_ = total;
  return a;
}

BlockAllocation BlockAllocation::integer(const std::vector<long long>& sizes) {
  long long total = 0;
  for (long long v : sizes) total += v;
  return integer(sizes, total);
}

BlockAllocation BlockAllocation::integer(const std::vector<long long>& sizes, long long total) {
  if (sizes.empty()) throw std::invalid_argument("allocation: empty");
  long long sum = 0;
  for (long long v : sizes) {
    if (v < 0) throw std::invalid_argument("allocation: entries must be nonnegative");
    sum += v;
  }
  if (sum != total) {
    throw std::invalid_argument("allocation: sum " + std::to_string(sum) + " differs from L=" +
                                std::to_string(total));
  }
  BlockAllocation a;
  a.sizes_.assign(sizes.begin(), sizes.end());
  a.total_ = static_cast<double>(total);
  a.integer_ = true;
  return a;
}

std::vector<long long> BlockAllocation::as_integers() const {
  std::vector<long long> out(sizes_.size());
  for (std::size_t n = 0; n < sizes_.size(); ++n) out[n] = std::llround(sizes_[n]);
  return out;
}

BlockAllocation s_to_x(const CodingVector& s, int workers) {
  if (workers < 1) throw std::invalid_argument("s_to_x: N must be >= 1");
  std::vector<long long> x(static_cast<std::size_t>(workers), 0);
  for (int level : s.levels) {
    if (level < 0 || level >= workers) {
      throw std::invalid_argument("s_to_x: level " + std::to_string(level) + " outside 0.." +
                                  std::to_string(workers - 1));
    }
    ++x[level];
  }
  return BlockAllocation::integer(x);
}

CodingVector x_to_s(const std::vector<long long>& sizes, long long total) {
  long long sum = 0;
  for (long long v : sizes) {
    if (v < 0) throw std::invalid_argument("x_to_s: negative block size");
    sum += v;
  }
  if (sum != total) {
    throw std::invalid_argument("x_to_s: sum " + std::to_string(sum) + " differs from L=" +
                                std::to_string(total));
  }
  CodingVector s;
  s.sorted = true;
  s.levels.reserve(static_cast<std::size_t>(total));
  for (std::size_t n = 0; n < sizes.size(); ++n) {
    s.levels.insert(s.levels.end(), static_cast<std::size_t>(sizes[n]), static_cast<int>(n));
  }
  return s;
}

CodingVector x_to_s(const BlockAllocation& x) {
  if (!x.is_integer()) throw std::invalid_argument("x_to_s: allocation is not integral");
  return x_to_s(x.as_integers(), std::llround(x.total()));
}

std::vector<double> weighted_prefix_sums(const std::vector<double>& x) {
  std::vector<double> s(x.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    acc += static_cast<double>(n + 1) * x[n];
    s[n] = acc;
  }
  return s;
}

}  // namespace blockcode
