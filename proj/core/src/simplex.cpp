#include "blockcode/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blockcode {
namespace {

double mass_above(const std::vector<double>& point, double lambda) {
  double s = 0.0;
  for (double v : point) s += std::max(v + lambda, 0.0);
  return s;
}

}  // namespace

double simplex_shift(const std::vector<double>& point, double total) {
  if (point.empty()) throw std::invalid_argument("project_to_simplex_scaled: empty point");
  if (!(total > 0.0)) throw std::invalid_argument("project_to_simplex_scaled: total must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(point.begin(), point.end());
  const double n = static_cast<double>(point.size());
  // mass_above(lo) <= total <= mass_above(hi).
  double lo = total / n - *hi_it;
  double hi = total / n - *lo_it;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mass_above(point, mid) < total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Bisection fixes the active set; solve for lambda on it exactly.
  const double guess = 0.5 * (lo + hi);
  double active_sum = 0.0;
  int active = 0;
  for (double v : point) {
    if (v + guess > 0.0) {
      active_sum += v;
      ++active;
    }
  }
  if (active == 0) return guess;
  return (total - active_sum) / active;
}

std::vector<double> project_to_simplex_scaled(const std::vector<double>& point, double total) {
  const double lambda = simplex_shift(point, total);
  std::vector<double> x(point.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < point.size(); ++n) {
    x[n] = std::max(point[n] + lambda, 0.0);
    sum += x[n];
  }
  // Absorb rounding residue into the largest entry so the sum is exact to an ulp.
  const auto big = std::max_element(x.begin(), x.end());
  *big = std::max(0.0, *big + (total - sum));
  return x;
}

}  // namespace blockcode
