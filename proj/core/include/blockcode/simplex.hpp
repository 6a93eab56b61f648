#pragma once

#include <vector>

namespace blockcode {

/// Euclidean projection of `point` onto {x >= 0, sum x = total}:
/// x_n = max(point_n + lambda, 0) with lambda found by bisection and then
/// fixed exactly on the resulting active set. Requires total > 0.
std::vector<double> project_to_simplex_scaled(const std::vector<double>& point, double total);

/// The water-level shift lambda used by the projection above.
double simplex_shift(const std::vector<double>& point, double total);

}  // namespace blockcode
