#include "blockcode/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace blockcode {
namespace {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

long double series_e1(long double y) {
  // E1(y) = -gamma - ln y - sum_{k>=1} (-y)^k / (k k!)
  long double sum = 0.0L;
  long double term = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= -y / k;
    const long double add = term / k;
    sum += add;
    if (std::fabs(add) < std::numeric_limits<long double>::epsilon() * std::fabs(sum)) break;
  }
  return -kEulerGamma - std::log(y) - sum;
}

long double continued_fraction_scaled(long double y) {
  constexpr long double tiny = std::numeric_limits<long double>::min() / std::numeric_limits<long double>::epsilon();
  constexpr long double eps = std::numeric_limits<long double>::epsilon();
  long double b = y + 1.0L;
  long double c = 1.0L / tiny;
  long double d = 1.0L / b;
  long double h = d;
  for (int i = 1; i < 10000; ++i) {
    const long double an = -static_cast<long double>(i) * i;
    b += 2.0L;
    d = 1.0L / (an * d + b);
    c = b + an / c;
    const long double delta = c * d;
    h *= delta;
    if (std::fabs(delta - 1.0L) < eps) break;
  }
  return h;
}

}  // namespace

long double scaled_exponential_integral(long double y) {
  if (!(y > 0.0L)) {
    throw std::domain_error("scaled_exponential_integral: argument must be positive, got " +
                            std::to_string(static_cast<double>(y)));
  }
  if (y < 1.0L) return std::exp(y) * series_e1(y);
  return continued_fraction_scaled(y);
}

double scaled_exponential_integral(double y) {
  return static_cast<double>(scaled_exponential_integral(static_cast<long double>(y)));
}

double harmonic_number(int n) {
  long double h = 0.0L;
  for (int i = n; i >= 1; --i) h += 1.0L / i;
  return static_cast<double>(h);
}

}  // namespace blockcode
