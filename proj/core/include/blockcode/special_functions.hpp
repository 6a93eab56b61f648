#pragma once

namespace blockcode {

/// e^y * E1(y) = -e^y * Ei(-y) for y > 0, evaluated without forming e^y.
/// Power series below 1, Lentz continued fraction above.
/// Throws std::domain_error for y <= 0.
double scaled_exponential_integral(double y);
long double scaled_exponential_integral(long double y);

/// H_n = 1 + 1/2 + ... + 1/n; H_0 = 0.
double harmonic_number(int n);

}  // namespace blockcode
