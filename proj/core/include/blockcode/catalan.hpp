#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockcode/random.hpp"

namespace blockcode {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Element of K_m(N): N nonnegative integers with sum_{i<n} k_i <= n + m for
/// n = 1..N-1 and total N + m. K_0(N) indexes the completion-probability sum.
using BallotVector = std::vector<int>;

/// |K_m(N)| = (m+2)/(N+m+1) C(2N+m-1, N-1); |K_m(0)| = [m == 0].
/// For m = 0 this is the N-th Catalan number.
BigInt ballot_count(int m, int length);

/// Membership in K_0(N) with N = k.size().
bool is_ballot_vector(const BallotVector& k);

/// Largest set enumerate() will walk.
inline constexpr std::uint64_t kMaxEnumeration = 10'000'000;

/// Calls fn(k) for each k in K_0(N) in lexicographic order, reusing one
/// buffer. Throws std::length_error if |K_0(N)| exceeds kMaxEnumeration.
template <class Fn>
void for_each_ballot_vector(int length, Fn&& fn) {
  if (length < 1) throw std::invalid_argument("for_each_ballot_vector: N must be >= 1");
  if (ballot_count(0, length) > kMaxEnumeration) {
    throw std::length_error("for_each_ballot_vector: N=" + std::to_string(length) +
                            " exceeds the enumeration limit");
  }
  BallotVector k(static_cast<std::size_t>(length), 0);
  std::function<void(int, int)> walk = [&](int n, int used) {
    if (n == length - 1) {
      k[n] = length - used;
      fn(static_cast<const BallotVector&>(k));
      return;
    }
    for (int v = 0; used + v <= n + 1; ++v) {
      k[n] = v;
      walk(n + 1, used + v);
    }
  };
  walk(0, 0);
}

/// Law of the next entry k_n given a feasible prefix k_0..k_{n-1}, under the
/// uniform law on K_0(N). Entry v is Pr(k_n = v) for v = 0..n+1-sum(prefix).
/// Throws std::invalid_argument for an infeasible prefix.
std::vector<Rational> conditional_pmf_exact(const BallotVector& prefix, int length);
std::vector<double> conditional_pmf(const BallotVector& prefix, int length);

/// Exactly uniform sampler on K_0(N) by sequential conditional draws.
/// Cumulative tables over (position, slack) are built once; one uniform is
/// consumed per free position.
class BallotSampler {
 public:
  explicit BallotSampler(int length);

  int length() const noexcept { return length_; }
  BallotVector sample(RandomStream& rng) const;
  void sample_into(RandomStream& rng, BallotVector& out) const;

 private:
  const std::vector<double>& table(int n, int slack) const;

  int length_;
  // cdf_[offset(n) + slack] holds the cumulative law of k_n given slack = n - sum(prefix).
  std::vector<std::vector<double>> cdf_;
};

}  // namespace blockcode
