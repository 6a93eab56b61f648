#include "blockcode/catalan.hpp"

#include <numeric>

namespace blockcode {
namespace {

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

// Slack n - sum(prefix), or -1 if some partial sum exceeds its bound.
int prefix_slack(const BallotVector& prefix) {
  int used = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] < 0) return -1;
    used += prefix[i];
    if (used > static_cast<int>(i) + 1) return -1;
  }
  return static_cast<int>(prefix.size()) - used;
}

std::vector<Rational> pmf_for(int n, int slack, int length) {
  const BigInt denom = ballot_count(slack, length - n);
  std::vector<Rational> p(static_cast<std::size_t>(slack) + 2);
  for (int v = 0; v <= slack + 1; ++v) {
    p[v] = Rational(ballot_count(slack + 1 - v, length - n - 1), denom);
  }
  return p;
}

}  // namespace

BigInt ballot_count(int m, int length) {
  if (m < 0 || length < 0) throw std::invalid_argument("ballot_count: negative argument");
  if (length == 0) return m == 0 ? 1 : 0;
  BigInt c = binomial(2 * length + m - 1, length - 1) * (m + 2);
  return c / (length + m + 1);
}

bool is_ballot_vector(const BallotVector& k) {
  const int N = static_cast<int>(k.size());
  if (N == 0) return false;
  int used = 0;
  for (int n = 0; n < N; ++n) {
    if (k[n] < 0) return false;
    if (n > 0 && used > n) return false;
    used += k[n];
  }
  return used == N;
}

std::vector<Rational> conditional_pmf_exact(const BallotVector& prefix, int length) {
  const int n = static_cast<int>(prefix.size());
  if (length < 1 || n >= length) {
    throw std::invalid_argument("conditional_pmf: prefix length " + std::to_string(n) +
                                " must be below N=" + std::to_string(length));
  }
  const int slack = prefix_slack(prefix);
  if (slack < 0) throw std::invalid_argument("conditional_pmf: infeasible prefix");
  return pmf_for(n, slack, length);
}

std::vector<double> conditional_pmf(const BallotVector& prefix, int length) {
  const std::vector<Rational> exact = conditional_pmf_exact(prefix, length);
  std::vector<double> p(exact.size());
  for (std::size_t v = 0; v < exact.size(); ++v) p[v] = exact[v].convert_to<double>();
  return p;
}

BallotSampler::BallotSampler(int length) : length_(length) {
  if (length < 1) throw std::invalid_argument("BallotSampler: N must be >= 1");
  for (int n = 0; n + 1 < length; ++n) {
    for (int slack = 0; slack <= n; ++slack) {
      const std::vector<Rational> p = pmf_for(n, slack, length);
      std::vector<double> cdf(p.size());
      Rational acc = 0;
      for (std::size_t v = 0; v < p.size(); ++v) {
        acc += p[v];
        cdf[v] = acc.convert_to<double>();
      }
      cdf.back() = 1.0;
      cdf_.push_back(std::move(cdf));
    }
  }
}

const std::vector<double>& BallotSampler::table(int n, int slack) const {
  return cdf_[static_cast<std::size_t>(n) * (n + 1) / 2 + slack];
}

void BallotSampler::sample_into(RandomStream& rng, BallotVector& out) const {
  out.assign(static_cast<std::size_t>(length_), 0);
  int used = 0;
  for (int n = 0; n + 1 < length_; ++n) {
    const std::vector<double>& cdf = table(n, n - used);
    const double u = rng.uniform();
    int v = 0;
    while (cdf[v] < u) ++v;
    out[n] = v;
    used += v;
  }
  out[length_ - 1] = length_ - used;
}

BallotVector BallotSampler::sample(RandomStream& rng) const {
  BallotVector k;
  sample_into(rng, k);
  return k;
}

}  // namespace blockcode
