#include <gtest/gtest.h>

#include <map>

#include "blockcode/catalan.hpp"
#include "blockcode/oracles/oracles.hpp"

using namespace blockcode;

TEST(BallotCount, CatalanNumbers) {
  const std::vector<long long> catalan = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
  for (int N = 1; N <= 10; ++N) EXPECT_EQ(ballot_count(0, N), BigInt(catalan[N])) << N;
  EXPECT_EQ(ballot_count(0, 0), BigInt(1));
  EXPECT_EQ(ballot_count(3, 0), BigInt(0));
  EXPECT_THROW(ballot_count(-1, 3), std::invalid_argument);
}

TEST(BallotCount, MatchesBruteForceWithSlack) {
  // Vectors of length N summing to N + m whose first n partial sums stay at
  // most n + m: the count the sampler tables are built from.
  for (int N = 1; N <= 7; ++N) {
    for (int m = 0; m <= 4; ++m) {
      std::uint64_t count = 0;
      std::vector<int> k(N);
      std::function<void(int, int)> walk = [&](int n, int used) {
        if (n == N - 1) {
          ++count;
          return;
        }
        for (int v = 0; used + v <= n + 1 + m; ++v) {
          k[n] = v;
          walk(n + 1, used + v);
        }
      };
      walk(0, 0);
      EXPECT_EQ(ballot_count(m, N), BigInt(count)) << N << "," << m;
    }
  }
}

TEST(BallotCount, LargeArgumentsStayExact) {
  // C_30 = 3814986502092304.
  EXPECT_EQ(ballot_count(0, 30), BigInt("3814986502092304"));
  EXPECT_GT(ballot_count(0, 60), BigInt("1000000000000000000000000000000"));
}

TEST(Enumeration, MatchesBruteForce) {
  for (int N = 1; N <= 8; ++N) {
    std::vector<BallotVector> seen;
    for_each_ballot_vector(N, [&](const BallotVector& k) { seen.push_back(k); });
    std::vector<BallotVector> brute = oracles::brute_force_ballot_vectors(N);
    std::sort(brute.begin(), brute.end());
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
    EXPECT_EQ(seen, brute) << N;
    for (const auto& k : seen) EXPECT_TRUE(is_ballot_vector(k));
  }
}

TEST(Enumeration, SmallCaseListed) {
  std::vector<BallotVector> seen;
  for_each_ballot_vector(3, [&](const BallotVector& k) { seen.push_back(k); });
  const std::vector<BallotVector> expected = {{0, 0, 3}, {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 1, 1}};
  EXPECT_EQ(seen, expected);
}

TEST(Enumeration, RefusesHugeSets) {
  EXPECT_THROW(for_each_ballot_vector(20, [](const BallotVector&) {}), std::length_error);
}

TEST(Membership, Rejects) {
  EXPECT_TRUE(is_ballot_vector({1}));
  EXPECT_FALSE(is_ballot_vector({}));
  EXPECT_FALSE(is_ballot_vector({2, 0}));
  EXPECT_FALSE(is_ballot_vector({1, 0, 1}));
  EXPECT_FALSE(is_ballot_vector({0, 3, 0}));
  EXPECT_FALSE(is_ballot_vector({-1, 1, 3}));
}

TEST(ConditionalPmf, ExactAgainstEnumeration) {
  for (int N = 2; N <= 7; ++N) {
    for (const BallotVector& k : oracles::brute_force_ballot_vectors(N)) {
      for (int n = 0; n + 1 < N; ++n) {
        const BallotVector prefix(k.begin(), k.begin() + n);
        const auto p = conditional_pmf_exact(prefix, N);
        const auto q = oracles::enumerated_conditional(N, prefix);
        ASSERT_EQ(p.size(), q.size());
        for (std::size_t v = 0; v < p.size(); ++v) EXPECT_EQ(p[v], q[v]);
        Rational total = 0;
        for (const auto& r : p) total += r;
        EXPECT_EQ(total, Rational(1));
      }
    }
  }
}

TEST(ConditionalPmf, FirstEntry) {
  // N = 3: k_0 = 0 in 3 of 5 vectors, k_0 = 1 in 2.
  const auto p = conditional_pmf_exact({}, 3);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], Rational(3, 5));
  EXPECT_EQ(p[1], Rational(2, 5));
}

TEST(ConditionalPmf, RejectsBadPrefix) {
  EXPECT_THROW(conditional_pmf_exact({2}, 4), std::invalid_argument);
  EXPECT_THROW(conditional_pmf_exact({0, 0, 0}, 3), std::invalid_argument);
  EXPECT_THROW(conditional_pmf_exact({}, 0), std::invalid_argument);
}

TEST(Sampler, AlwaysValidAndDeterministic) {
  const BallotSampler sampler(12);
  RandomStream a(1), b(1);
  for (int i = 0; i < 10000; ++i) {
    const BallotVector k = sampler.sample(a);
    EXPECT_TRUE(is_ballot_vector(k));
    EXPECT_EQ(k, sampler.sample(b));
  }
}

TEST(Sampler, SingleWorker) {
  const BallotSampler sampler(1);
  RandomStream rng(2);
  EXPECT_EQ(sampler.sample(rng), BallotVector{1});
}

TEST(Sampler, UniformChiSquare) {
  // Pearson chi-square against the uniform law on the 42 vectors of N = 5.
  const int N = 5;
  const BallotSampler sampler(N);
  RandomStream rng(77);
  std::map<BallotVector, long> counts;
  const long draws = 420000;
  for (long i = 0; i < draws; ++i) ++counts[sampler.sample(rng)];
  ASSERT_EQ(counts.size(), 42u);
  const double expected = draws / 42.0;
  double chi2 = 0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 41 degrees of freedom; the 0.999 quantile is 74.74.
  EXPECT_LT(chi2, 74.74);
}

TEST(Sampler, UniformOnLargerSet) {
  // N = 7 has 429 vectors; every one should be hit.
  const BallotSampler sampler(7);
  RandomStream rng(78);
  std::map<BallotVector, long> counts;
  for (long i = 0; i < 200000; ++i) ++counts[sampler.sample(rng)];
  EXPECT_EQ(counts.size(), 429u);
  const double expected = 200000 / 429.0;
  double chi2 = 0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 428 degrees of freedom; the 0.999 quantile is about 525.
  EXPECT_LT(chi2, 525.0);
}
