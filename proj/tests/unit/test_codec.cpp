#include <gtest/gtest.h>

#include "blockcode/codec.hpp"
#include "blockcode/runtime_model.hpp"

using namespace blockcode;

namespace {

// Four-worker fixtures; rows are workers, columns data subsets.
Eigen::MatrixXd fixture_s1() {
  Eigen::MatrixXd b(4, 4);
  b << 1, -1, 0, 0,
       0, 1, 1, 0,
       0, 0, 1, -1,
       1, 0, 0, 1;
  return b;
}

Eigen::MatrixXd fixture_s2() {
  Eigen::MatrixXd b(4, 4);
  b << 1, 1.0 / 3, 2.0 / 3, 0,
       0, 1, 0.5, 1.5,
       2, 0, 1, -1,
       -0.5, 0.5, 0, 1;
  return b;
}

// Calls fn on every subset of {0..N-1} of the given size, ascending.
void for_each_subset(int N, int size, const std::function<void(const std::vector<int>&)>& fn) {
  for (std::uint64_t mask = 0; mask < (1ULL << N); ++mask) {
    if (__builtin_popcountll(mask) != size) continue;
    std::vector<int> w;
    for (int n = 0; n < N; ++n) {
      if (mask >> n & 1) w.push_back(n);
    }
    fn(w);
  }
}

void expect_exact_recovery(const CodeBlock& code, RandomStream& rng) {
  const int N = code.workers();
  const int dim = 3;
  std::vector<Eigen::VectorXd> g(N);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  for (auto& v : g) {
    v = Eigen::VectorXd(dim);
    for (int d = 0; d < dim; ++d) v[d] = rng.normal();
    total += v;
  }
  for_each_subset(N, N - code.redundancy(), [&](const std::vector<int>& w) {
    std::map<int, Eigen::VectorXd> received;
    for (int n : w) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
      for (int j = 0; j < N; ++j) c += code.encoding()(n, j) * g[j];
      received[n] = c;
    }
    const Eigen::VectorXd sum = decode(code, received);
    EXPECT_LE((sum - total).cwiseAbs().maxCoeff(), 1e-9 * total.cwiseAbs().maxCoeff());
  });
}

}  // namespace

TEST(Allocation, CyclicWindows) {
  const WorkerAllocation a = allocate(4, 2);
  ASSERT_EQ(a.subsets.size(), 4u);
  EXPECT_EQ(a.subsets[0], (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(a.subsets[3], (std::vector<int>{3, 0, 1}));
  EXPECT_EQ(allocate(3, 0).subsets[2], std::vector<int>{2});
  EXPECT_THROW(allocate(3, 3), std::invalid_argument);
}

TEST(Fixtures, DecodeEverySubset) {
  RandomStream rng(1);
  expect_exact_recovery(code_from_matrix(fixture_s1(), 1), rng);
  expect_exact_recovery(code_from_matrix(fixture_s2(), 2), rng);
}

TEST(Fixtures, SupportIsChecked) {
  Eigen::MatrixXd b = fixture_s1();
  b(0, 2) = 1;
  EXPECT_THROW(code_from_matrix(b, 1), std::invalid_argument);
  EXPECT_THROW(code_from_matrix(Eigen::MatrixXd::Ones(3, 4), 1), std::invalid_argument);
}

TEST(RandomCodes, AllSmallSystemsDecode) {
  RandomStream rng(2);
  for (int N = 1; N <= 8; ++N) {
    for (int s = 0; s < N; ++s) {
      const CodeBlock code = build_code(N, s, rng);
      EXPECT_EQ(code.redundancy(), s);
      for (int n = 0; n < N; ++n) {
        for (int j = 0; j < N; ++j) {
          const bool inside = (j - n + N) % N <= s;
          if (!inside) EXPECT_EQ(code.encoding()(n, j), 0.0);
        }
      }
      RandomStream check(3);
      EXPECT_TRUE(check_decodability(code, check));
      expect_exact_recovery(code, rng);
    }
  }
}

TEST(RandomCodes, LargerSystemSampled) {
  RandomStream rng(4);
  const CodeBlock code = build_code(20, 7, rng);
  RandomStream check(5);
  EXPECT_TRUE(check_decodability(code, check));
}

TEST(Decode, Errors) {
  const CodeBlock code = code_from_matrix(fixture_s1(), 1);
  std::map<int, Eigen::VectorXd> two = {{0, Eigen::VectorXd::Ones(1)}, {1, Eigen::VectorXd::Ones(1)}};
  EXPECT_THROW(decode(code, two), std::invalid_argument);

  Eigen::MatrixXd bad(3, 3);
  bad << 1, 1, 0,
         0, 1, 1,
         1, 0, 1;
  const CodeBlock singular = code_from_matrix(bad, 1);
  EXPECT_FALSE(singular.decoding_coefficients({0, 1}).has_value());
  try {
    decode(singular, two);
    FAIL() << "expected a singular subset";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("{1,2}"), std::string::npos) << e.what();
  }
}

TEST(CodedGd, MatchesCentralized) {
  RandomStream rng(6);
  const LeastSquaresProblem data = make_synthetic_least_squares(40, 10, 0.1, rng);
  SystemConfig cfg;
  cfg.workers = 5;
  cfg.coordinates = 10;
  cfg.samples = 40;
  cfg.dist = StragglerDistribution::shifted_exponential(1, 0.5);
  const BlockAllocation x = BlockAllocation::integer({3, 2, 0, 4, 1});
  const CodedGdTrace trace = run_coded_gd(data, x, cfg, rng);
  ASSERT_EQ(trace.steps.size(), 50u);
  const auto reference = centralized_gd(data, 50, 0.0);
  for (int k = 0; k <= 50; ++k) {
    EXPECT_LE((trace.iterates[k] - reference[k]).cwiseAbs().maxCoeff(), 1e-8) << k;
  }
  EXPECT_LT(trace.steps.back().loss, data.loss(Eigen::VectorXd::Zero(10)));
  double cumulative = 0;
  for (const auto& step : trace.steps) {
    cumulative += step.runtime;
    EXPECT_NEAR(step.cumulative_runtime, cumulative, 1e-9 * cumulative);
    EXPECT_LE(step.gradient_error, 1e-9);
  }
}

TEST(CodedGd, FourWorkerExampleRuntime) {
  RandomStream rng(7);
  const LeastSquaresProblem data = make_synthetic_least_squares(4, 4, 0.0, rng);
  SystemConfig cfg;
  cfg.workers = 4;
  cfg.coordinates = 4;
  cfg.samples = 4;
  CodedGdOptions opts;
  opts.iterations = 3;
  opts.fixed_times = std::vector<double>{20, 5, 2, 2};
  const CodedGdTrace trace = run_coded_gd(data, BlockAllocation::integer({0, 2, 2, 0}), cfg, rng, opts);
  for (const auto& step : trace.steps) EXPECT_EQ(step.runtime, 20.0);
}

TEST(CodedGd, RejectsMismatchedShapes) {
  RandomStream rng(8);
  const LeastSquaresProblem data = make_synthetic_least_squares(10, 4, 0.0, rng);
  SystemConfig cfg;
  cfg.workers = 4;
  cfg.coordinates = 4;
  cfg.samples = 10;
  EXPECT_THROW(run_coded_gd(data, BlockAllocation::integer({1, 1, 1, 1}), cfg, rng), std::invalid_argument);
}
