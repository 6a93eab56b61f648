#include "blockcode/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "blockcode/runtime_model.hpp"

namespace blockcode {
namespace {

constexpr double kDecodeTolerance = 1e-9;

bool in_window(int column, int start, int width, int workers) {
  return ((column - start) % workers + workers) % workers < width;
}

std::uint64_t subset_mask(const std::vector<int>& subset) {
  std::uint64_t mask = 0;
  for (int w : subset) mask |= std::uint64_t{1} << w;
  return mask;
}

std::string subset_name(const std::vector<int>& subset) {
  std::string s = "{";
  for (std::size_t i = 0; i < subset.size(); ++i) s += (i ? "," : "") + std::to_string(subset[i] + 1);
  return s + "}";
}

void check_range(int workers, int redundancy, const char* what) {
  if (workers < 1 || workers > 64) throw std::invalid_argument(std::string(what) + ": N must be in 1..64");
  if (redundancy < 0 || redundancy >= workers) {
    throw std::invalid_argument(std::string(what) + ": s=" + std::to_string(redundancy) + " outside 0.." +
                                std::to_string(workers - 1));
  }
}

std::optional<Eigen::MatrixXd> draw_code(int N, int s, RandomStream& rng) {
  if (s == 0) return Eigen::MatrixXd::Identity(N, N);
  Eigen::MatrixXd H(s, N);
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < N; ++c) H(r, c) = 2.0 * rng.uniform() - 1.0;
    H.row(r).array() -= H.row(r).mean();
  }
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  for (int n = 0; n < N; ++n) {
    Eigen::MatrixXd rest(s, s);
    for (int j = 1; j <= s; ++j) rest.col(j - 1) = H.col((n + j) % N);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rest);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd b = lu.solve(-H.col(n));
    B(n, n) = 1.0;
    for (int j = 1; j <= s; ++j) B(n, (n + j) % N) = b(j - 1);
  }
  return B;
}

template <class Fn>
void for_each_subset(int N, int size, Fn&& fn) {
  std::vector<int> subset(static_cast<std::size_t>(size));
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    if (!fn(static_cast<const std::vector<int>&>(subset))) return;
    int i = size - 1;
    while (i >= 0 && subset[i] == N - size + i) --i;
    if (i < 0) return;
    ++subset[i];
    for (int j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
  }
}

}  // namespace

WorkerAllocation allocate(int workers, int max_redundancy) {
  check_range(workers, max_redundancy, "allocate");
  WorkerAllocation a;
  a.workers = workers;
  a.max_redundancy = max_redundancy;
  a.subsets.resize(static_cast<std::size_t>(workers));
  for (int n = 0; n < workers; ++n) {
    for (int j = 0; j <= max_redundancy; ++j) a.subsets[n].push_back((n + j) % workers);
  }
  return a;
}

CodeBlock::CodeBlock(int redundancy, Eigen::MatrixXd encoding)
    : redundancy_(redundancy), encoding_(std::move(encoding)) {}

std::optional<Eigen::VectorXd> CodeBlock::decoding_coefficients(const std::vector<int>& subset) const {
  const std::uint64_t key = subset_mask(subset);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const int N = workers();
  Eigen::MatrixXd system(N, static_cast<Eigen::Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) system.col(static_cast<Eigen::Index>(i)) = encoding_.row(subset[i]).transpose();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
  const Eigen::VectorXd a = system.colPivHouseholderQr().solve(ones);
  std::optional<Eigen::VectorXd> result;
  if ((system * a - ones).norm() <= kDecodeTolerance * std::sqrt(static_cast<double>(N)) && a.allFinite()) {
    result = a;
  }
  cache_.emplace(key, result);
  return result;
}

bool check_decodability(const CodeBlock& block, RandomStream& rng, int exhaustive_limit, int samples) {
  const int N = block.workers();
  const int size = N - block.redundancy();
  bool ok = true;
  if (N <= exhaustive_limit) {
    for_each_subset(N, size, [&](const std::vector<int>& w) {
      ok = block.decoding_coefficients(w).has_value();
      return ok;
    });
    return ok;
  }
  std::vector<int> all(static_cast<std::size_t>(N));
  for (int trial = 0; trial < samples && ok; ++trial) {
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < size; ++i) std::swap(all[i], all[i + static_cast<int>(rng.below(N - i))]);
    std::vector<int> w(all.begin(), all.begin() + size);
    std::sort(w.begin(), w.end());
    ok = block.decoding_coefficients(w).has_value();
  }
  return ok;
}

CodeBlock build_code(int workers, int redundancy, RandomStream& rng) {
  check_range(workers, redundancy, "build_code");
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::optional<Eigen::MatrixXd> B = draw_code(workers, redundancy, rng);
    if (!B) continue;
    CodeBlock block(redundancy, std::move(*B));
    if (check_decodability(block, rng)) return block;
  }
  throw std::runtime_error("build_code: no decodable code for N=" + std::to_string(workers) +
                           " s=" + std::to_string(redundancy) + " after 10 attempts");
}

CodeBlock code_from_matrix(const Eigen::MatrixXd& encoding, int redundancy) {
  const int N = static_cast<int>(encoding.rows());
  if (encoding.cols() != N) throw std::invalid_argument("code_from_matrix: matrix must be square");
  check_range(N, redundancy, "code_from_matrix");
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < N; ++c) {
      if (encoding(n, c) != 0.0 && !in_window(c, n, redundancy + 1, N)) {
        throw std::invalid_argument("code_from_matrix: row " + std::to_string(n + 1) +
                                    " has support outside its cyclic window");
      }
    }
  }
  return CodeBlock(redundancy, encoding);
}

Eigen::VectorXd decode(const CodeBlock& block, const std::map<int, Eigen::VectorXd>& received) {
  const int N = block.workers();
  if (static_cast<int>(received.size()) < N - block.redundancy()) {
    throw std::invalid_argument("decode: " + std::to_string(received.size()) + " workers reported, need " +
                                std::to_string(N - block.redundancy()));
  }
  std::vector<int> subset;
  for (const auto& [w, value] : received) {
    if (w < 0 || w >= N) throw std::invalid_argument("decode: worker id out of range");
    subset.push_back(w);
  }
  const std::optional<Eigen::VectorXd> a = block.decoding_coefficients(subset);
  if (!a) throw std::runtime_error("decode: subset " + subset_name(subset) + " is numerically singular");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(received.begin()->second.size());
  Eigen::Index i = 0;
  for (const auto& [w, value] : received) sum += (*a)(i++) * value;
  return sum;
}

double LeastSquaresProblem::loss(const Eigen::VectorXd& theta) const {
  return (features * theta - targets).squaredNorm() / (2.0 * static_cast<double>(features.rows()));
}

Eigen::VectorXd LeastSquaresProblem::gradient(const Eigen::VectorXd& theta) const {
  return features.transpose() * (features * theta - targets) / static_cast<double>(features.rows());
}

LeastSquaresProblem make_synthetic_least_squares(int samples, int coordinates, double noise, RandomStream& rng) {
  if (samples < 1 || coordinates < 1) throw std::invalid_argument("make_synthetic_least_squares: empty problem");
  LeastSquaresProblem p;
  p.features.resize(samples, coordinates);
  for (Eigen::Index c = 0; c < p.features.cols(); ++c) {
    for (Eigen::Index r = 0; r < p.features.rows(); ++r) p.features(r, c) = rng.normal();
  }
  Eigen::VectorXd truth(coordinates);
  for (Eigen::Index c = 0; c < truth.size(); ++c) truth(c) = rng.normal();
  p.targets = p.features * truth;
  for (Eigen::Index r = 0; r < p.targets.size(); ++r) p.targets(r) += noise * rng.normal();
  return p;
}

namespace {

double default_step(const LeastSquaresProblem& data) {
  const Eigen::MatrixXd gram = data.features.transpose() * data.features / static_cast<double>(data.features.rows());
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return top > 0.0 ? 1.0 / top : 1.0;
}

}  // namespace

std::vector<Eigen::VectorXd> centralized_gd(const LeastSquaresProblem& data, int iterations, double step_size) {
  if (step_size <= 0.0) step_size = default_step(data);
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(data.features.cols());
  out.push_back(theta);
  for (int i = 0; i < iterations; ++i) {
    theta -= step_size * data.gradient(theta);
    out.push_back(theta);
  }
  return out;
}

CodedGdTrace run_coded_gd(const LeastSquaresProblem& data, const BlockAllocation& x, const SystemConfig& cfg,
                          RandomStream& rng, const CodedGdOptions& opts) {
  cfg.validate();
  const int N = cfg.workers;
  const Eigen::Index m = data.features.rows();
  const Eigen::Index L = data.features.cols();
  if (m % N != 0) throw std::invalid_argument("run_coded_gd: sample count must be divisible by N");
  if (L != cfg.coordinates) throw std::invalid_argument("run_coded_gd: feature count must equal L");
  if (x.size() != static_cast<std::size_t>(N) || std::llround(x.total()) != L) {
    throw std::invalid_argument("run_coded_gd: allocation does not match N and L");
  }
  if (opts.fixed_times && opts.fixed_times->size() != static_cast<std::size_t>(N)) {
    throw std::invalid_argument("run_coded_gd: fixed_times must have N entries");
  }
  const CodingVector s = x_to_s(x);
  const std::vector<long long> sizes = x.as_integers();

  int s_max = 0;
  for (int n = 0; n < N; ++n) {
    if (sizes[n] > 0) s_max = n;
  }
  const WorkerAllocation holdings = allocate(N, s_max);
  std::vector<CodeBlock> codes(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    if (sizes[n] > 0) codes[n] = build_code(N, n, rng);
  }
  // Block n covers coordinates [start[n], start[n] + sizes[n]).
  std::vector<Eigen::Index> start(static_cast<std::size_t>(N), 0);
  for (int n = 1; n < N; ++n) start[n] = start[n - 1] + sizes[n - 1];
  // prefix[l] = sum_{i<=l} (s_i + 1).
  std::vector<double> prefix(static_cast<std::size_t>(L));
  double acc = 0.0;
  for (Eigen::Index l = 0; l < L; ++l) prefix[l] = acc += s.levels[l] + 1;

  const double step = opts.step_size > 0.0 ? opts.step_size : default_step(data);
  const Eigen::Index rows = m / N;
  const double scale = cfg.work_scale();

  CodedGdTrace trace;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(L);
  trace.iterates.push_back(theta);
  double cumulative = 0.0;
  Eigen::MatrixXd partial(L, N);
  std::vector<double> times(static_cast<std::size_t>(N));

  for (int iter = 1; iter <= opts.iterations; ++iter) {
    // Uncoded per-subset partial derivatives g_j; their sum is the gradient.
    for (int j = 0; j < N; ++j) {
      const auto A = data.features.middleRows(j * rows, rows);
      const auto y = data.targets.segment(j * rows, rows);
      partial.col(j) = A.transpose() * (A * theta - y) / static_cast<double>(m);
    }
    if (opts.fixed_times) {
      times = *opts.fixed_times;
    } else {
      sample_into(cfg.dist, rng, times);
    }
    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return times[a] < times[b]; });
    std::vector<double> sorted_times(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) sorted_times[k] = times[order[k]];

    Eigen::VectorXd decoded(L);
    double runtime = 0.0;
    for (int n = 0; n < N; ++n) {
      if (sizes[n] == 0) continue;
      const CodeBlock& code = codes[n];
      const Eigen::Index first = start[n];
      const Eigen::Index count = sizes[n];
      std::map<int, Eigen::VectorXd> received;
      for (int k = 0; k < N - n; ++k) {
        const int w = order[k];
        Eigen::VectorXd coded = Eigen::VectorXd::Zero(count);
        for (int j = 0; j <= n; ++j) {
          const int subset = (w + j) % N;
          if (std::find(holdings.subsets[w].begin(), holdings.subsets[w].end(), subset) == holdings.subsets[w].end()) {
            throw std::logic_error("run_coded_gd: worker lacks a subset of its coding window");
          }
          coded += code.encoding()(w, subset) * partial.col(subset).segment(first, count);
        }
        received.emplace(w, std::move(coded));
      }
      decoded.segment(first, count) = decode(code, received);
      // Worker w finishes coordinate l at scale * T_w * prefix_l; the block's
      // last coordinate is ready once the (N - n)-th fastest worker is done.
      const Eigen::Index last = first + count - 1;
      std::vector<double> finish(static_cast<std::size_t>(N));
      for (int w = 0; w < N; ++w) finish[w] = scale * (times[w] * prefix[last]);
      std::nth_element(finish.begin(), finish.begin() + (N - n - 1), finish.end());
      const double ready = finish[N - n - 1];
      if (ready != scale * (sorted_times[N - n - 1] * prefix[last])) {
        throw std::logic_error("run_coded_gd: recovery time disagrees with the order statistic");
      }
      runtime = std::max(runtime, ready);
    }
    RuntimeVector rv;
    rv.sorted = sorted_times;
    if (runtime != runtime_of_x(x, rv, cfg)) {
      throw std::logic_error("run_coded_gd: simulated runtime disagrees with the block runtime model");
    }

    const Eigen::VectorXd exact = data.gradient(theta);
    const double denom = std::max(exact.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    CodedGdStep row;
    row.iteration = iter;
    row.gradient_error = (decoded - exact).cwiseAbs().maxCoeff() / denom;
    theta -= step * decoded;
    row.loss = data.loss(theta);
    row.runtime = runtime;
    cumulative += runtime;
    row.cumulative_runtime = cumulative;
    trace.steps.push_back(row);
    trace.iterates.push_back(theta);
  }
  return trace;
}

}  // namespace blockcode
