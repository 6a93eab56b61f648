#include "blockcode/oracles/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace blockcode::oracles {
namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

std::vector<BallotVector> brute_force_ballot_vectors(int length) {
  std::vector<BallotVector> out;
  BallotVector k(static_cast<std::size_t>(length), 0);
  // Odometer over {0..N}^N.
  while (true) {
    int sum = 0;
    bool ok = true;
    for (int n = 0; n < length; ++n) {
      if (sum > n) ok = false;  // sum_{i<n} k_i <= n
      sum += k[n];
    }
    if (ok && sum == length) out.push_back(k);
    int i = length - 1;
    while (i >= 0 && k[i] == length) k[i--] = 0;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

std::vector<Rational> enumerated_conditional(int length, const BallotVector& prefix) {
  const std::vector<BallotVector> all = brute_force_ballot_vectors(length);
  const std::size_t n = prefix.size();
  std::map<int, long long> freq;
  long long matching = 0;
  for (const BallotVector& k : all) {
    if (!std::equal(prefix.begin(), prefix.end(), k.begin())) continue;
    ++freq[k[n]];
    ++matching;
  }
  if (matching == 0) throw std::invalid_argument("enumerated_conditional: prefix has no completion");
  int used = 0;
  for (int v : prefix) used += v;
  std::vector<Rational> p(static_cast<std::size_t>(n + 1 - used) + 1, Rational(0));
  for (const auto& [v, c] : freq) p.at(static_cast<std::size_t>(v)) = Rational(c, matching);
  return p;
}

std::vector<double> projection_by_active_sets(const std::vector<double>& point, double total) {
  const std::size_t N = point.size();
  std::vector<double> best;
  double best_dist = INFINITY;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << N); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t n = 0; n < N; ++n) {
      if (mask >> n & 1) {
        sum += point[n];
        ++count;
      }
    }
    const double lambda = (total - sum) / count;
    std::vector<double> x(N, 0.0);
    bool feasible = true;
    for (std::size_t n = 0; n < N; ++n) {
      if (mask >> n & 1) {
        x[n] = point[n] + lambda;
        if (x[n] < -1e-12) feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t n = 0; n < N; ++n) dist += (x[n] - point[n]) * (x[n] - point[n]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  for (double& v : best) v = std::max(v, 0.0);
  return best;
}

std::vector<double> proximal_step_by_active_sets(const std::vector<double>& x_prev, const std::vector<double>& h,
                                                 double tau, double total) {
  const std::size_t N = x_prev.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << N); ++mask) {
    // Active n: h_n - 2 tau (x_n - xp_n) + lambda = 0.
    double sum = 0.0;
    int count = 0;
    for (std::size_t n = 0; n < N; ++n) {
      if (mask >> n & 1) {
        sum += x_prev[n] + h[n] / (2 * tau);
        ++count;
      }
    }
    const double lambda = 2 * tau * (total - sum) / count;
    std::vector<double> x(N, 0.0);
    bool kkt = true;
    for (std::size_t n = 0; n < N && kkt; ++n) {
      if (mask >> n & 1) {
        x[n] = x_prev[n] + (h[n] + lambda) / (2 * tau);
        kkt = x[n] >= -1e-12;
      } else {
        // Multiplier of x_n >= 0 must be nonnegative.
        kkt = -(h[n] + 2 * tau * x_prev[n] + lambda) >= -1e-12;
      }
    }
    if (kkt) {
      for (double& v : x) v = std::max(v, 0.0);
      return x;
    }
  }
  throw std::runtime_error("proximal_step_by_active_sets: no KKT point");
}

std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double rel_step) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::fabs(x[j]));
    p[j] = x[j] + h;
    const double up = f(p);
    p[j] = x[j] - h;
    const double down = f(p);
    p[j] = x[j];
    g[j] = (up - down) / (2 * h);
  }
  return g;
}

double expected_runtime_two_workers(const std::vector<double>& x, const SystemConfig& cfg) {
  if (cfg.workers != 2 || x.size() != 2) throw std::invalid_argument("expected_runtime_two_workers: N must be 2");
  const double s0 = x[0];
  const double s1 = x[0] + 2 * x[1];
  const StragglerDistribution& d = cfg.dist;
  // Pr[max(T_(2) s0, T_(1) s1) > v].
  auto tail = [&](double v) {
    const double u = s0 > 0 ? v / s0 : INFINITY;
    const double w = v / s1;
    const double Fu = d.cdf(u);
    double p = Fu * Fu;
    if (w < u) {
      const double gap = Fu - d.cdf(w);
      p -= gap * gap;
    }
    return 1.0 - p;
  };
  const double lo = d.support_min();
  std::vector<double> cuts = {0.0, lo * s1};
  if (s0 > 0) cuts.push_back(lo * s0);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += integrate(tail, cuts[i], cuts[i + 1]);
  }
  total += integrate(tail, cuts.back(), INFINITY);
  return cfg.work_scale() * total;
}

double inverse_mean_by_quadrature(double rate, double shift) {
  return integrate([&](double t) { return rate * std::exp(-rate * (t - shift)) / t; }, shift, INFINITY);
}

double scaled_e1_by_quadrature(double y) {
  return integrate([&](double u) { return std::exp(-y * u) / (1.0 + u); }, 0.0, INFINITY);
}

OrderMoments order_statistic_moments(double rate, double shift, int workers, std::uint64_t trials,
                                     std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> exp(rate);
  const std::size_t N = static_cast<std::size_t>(workers);
  std::vector<long double> s(N, 0), s2(N, 0), r(N, 0), r2(N, 0);
  std::vector<double> t(N);
  for (std::uint64_t j = 0; j < trials; ++j) {
    for (double& v : t) v = shift + exp(gen);
    std::sort(t.begin(), t.end());
    for (std::size_t n = 0; n < N; ++n) {
      s[n] += t[n];
      s2[n] += static_cast<long double>(t[n]) * t[n];
      r[n] += 1.0 / t[n];
      r2[n] += 1.0 / (static_cast<long double>(t[n]) * t[n]);
    }
  }
  OrderMoments m;
  const long double n = static_cast<long double>(trials);
  for (std::size_t k = 0; k < N; ++k) {
    const long double mean = s[k] / n;
    const long double inv = r[k] / n;
    m.mean.push_back(static_cast<double>(mean));
    m.mean_se.push_back(static_cast<double>(std::sqrt(std::max(0.0L, s2[k] / n - mean * mean) / n)));
    m.inverse_mean.push_back(static_cast<double>(inv));
    m.inverse_se.push_back(static_cast<double>(std::sqrt(std::max(0.0L, r2[k] / n - inv * inv) / n)));
  }
  return m;
}

void for_each_composition(int total, int length, const std::function<void(const std::vector<long long>&)>& fn) {
  std::vector<long long> x(static_cast<std::size_t>(length), 0);
  std::function<void(int, long long)> rec = [&](int n, long long left) {
    if (n == length - 1) {
      x[n] = left;
      fn(x);
      return;
    }
    for (long long v = 0; v <= left; ++v) {
      x[n] = v;
      rec(n + 1, left - v);
    }
  };
  rec(0, total);
}

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  long double s = 0;
  for (double e : v) s += e;
  const long double mean = s / v.size();
  long double ss = 0;
  for (double e : v) ss += (e - mean) * (e - mean);
  out.mean = static_cast<double>(mean);
  out.se = v.size() > 1 ? static_cast<double>(std::sqrt(ss / (v.size() - 1) / v.size())) : 0.0;
  return out;
}

}  // namespace blockcode::oracles
