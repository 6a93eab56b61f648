#include "blockcode/opt_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blockcode/opt_runtime.hpp"
#include "blockcode/runtime_model.hpp"
#include "blockcode/simplex.hpp"
#include "blockcode/special_functions.hpp"

namespace blockcode {
namespace {

constexpr double kSaturated = 1e-12;

struct Factors {
  std::vector<double> u;  // d_n for n < N-1, F(c_{N-1}) last
  std::vector<double> a;  // f(c_n) c_n / S_n
};

Factors factors(const std::vector<double>& x, double t, const SystemConfig& cfg) {
  const std::size_t N = x.size();
  if (N != static_cast<std::size_t>(cfg.workers)) {
    throw std::invalid_argument("g_value: allocation length does not match N");
  }
  const std::vector<double> prefix = weighted_prefix_sums(x);
  std::vector<double> c(N);
  for (std::size_t n = 0; n < N; ++n) {
    c[n] = prefix[n] > 0.0 ? t / (cfg.work_scale() * prefix[n]) : kInfinity;
  }
  Factors f;
  f.u.resize(N);
  f.a.resize(N);
  for (std::size_t n = 0; n + 1 < N; ++n) {
    f.u[n] = std::max(0.0, cfg.dist.survival(c[n + 1]) - cfg.dist.survival(c[n]));
  }
  f.u[N - 1] = cfg.dist.cdf(c[N - 1]);
  for (std::size_t n = 0; n < N; ++n) {
    f.a[n] = std::isfinite(c[n]) ? cfg.dist.density(c[n]) * c[n] / prefix[n] : 0.0;
  }
  return f;
}

double multinomial(const BallotVector& k) {
  int total = 0;
  double log_den = 0.0;
  for (int v : k) {
    total += v;
    log_den += std::lgamma(v + 1.0);
  }
  return std::exp(std::lgamma(total + 1.0) - log_den);
}

void check_ballot(const BallotVector& k, const SystemConfig& cfg) {
  if (static_cast<int>(k.size()) != cfg.workers || !is_ballot_vector(k)) {
    throw std::invalid_argument("g_value: not a ballot vector of length N");
  }
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Norm of v with its mean removed: the part of a step the projection keeps.
double tangent_norm(const std::vector<double>& v) {
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double e : v) s += (e - mean) * (e - mean);
  return std::sqrt(s);
}

}  // namespace

double g_value(const std::vector<double>& x, double t, const BallotVector& k, const SystemConfig& cfg) {
  check_ballot(k, cfg);
  const Factors f = factors(x, t, cfg);
  double g = multinomial(k);
  for (std::size_t n = 0; n < k.size(); ++n) {
    if (k[n] > 0) g *= std::pow(f.u[n], k[n]);
  }
  return g;
}

std::vector<double> g_gradient(const std::vector<double>& x, double t, const BallotVector& k,
                               const SystemConfig& cfg) {
  check_ballot(k, cfg);
  const std::size_t N = x.size();
  const Factors f = factors(x, t, cfg);
  const double C = multinomial(k);

  std::vector<double> power(N);
  for (std::size_t n = 0; n < N; ++n) power[n] = k[n] > 0 ? std::pow(f.u[n], k[n]) : 1.0;
  // others[n] = prod_{m != n} power[m], without dividing by a possibly zero factor.
  std::vector<double> others(N, 1.0);
  double left = 1.0;
  for (std::size_t n = 0; n < N; ++n) {
    others[n] = left;
    left *= power[n];
  }
  double right = 1.0;
  for (std::size_t n = N; n-- > 0;) {
    others[n] *= right;
    right *= power[n];
  }

  // ends[r] accumulates a coefficient applied to every j <= r.
  std::vector<double> ends(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    if (k[n] == 0) continue;
    const double w = C * k[n] * (k[n] > 1 ? std::pow(f.u[n], k[n] - 1) : 1.0) * others[n];
    if (w == 0.0) continue;
    if (n + 1 < N) {
      ends[n + 1] += w * f.a[n + 1];
      ends[n] -= w * f.a[n];
    } else {
      ends[N - 1] -= w * f.a[N - 1];
    }
  }
  std::vector<double> grad(N);
  double acc = 0.0;
  for (std::size_t j = N; j-- > 0;) {
    acc += ends[j];
    grad[j] = (j + 1) * acc;
  }
  return grad;
}

std::vector<double> ssca_subproblem(const std::vector<double>& x_prev, const std::vector<double>& h,
                                    double tau, double total) {
  if (!(tau > 0.0)) throw std::invalid_argument("ssca_subproblem: proximal weight must be positive");
  if (h.size() != x_prev.size()) throw std::invalid_argument("ssca_subproblem: length mismatch");
  std::vector<double> point(x_prev.size());
  for (std::size_t n = 0; n < point.size(); ++n) point[n] = x_prev[n] + h[n] / (2.0 * tau);
  return project_to_simplex_scaled(point, total);
}

std::vector<double> closed_form_large_t(const SystemConfig& cfg) {
  if (cfg.workers < 1) throw std::invalid_argument("closed_form_large_t: N must be >= 1");
  const double x0 = cfg.coordinates / harmonic_number(cfg.workers);
  std::vector<double> x(static_cast<std::size_t>(cfg.workers));
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = x0 / (n + 1);
  return x;
}

bool verify_large_t_reduction(const SystemConfig& cfg) {
  const int N = cfg.workers;
  std::vector<double> t(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) t[n - 1] = 1.0 / (N - n + 1);
  const std::vector<double> a = equalizing_allocation(t, cfg.coordinates);
  const std::vector<double> b = closed_form_large_t(cfg);
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (std::fabs(a[n] - b[n]) > 1e-12 * std::fabs(b[n])) return false;
  }
  return true;
}

bool stepsize_conditions_hold(double sigma_exponent, double gamma_exponent) {
  return 0.5 < sigma_exponent && sigma_exponent < gamma_exponent && gamma_exponent <= 1.0;
}

CdfSolution solve_completion_probability(const SystemConfig& cfg, double t, const SscaSolverOptions& opts) {
  cfg.validate();
  if (!(t > 0.0)) throw std::invalid_argument("solve_completion_probability: threshold must be positive");
  const bool scales_ok = !opts.proximal_scales.empty() &&
                         std::all_of(opts.proximal_scales.begin(), opts.proximal_scales.end(),
                                     [](double v) { return v > 0.0; });
  if (opts.iterations < 1 || opts.check_interval < 1 || opts.step_offset < 0 || !(opts.proximal_weight > 0.0) || !scales_ok ||
      opts.warmup_samples < 1 || (!opts.exact_objective && opts.check_trials < 1)) {
    throw std::invalid_argument("solve_completion_probability: invalid options");
  }
  if (!stepsize_conditions_hold(opts.sigma_exponent, opts.gamma_exponent)) {
    throw std::invalid_argument("solve_completion_probability: need 0.5 < a_sigma < a_gamma <= 1");
  }
  const int N = cfg.workers;
  const double L = cfg.coordinates;

  std::vector<std::vector<double>> check;
  if (!opts.exact_objective) check = sorted_runtime_draws(cfg, 0, opts.check_trials, opts.seed ^ 0xc4ecULL);
  const double scale = cfg.work_scale();
  auto score = [&](const std::vector<double>& x) -> std::pair<double, double> {
    if (opts.exact_objective) return {completion_prob_recursive(x, t, cfg), 0.0};
    const std::vector<double> prefix = weighted_prefix_sums(x);
    double hits = 0.0;
    for (const auto& T : check) hits += scale * runtime_kernel(prefix, T) <= t ? 1.0 : 0.0;
    const double n = static_cast<double>(check.size());
    const double p = hits / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
  };

  // Near P = 1 the probability carries no information in double precision;
  // there candidates are ranked by the large-threshold failure asymptote.
  const bool has_tail = opts.exact_objective && cfg.dist.as_shifted_exponential() != nullptr;
  auto better = [&](double p, const std::vector<double>& x, double p_ref, const std::vector<double>& x_ref) {
    if (has_tail && p >= 1.0 - kSaturated && p_ref >= 1.0 - kSaturated) {
      return asymptotic_failure(x, t, cfg) < asymptotic_failure(x_ref, t, cfg);
    }
    return p > p_ref;
  };

  std::vector<std::pair<std::string, std::vector<double>>> starts;
  if (opts.initial) {
    if (opts.initial->size() != static_cast<std::size_t>(N)) {
      throw std::invalid_argument("solve_completion_probability: initial point has wrong length");
    }
    starts.emplace_back("initial", project_to_simplex_scaled(*opts.initial, L));
  } else {
    const std::vector<double> uniform(static_cast<std::size_t>(N), L / N);
    starts.emplace_back("uniform", uniform);
    if (opts.warm_start_factor > 0.0 && N > 1) {
      const double typical = median(runtime_samples(uniform, cfg, 1001, opts.seed ^ 0x3ed1aULL));
      if (t > opts.warm_start_factor * typical) starts.emplace_back("large-t", closed_form_large_t(cfg));
    }
  }

  const BallotSampler sampler(N);
  CdfSolution best;
  best.probability = -1.0;
  // One run per (start, proximal scale); every run is scored on the same
  // objective, and the best checked iterate over all runs is reported.
  std::uint64_t run_index = 0;
  for (const auto& [start_name, start_x] : starts) {
    for (const double scale : opts.proximal_scales) {
      std::vector<double> x = start_x;
      CdfSolution run;
      run.start = start_name;
      run.proximal_weight = opts.proximal_weight * scale;
      run.x = x;
      std::tie(run.probability, run.std_error) = score(x);
      run.history.emplace_back(0, run.probability);

      if (N > 1) {
        RandomStream rng = RandomStream::substream(opts.seed, run_index);
        BallotVector k;
        double magnitude = 0.0;
        for (int w = 0; w < opts.warmup_samples; ++w) {
          sampler.sample_into(rng, k);
          magnitude += tangent_norm(g_gradient(x, t, k, cfg));
        }
        magnitude /= opts.warmup_samples;
        // Scale-free weight: at weight 1 an average sampled gradient moves
        // about L/2 of mass within the simplex.
        const double tau = magnitude > 0.0 ? run.proximal_weight * magnitude / L : run.proximal_weight;

        std::vector<double> h(static_cast<std::size_t>(N), 0.0);
        for (int i = 1; i <= opts.iterations; ++i) {
          sampler.sample_into(rng, k);
          const std::vector<double> grad = g_gradient(x, t, k, cfg);
          const double step_index = static_cast<double>(i + opts.step_offset);
          const double sigma = std::pow(step_index, -opts.sigma_exponent);
          const double gamma = std::pow(step_index, -opts.gamma_exponent);
          for (int n = 0; n < N; ++n) h[n] = (1.0 - sigma) * h[n] + sigma * grad[n];
          const std::vector<double> target = ssca_subproblem(x, h, tau, L);
          for (int n = 0; n < N; ++n) x[n] = gamma * target[n] + (1.0 - gamma) * x[n];
          run.iterations = i;
          if (i % opts.check_interval != 0 && i != opts.iterations) continue;
          const auto [p, se] = score(x);
          run.history.emplace_back(i, p);
          if (better(p, x, run.probability, run.x)) {
            run.probability = p;
            run.std_error = se;
            run.x = x;
          }
        }
      }
      ++run_index;
      if (best.probability < 0.0 || better(run.probability, run.x, best.probability, best.x)) best = std::move(run);
      if (N == 1) break;
    }
  }
  return best;
}

}  // namespace blockcode
