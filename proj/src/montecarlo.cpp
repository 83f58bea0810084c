#include "ldhom/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldhom/errors.hpp"
#include "ldhom/quadrature.hpp"

namespace ldhom {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
}

double bradford_inverse(double c, double u) {
  if (c <= 0.0) return 2.0 * u - 1.0;
  return (2.0 / c) * (std::pow(1.0 + c, u) - 1.0) - 1.0;
}

double bradford_sample(double c, Rng& rng) { return bradford_inverse(c, rng.uniform()); }

double bradford_log_density(double c, double theta) {
  if (c <= 0.0) return std::log(0.5);
  return std::log(c) - std::log(2.0 * std::log1p(c)) - std::log1p(0.5 * c * (theta + 1.0));
}

McProblem::McProblem(const MediaModel& model, const SourceSpec& f, double epsilon, double x, int gauss_order)
    : model_(model),
      epsilon_(epsilon),
      x_(x),
      kernel_(model, f, x, epsilon, gauss_order),
      hom_(homogenize_point(model, f, x)) {}

double McProblem::observe(const ZVector& z, Observable observable) const {
  if (observable == Observable::Solution) return g_map(z);
  return hom_.u0 + expansion_terms(z, hom_).v_eps;
}

namespace {

struct Draw {
  double value;
  double log_weight;
};

Draw draw_parameterized(const McProblem& p, double c, Observable obs, std::uint64_t seed, std::size_t index) {
  Rng rng(seed, index);
  const PointKernel& k = p.kernel();
  const double log_uniform = std::log(0.5);
  ZVector z;
  double lw = 0.0;
  for (std::size_t n = 0; n < k.n_cells(); ++n) {
    const double theta = bradford_sample(c, rng);
    if (c > 0.0) lw += log_uniform - bradford_log_density(c, theta);
    const auto part = k.cell_contribution(n, theta);
    for (int i = 0; i < 4; ++i) z[i] += part[i];
  }
  return {p.observe(z, obs), lw};
}

Draw draw_convolved(const McProblem& p, double eta, Observable obs, std::uint64_t seed, std::size_t index,
                    std::vector<double>& beta) {
  Rng rng(seed, index);
  const auto& coarse = p.model().convolved();
  const PointKernel& k = p.kernel();
  const std::size_t kappa = coarse.kernel.size();
  const std::size_t n_cells = k.n_cells();
  beta.resize(n_cells + kappa - 1);
  const double shape = 0.5 * coarse.xi;
  const double scale = 2.0 / (1.0 - 2.0 * eta);
  const double log_norm = shape * std::log(1.0 / (1.0 - 2.0 * eta));
  double lw = 0.0;
  for (double& b : beta) {
    b = rng.gamma(shape, scale);
    if (eta != 0.0) lw += -eta * b + log_norm;
  }
  ZVector z;
  for (std::size_t n = 0; n < n_cells; ++n) {
    double gamma = 0.0;
    for (std::size_t j = 0; j < kappa; ++j) gamma += coarse.kernel[j] * beta[n + kappa - 1 - j];
    const auto& m = k.cell_moment(n);
    for (int i = 0; i < 4; ++i) z[i] += gamma * m[i];
  }
  return {p.observe(z, obs), lw};
}

WeightedSamples prepare(const McProblem& p, const McConfig& config, const char* kind, double parameter) {
  WeightedSamples s;
  s.values.resize(config.n);
  s.log_weights.resize(config.n);
  s.epsilon = p.epsilon();
  s.x = p.x();
  s.n = config.n;
  s.master_seed = config.master_seed;
  s.tilt.kind = parameter == 0.0 ? "direct" : kind;
  s.tilt.parameter = parameter;
  return s;
}

int thread_count(const McConfig& config) { return config.threads > 0 ? config.threads : omp_get_max_threads(); }

void check_parameterized(const McProblem& p, double c) {
  if (!p.model().is_parameterized()) throw ConfigError("parameterized IS needs a parameterized medium");
  if (c < 0.0) throw ConfigError("Bradford parameter c must be >= 0");
}

void check_convolved(const McProblem& p, double eta) {
  if (p.model().is_parameterized()) throw ConfigError("convolved IS needs a convolved medium");
  if (!(eta < 0.5)) throw ConfigError("chi-squared tilt eta must be < 1/2");
}

}  // namespace

WeightedSamples run_parameterized_is(const McProblem& problem, double c, const McConfig& config) {
  check_parameterized(problem, c);
  WeightedSamples s = prepare(problem, config, "bradford", c);
  const auto n = static_cast<std::int64_t>(config.n);
#pragma omp parallel for schedule(static) num_threads(thread_count(config))
  for (std::int64_t i = 0; i < n; ++i) {
    const Draw d = draw_parameterized(problem, c, config.observable, config.master_seed, static_cast<std::size_t>(i));
    s.values[i] = d.value;
    s.log_weights[i] = d.log_weight;
  }
  return s;
}

WeightedSamples run_parameterized_is_serial(const McProblem& problem, double c, const McConfig& config) {
  check_parameterized(problem, c);
  WeightedSamples s = prepare(problem, config, "bradford", c);
  for (std::size_t i = 0; i < config.n; ++i) {
    const Draw d = draw_parameterized(problem, c, config.observable, config.master_seed, i);
    s.values[i] = d.value;
    s.log_weights[i] = d.log_weight;
  }
  return s;
}

WeightedSamples run_convolved_is(const McProblem& problem, double eta, const McConfig& config) {
  check_convolved(problem, eta);
  WeightedSamples s = prepare(problem, config, "chisq_tilt", eta);
  const auto n = static_cast<std::int64_t>(config.n);
#pragma omp parallel num_threads(thread_count(config))
  {
    std::vector<double> beta;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const Draw d =
          draw_convolved(problem, eta, config.observable, config.master_seed, static_cast<std::size_t>(i), beta);
      s.values[i] = d.value;
      s.log_weights[i] = d.log_weight;
    }
  }
  return s;
}

WeightedSamples run_convolved_is_serial(const McProblem& problem, double eta, const McConfig& config) {
  check_convolved(problem, eta);
  WeightedSamples s = prepare(problem, config, "chisq_tilt", eta);
  std::vector<double> beta;
  for (std::size_t i = 0; i < config.n; ++i) {
    const Draw d = draw_convolved(problem, eta, config.observable, config.master_seed, i, beta);
    s.values[i] = d.value;
    s.log_weights[i] = d.log_weight;
  }
  return s;
}

WeightedSamples run_is(const McProblem& problem, double tilt, const McConfig& config) {
  return problem.model().is_parameterized() ? run_parameterized_is(problem, tilt, config)
                                            : run_convolved_is(problem, tilt, config);
}

double weighted_mean(const WeightedSamples& samples) {
  if (samples.values.empty()) throw NumericalError("weighted_mean: no samples");
  const double top = *std::max_element(samples.log_weights.begin(), samples.log_weights.end());
  std::vector<double> w(samples.values.size()), wx(samples.values.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(samples.log_weights[i] - top);
    wx[i] = w[i] * samples.values[i];
  }
  return pairwise_sum(wx) / pairwise_sum(w);
}

EmpiricalRate empirical_rate(const WeightedSamples& samples, const std::vector<double>& levels,
                             std::optional<double> reference_mean) {
  if (samples.values.empty()) throw NumericalError("empirical_rate: no samples");
  EmpiricalRate out;
  out.reference_mean = reference_mean ? *reference_mean : weighted_mean(samples);
  const double log_n = std::log(static_cast<double>(samples.values.size()));
  std::vector<double> lw, lw2;
  for (double ell : levels) {
    const bool upper = ell > out.reference_mean;
    lw.clear();
    lw2.clear();
    for (std::size_t j = 0; j < samples.values.size(); ++j) {
      const double x = samples.values[j];
      if (upper ? x >= ell : x <= ell) {
        lw.push_back(samples.log_weights[j]);
        lw2.push_back(2.0 * samples.log_weights[j]);
      }
    }
    out.levels.push_back(ell);
    out.n_exceed.push_back(lw.size());
    if (lw.empty()) {
      out.log_prob.push_back(-kInfinity);
      out.values.push_back(-kInfinity);
      out.ess.push_back(0.0);
      out.clipped.push_back(0);
      continue;
    }
    const double lse = log_sum_exp(lw);
    double log_p = lse - log_n;
    int clipped = 0;
    if (log_p > 0.0) {
      log_p = 0.0;
      clipped = 1;
    }
    out.log_prob.push_back(log_p);
    out.values.push_back(samples.epsilon * log_p);
    out.ess.push_back(std::exp(2.0 * lse - log_sum_exp(lw2)));
    out.clipped.push_back(clipped);
  }
  return out;
}

std::vector<double> tilt_candidates(MediaFamily family, int count) {
  std::vector<double> out;
  if (family == MediaFamily::Parameterized) {
    // c = 0 and a geometric sweep up to 1e3.
    out.push_back(0.0);
    for (int i = 1; i < count; ++i) out.push_back(0.05 * std::pow(2e4, static_cast<double>(i - 1) / (count - 2)));
  } else {
    for (int i = 0; i < count; ++i) out.push_back(0.48 * i / (count - 1));
  }
  return out;
}

TiltChoice choose_tilt(const McProblem& problem, double level, std::size_t pilot_n, std::uint64_t seed,
                       Observable observable, int count) {
  TiltChoice best;
  const auto candidates = tilt_candidates(problem.model().family(), count);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    McConfig cfg;
    cfg.n = pilot_n;
    cfg.master_seed = derive_seed(seed, k);
    cfg.observable = observable;
    const auto samples = run_is(problem, candidates[k], cfg);
    const auto rate = empirical_rate(samples, {level}, -kInfinity);
    if (rate.ess[0] > best.ess) {
      best.parameter = candidates[k];
      best.ess = rate.ess[0];
      best.hits = rate.n_exceed[0];
    }
  }
  return best;
}

}  // namespace ldhom
