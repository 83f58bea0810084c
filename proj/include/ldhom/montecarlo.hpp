#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldhom/media.hpp"
#include "ldhom/rng.hpp"
#include "ldhom/solver.hpp"
#include "ldhom/source.hpp"

namespace ldhom {

/// Inverse CDF of the shifted Bradford law on (-1, 1); mass piles up near -1.
double bradford_inverse(double c, double u);
double bradford_sample(double c, Rng& rng);
double bradford_log_density(double c, double theta);

/// u_eps(x) itself, or its linearization u0 + v_eps.
enum class Observable { Solution, Linearized };

struct TiltDescriptor {
  std::string kind = "direct";  // direct | bradford | chisq_tilt
  double parameter = 0.0;
};

struct WeightedSamples {
  std::vector<double> values;
  std::vector<double> log_weights;
  double epsilon = 0.0;
  double x = 0.5;
  std::size_t n = 0;
  std::uint64_t master_seed = 0;
  TiltDescriptor tilt;
};

struct McConfig {
  std::size_t n = 1000;
  std::uint64_t master_seed = 0;
  Observable observable = Observable::Solution;
  int threads = 0;  // 0: OpenMP default
};

/// Everything a sample needs that does not depend on the draw.
class McProblem {
 public:
  McProblem(const MediaModel& model, const SourceSpec& f, double epsilon, double x, int gauss_order = 8);

  const MediaModel& model() const { return model_; }
  const PointKernel& kernel() const { return kernel_; }
  const HomogenizedPoint& homogenized() const { return hom_; }
  double epsilon() const { return epsilon_; }
  double x() const { return x_; }
  double observe(const ZVector& z, Observable observable) const;

 private:
  MediaModel model_;
  double epsilon_;
  double x_;
  PointKernel kernel_;
  HomogenizedPoint hom_;
};

/// Bradford-tilted theta per cell; c = 0 samples U[-1, 1] directly.
WeightedSamples run_parameterized_is(const McProblem& problem, double c, const McConfig& config);
WeightedSamples run_parameterized_is_serial(const McProblem& problem, double c, const McConfig& config);

/// beta ~ Gamma(xi/2, 2/(1-2 eta)), the exponential tilt of chi-squared(xi).
WeightedSamples run_convolved_is(const McProblem& problem, double eta, const McConfig& config);
WeightedSamples run_convolved_is_serial(const McProblem& problem, double eta, const McConfig& config);

/// Dispatch on the media family: the tilt is c for parameterized media and
/// eta for convolved media.
WeightedSamples run_is(const McProblem& problem, double tilt, const McConfig& config);

/// Self-normalized weighted mean.
double weighted_mean(const WeightedSamples& samples);

struct EmpiricalRate {
  std::vector<double> levels;
  std::vector<double> values;  // signed: eps log P-hat
  std::vector<double> log_prob;
  std::vector<double> ess;
  std::vector<std::size_t> n_exceed;
  std::vector<int> clipped;
  double reference_mean = 0.0;
};

/// eps log((1/N) sum w_j 1{X_j >= ell}) above the reference mean and the
/// lower-tail analogue below it; zero hits give -inf.
EmpiricalRate empirical_rate(const WeightedSamples& samples, const std::vector<double>& levels,
                             std::optional<double> reference_mean = std::nullopt);

struct TiltChoice {
  double parameter = 0.0;
  double ess = 0.0;
  std::size_t hits = 0;
};

std::vector<double> tilt_candidates(MediaFamily family, int count = 32);

/// Pilot runs over the candidates; keeps the one with the largest ESS among
/// samples exceeding `level`.
TiltChoice choose_tilt(const McProblem& problem, double level, std::size_t pilot_n, std::uint64_t seed,
                       Observable observable = Observable::Solution, int count = 32);

}  // namespace ldhom
