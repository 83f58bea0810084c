#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include "ldhom/rng.hpp"

namespace ldhom {

/// Low-frequency part of the parameterized medium:
/// a(x) = max{1 + amplitude * sum_m xi_m r^m sin((2m+1) pi x), floor}.
struct ParameterizedCoarse {
  std::array<double, 8> xi{};
  double r = 0.75;
  double floor = 17.0 / 32.0;
  double amplitude = 2.0 / 3.0;
  double nu_b = 0.5;

  double raw(double x) const;
  double derivative_bound() const;
};

double coarse_field(const ParameterizedCoarse& coarse, double x);

/// Points in (0, 1) where the truncation at the floor switches on or off.
std::vector<double> coarse_kinks(const ParameterizedCoarse& coarse);

/// Chi-squared(xi) white noise smoothed by a finite nonnegative kernel h_0..h_{kappa-1}.
struct ConvolvedCoarse {
  int xi = 1;
  std::vector<double> kernel{1.0};

  static ConvolvedCoarse box(int xi, double h_norm, int kappa);
  int kappa() const { return static_cast<int>(kernel.size()); }
  double h_norm() const;
  double h_sq_sum() const;
  bool is_dirac() const { return kernel.size() == 1; }
};

enum class MediaFamily { Parameterized, Convolved };

struct MediaModel {
  std::variant<ParameterizedCoarse, ConvolvedCoarse> variant;

  MediaFamily family() const {
    return std::holds_alternative<ParameterizedCoarse>(variant) ? MediaFamily::Parameterized : MediaFamily::Convolved;
  }
  bool is_parameterized() const { return family() == MediaFamily::Parameterized; }
  const ParameterizedCoarse& parameterized() const { return std::get<ParameterizedCoarse>(variant); }
  const ConvolvedCoarse& convolved() const { return std::get<ConvolvedCoarse>(variant); }
};

/// One fine-scale draw. For parameterized media `inv_cells` holds theta_n in
/// [-1, 1]; for convolved media it holds gamma_n = 1/A on cell n and
/// `beta_window[j]` is beta_{j-kappa+1}, so cell n uses entries n..n+kappa-1.
struct FieldRealization {
  double epsilon = 1.0;
  std::size_t n_cells = 1;
  std::vector<double> inv_cells;
  std::vector<double> beta_window;
};

/// Number of cells 1/epsilon; throws ConfigError unless it is an integer.
std::size_t cell_count(double epsilon);

MediaModel sample_coarse(MediaFamily family, Rng& rng);
FieldRealization sample_fine(const MediaModel& model, double epsilon, Rng& rng);

/// gamma_n from a padded beta window.
std::vector<double> convolve_window(const ConvolvedCoarse& coarse, const std::vector<double>& beta_window,
                                    std::size_t n_cells);

double inv_coeff_at(const MediaModel& model, const FieldRealization& realization, double s);

/// Moments of V_alpha = 1/(alpha + nu_b theta), theta ~ U[-1, 1].
double valpha_mean(double alpha, double nu_b);
double valpha_variance(double alpha, double nu_b);

double homogenized_coeff(const MediaModel& model, double x);
/// E[1/A(x, .)] = 1/A0(x).
double homogenized_inv(const MediaModel& model, double x);
double sigma_sq(const MediaModel& model, double t);

/// Integrated covariance constant of 1/A bounding the homogenization error:
/// the largest Var(V_alpha) over x for parameterized media, the lag sum
/// 2 xi ||h||_1^2 for convolved media.
double covariance_bound(const MediaModel& model);

/// Points where 1/A0 (and sigma^2) lose smoothness.
std::vector<double> coefficient_breakpoints(const MediaModel& model);

/// Fixed low-frequency draws used by the figure recipes.
ParameterizedCoarse mild_preset();
ParameterizedCoarse wild_preset();

}  // namespace ldhom
