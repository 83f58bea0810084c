#include "ldhom/media.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldhom/errors.hpp"

namespace ldhom {

double ParameterizedCoarse::raw(double x) const {
  double acc = 0.0;
  double rm = 1.0;
  for (int m = 0; m < 8; ++m) {
    acc += xi[m] * rm * std::sin((2 * m + 1) * std::numbers::pi * x);
    rm *= r;
  }
  return 1.0 + amplitude * acc;
}

double ParameterizedCoarse::derivative_bound() const {
  double acc = 0.0;
  double rm = 1.0;
  for (int m = 0; m < 8; ++m) {
    acc += std::abs(xi[m]) * rm * (2 * m + 1) * std::numbers::pi;
    rm *= r;
  }
  return amplitude * acc;
}

double coarse_field(const ParameterizedCoarse& coarse, double x) { return std::max(coarse.raw(x), coarse.floor); }

std::vector<double> coarse_kinks(const ParameterizedCoarse& coarse) {
  constexpr int kScan = 4096;
  std::vector<double> kinks;
  auto g = [&](double x) { return coarse.raw(x) - coarse.floor; };
  double x0 = 0.0;
  double g0 = g(x0);
  for (int i = 1; i <= kScan; ++i) {
    const double x1 = static_cast<double>(i) / kScan;
    const double g1 = g(x1);
    if ((g0 < 0.0) != (g1 < 0.0)) {
      double lo = x0, hi = x1, glo = g0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      if (root > 0.0 && root < 1.0) kinks.push_back(root);
    }
    x0 = x1;
    g0 = g1;
  }
  return kinks;
}

ConvolvedCoarse ConvolvedCoarse::box(int xi, double h_norm, int kappa) {
  if (xi < 1) throw ConfigError("convolved media: xi must be a positive integer");
  if (kappa < 1) throw ConfigError("convolved media: kappa must be >= 1");
  if (!(h_norm > 0.0)) throw ConfigError("convolved media: ||h||_1 must be > 0");
  ConvolvedCoarse c;
  c.xi = xi;
  c.kernel.assign(kappa, h_norm / kappa);
  return c;
}

double ConvolvedCoarse::h_norm() const {
  double acc = 0.0;
  for (double h : kernel) acc += h;
  return acc;
}

double ConvolvedCoarse::h_sq_sum() const {
  double acc = 0.0;
  for (double h : kernel) acc += h * h;
  return acc;
}

std::size_t cell_count(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) throw ConfigError("epsilon must lie in (0, 1]");
  const double inv = 1.0 / epsilon;
  const double n = std::round(inv);
  if (std::abs(inv - n) > 1e-9 * n) throw ConfigError("1/epsilon must be an integer");
  return static_cast<std::size_t>(n);
}

MediaModel sample_coarse(MediaFamily family, Rng& rng) {
  if (family == MediaFamily::Parameterized) {
    ParameterizedCoarse c;
    for (double& v : c.xi) v = rng.uniform(-1.0, 1.0);
    return MediaModel{c};
  }
  ConvolvedCoarse c;
  c.xi = static_cast<int>(rng.geometric(0.2));
  return MediaModel{c};
}

std::vector<double> convolve_window(const ConvolvedCoarse& coarse, const std::vector<double>& beta_window,
                                    std::size_t n_cells) {
  const std::size_t kappa = coarse.kernel.size();
  std::vector<double> gamma(n_cells, 0.0);
  for (std::size_t n = 0; n < n_cells; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kappa; ++k) acc += coarse.kernel[k] * beta_window[n + kappa - 1 - k];
    gamma[n] = acc;
  }
  return gamma;
}

FieldRealization sample_fine(const MediaModel& model, double epsilon, Rng& rng) {
  FieldRealization out;
  out.epsilon = epsilon;
  out.n_cells = cell_count(epsilon);
  if (model.is_parameterized()) {
    out.inv_cells.resize(out.n_cells);
    for (double& theta : out.inv_cells) theta = rng.uniform(-1.0, 1.0);
    return out;
  }
  const auto& c = model.convolved();
  out.beta_window.resize(out.n_cells + c.kernel.size() - 1);
  for (double& b : out.beta_window) b = rng.chi_squared(c.xi);
  out.inv_cells = convolve_window(c, out.beta_window, out.n_cells);
  return out;
}

double inv_coeff_at(const MediaModel& model, const FieldRealization& realization, double s) {
  const std::size_t n = std::min(realization.n_cells - 1, static_cast<std::size_t>(std::max(0.0, s) * realization.n_cells));
  if (!model.is_parameterized()) return realization.inv_cells[n];
  const auto& c = model.parameterized();
  const double denom = coarse_field(c, s) + c.nu_b * realization.inv_cells[n];
  if (!(denom > 0.0)) throw NumericalError("inv_coeff_at: nonpositive coefficient");
  return 1.0 / denom;
}

double valpha_mean(double alpha, double nu_b) {
  if (!(alpha > nu_b)) throw NumericalError("V_alpha: alpha must exceed nu_b");
  return std::log1p(2.0 * nu_b / (alpha - nu_b)) / (2.0 * nu_b);
}

double valpha_variance(double alpha, double nu_b) {
  const double mean = valpha_mean(alpha, nu_b);
  return 1.0 / (alpha * alpha - nu_b * nu_b) - mean * mean;
}

double homogenized_inv(const MediaModel& model, double x) {
  if (model.is_parameterized()) {
    const auto& c = model.parameterized();
    return valpha_mean(coarse_field(c, x), c.nu_b);
  }
  const auto& c = model.convolved();
  return c.xi * c.h_norm();
}

double homogenized_coeff(const MediaModel& model, double x) { return 1.0 / homogenized_inv(model, x); }

double sigma_sq(const MediaModel& model, double t) {
  if (model.is_parameterized()) {
    const auto& c = model.parameterized();
    return valpha_variance(coarse_field(c, t), c.nu_b);
  }
  const auto& c = model.convolved();
  const double h = c.h_norm();
  return 2.0 * c.xi * h * h;
}

double covariance_bound(const MediaModel& model) {
  if (!model.is_parameterized()) return sigma_sq(model, 0.0);
  const auto& c = model.parameterized();
  double a_min = coarse_field(c, 0.0);
  for (int i = 1; i <= 4096; ++i) a_min = std::min(a_min, coarse_field(c, i / 4096.0));
  return valpha_variance(a_min, c.nu_b);
}

std::vector<double> coefficient_breakpoints(const MediaModel& model) {
  if (model.is_parameterized()) return coarse_kinks(model.parameterized());
  return {};
}

ParameterizedCoarse mild_preset() {
  ParameterizedCoarse c;
  c.xi = {0.3, -0.2, 0.1, 0.4, -0.3, 0.2, -0.1, 0.05};
  return c;
}

ParameterizedCoarse wild_preset() {
  ParameterizedCoarse c;
  c.xi = {-0.6, 0.5, -0.4, 0.3, 0.2, -0.3, 0.4, 0.1};
  return c;
}

}  // namespace ldhom
