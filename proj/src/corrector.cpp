#include "ldhom/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ldhom/errors.hpp"
#include "ldhom/quadrature.hpp"

namespace ldhom {

namespace {

std::vector<double> kernel_breaks(const MediaModel& model, const SourceSpec& f, std::vector<double> extra) {
  std::vector<double> pts = f.breakpoints();
  const auto kinks = coefficient_breakpoints(model);
  pts.insert(pts.end(), kinks.begin(), kinks.end());
  pts.insert(pts.end(), extra.begin(), extra.end());
  return merge_breakpoints(pts);
}

}  // namespace

double corrector_covariance(const MediaModel& model, const SourceSpec& f, double x1, double x2) {
  if (f.is_zero()) return 0.0;
  const auto h1 = homogenize_point(model, f, x1);
  const auto h2 = homogenize_point(model, f, x2);
  auto integrand = [&](double t) { return green_kernel(h1, f, t) * green_kernel(h2, f, t) * sigma_sq(model, t); };
  const auto q = adaptive_simpson_pieces(integrand, kernel_breaks(model, f, {x1, x2}), 1e-12);
  if (!q.converged) throw NumericalError("corrector variance quadrature did not converge");
  return q.value;
}

double corrector_variance(const MediaModel& model, const SourceSpec& f, double x) {
  return corrector_covariance(model, f, x, x);
}

CorrectorSampler::CorrectorSampler(const CorrectorSpec& spec, const std::vector<double>& grid) : grid_(grid) {
  if (spec.wiener_grid_size < 10) throw ConfigError("wiener_grid_size must be >= 10");
  std::vector<double> pts;
  for (int i = 1; i < spec.wiener_grid_size; ++i) pts.push_back(static_cast<double>(i) / spec.wiener_grid_size);
  const auto nodes = kernel_breaks(spec.model, spec.f, [&] {
    std::vector<double> extra = pts;
    extra.insert(extra.end(), grid.begin(), grid.end());
    return extra;
  }());
  n_steps_ = nodes.size() - 1;
  std::vector<double> mids(n_steps_), scale(n_steps_);
  for (std::size_t i = 0; i < n_steps_; ++i) {
    mids[i] = 0.5 * (nodes[i] + nodes[i + 1]);
    scale[i] = std::sqrt(sigma_sq(spec.model, mids[i]) * (nodes[i + 1] - nodes[i]));
  }
  coeffs_.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid[j];
    coeffs_[j].assign(n_steps_, 0.0);
    if (x <= 0.0 || x >= 1.0) continue;
    const auto hom = homogenize_point(spec.model, spec.f, x);
    for (std::size_t i = 0; i < n_steps_; ++i) coeffs_[j][i] = green_kernel(hom, spec.f, mids[i]) * scale[i];
  }
}

std::vector<double> CorrectorSampler::sample(Rng& rng) const {
  std::vector<double> zeta(n_steps_);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& z : zeta) z = normal(rng);
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_steps_; ++i) acc += coeffs_[j][i] * zeta[i];
    out[j] = acc;
  }
  return out;
}

double CorrectorSampler::discrete_variance(std::size_t j) const {
  double acc = 0.0;
  for (double c : coeffs_[j]) acc += c * c;
  return acc;
}

SolutionPath sample_corrector(const CorrectorSpec& spec, const std::vector<double>& grid, Rng& rng) {
  CorrectorSampler sampler(spec, grid);
  SolutionPath path;
  path.grid = grid;
  path.values = sampler.sample(rng);
  path.v_eps = path.values;
  return path;
}

double gaussian_rate(double u0, double c_c, double ell) {
  if (!(c_c > 0.0)) throw NumericalError("gaussian_rate: corrector variance must be positive");
  const double d = ell - u0;
  return d * d / (2.0 * c_c);
}

CltReport clt_validity(double u0, double c_c, double epsilon, double ell, double factor) {
  const double d2 = (ell - u0) * (ell - u0);
  CltReport report;
  report.lhs = std::log(c_c * epsilon / d2);
  report.rhs = d2 / (c_c * epsilon);
  report.valid = std::max(std::abs(report.lhs), 1.0) < report.rhs / factor;
  return report;
}

}  // namespace ldhom
