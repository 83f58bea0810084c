#pragma once

#include <vector>

#include "ldhom/media.hpp"
#include "ldhom/rng.hpp"
#include "ldhom/solver.hpp"
#include "ldhom/source.hpp"

namespace ldhom {

struct CorrectorSpec {
  MediaModel model;
  SourceSpec f;
  int wiener_grid_size = 2000;
};

/// C_c(x) = int_0^1 G(x,t)^2 sigma^2(t) dt.
double corrector_variance(const MediaModel& model, const SourceSpec& f, double x);
/// int_0^1 G(x1,t) G(x2,t) sigma^2(t) dt.
double corrector_covariance(const MediaModel& model, const SourceSpec& f, double x1, double x2);

/// Discretized Wiener integral v(x) = sum_i G(x,t_i) sigma(t_i) sqrt(dt_i) zeta_i.
/// The Wiener grid is uniform, refined to contain the breakpoints of F and
/// a(x) and every requested x, with G and sigma taken at interval midpoints.
class CorrectorSampler {
 public:
  CorrectorSampler(const CorrectorSpec& spec, const std::vector<double>& grid);

  const std::vector<double>& grid() const { return grid_; }
  std::size_t wiener_size() const { return n_steps_; }
  /// One joint path at all grid points; the same zeta drive every x.
  std::vector<double> sample(Rng& rng) const;
  /// Exact variance of the discretized sum at grid point j.
  double discrete_variance(std::size_t j) const;

 private:
  std::vector<double> grid_;
  std::size_t n_steps_ = 0;
  std::vector<std::vector<double>> coeffs_;  // per grid point, per Wiener step
};

SolutionPath sample_corrector(const CorrectorSpec& spec, const std::vector<double>& grid, Rng& rng);

/// (ell - u0)^2 / (2 C_c).
double gaussian_rate(double u0, double c_c, double ell);

struct CltReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool valid = false;
};

/// lhs = log(C_c eps / d^2), rhs = d^2 / (C_c eps) with d = ell - u0; the
/// regime counts as valid when max(|lhs|, 1) < rhs / factor.
CltReport clt_validity(double u0, double c_c, double epsilon, double ell, double factor = 10.0);

}  // namespace ldhom
