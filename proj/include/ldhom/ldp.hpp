#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ldhom/media.hpp"
#include "ldhom/solver.hpp"
#include "ldhom/source.hpp"

namespace ldhom {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

/// Value and first two derivatives of a scalar log-MGF.
struct LogMgf {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// log E exp(t V_alpha), V_alpha = 1/(alpha + nu_b theta), theta ~ U[-1, 1].
double log_mgf_valpha(double alpha, double nu_b, double t);
LogMgf log_mgf_valpha_derivs(double alpha, double nu_b, double t);

/// -(xi/2) log(1 - 2t) for t < 1/2, +inf otherwise.
double log_mgf_chisq(double xi, double t);
LogMgf log_mgf_chisq_derivs(double xi, double t);

enum class CramerKind { Full4D, Approx1D };

struct CramerEval {
  double value = 0.0;
  Vec4 grad{};
  Mat4 hess{};
};

/// Limiting Cramer functional of Z at a point x, evaluated by Gauss-Legendre
/// panels aligned to the kinks of F, a(x) and the split at x.
class CramerFunctional {
 public:
  CramerFunctional(const MediaModel& model, const SourceSpec& f, double x, int n_panels = 512, int order = 8);

  const MediaModel& model() const { return model_; }
  const SourceSpec& source() const { return source_; }
  double x() const { return x_; }
  const HomogenizedPoint& homogenized() const { return hom_; }
  int n_panels() const { return n_panels_; }

  /// Full 4D functional; +inf outside the effective domain.
  double full(const Vec4& lambda) const;
  /// Value, gradient and Hessian; value is +inf outside the domain and the
  /// derivatives are then left at zero.
  CramerEval full_derivs(const Vec4& lambda) const;
  /// grad of the full functional at 0: the mean of Z.
  Vec4 mean() const;

  /// Scalar functional of u0 + v_eps: lambda u0 + int[-lambda G/A0 + Lambda(lambda G)].
  double approx(double lambda) const;
  LogMgf approx_derivs(double lambda) const;

  /// G(x, s) = kappa . H(s).
  const Vec4& green_coeffs() const { return kappa_; }

 private:
  struct Node {
    double weight;
    double a;
    Vec4 h;
  };
  struct PanelEnds {
    Vec4 lo;
    Vec4 hi;
  };

  LogMgf site(const Node& node, double t) const;
  bool in_domain(const Vec4& lambda) const;

  MediaModel model_;
  SourceSpec source_;
  double x_;
  int n_panels_;
  HomogenizedPoint hom_;
  Vec4 kappa_{};
  double approx_offset_ = 0.0;
  std::vector<Node> nodes_;
  std::vector<PanelEnds> ends_;
  bool parameterized_;
  double nu_b_ = 0.0;
  double xi_ = 0.0;
  double h_norm_ = 0.0;
};

struct SteepnessReport {
  bool condition1 = false;
  bool condition2 = false;
  bool condition3 = false;
  bool condition3_supported = true;
  int local_order = 0;
  bool steep = false;
  std::string note;
};

/// True when int_{b-1}^b dt / (b-t)^(p + (r-1)/r) diverges, i.e. when the
/// derivative of the log-MGF blows up like (b-t)^(-p) and F has local order r.
bool comparison_integral_diverges(double singular_exponent, int local_order);

SteepnessReport steepness_check(const MediaModel& model, const SourceSpec& f);

/// Exact finite-epsilon log-MGF of the linearized u0 + v_eps built from
/// per-cell MGFs, and the Chernoff upper bound on eps log P[u0 + v_eps >= ell].
class ChernoffBound {
 public:
  ChernoffBound(const MediaModel& model, const SourceSpec& f, double x, double epsilon, int gauss_order = 8);

  double mean() const { return mean_; }
  double epsilon() const { return epsilon_; }
  /// log E exp(mu (u0 + v_eps)).
  double log_mgf(double mu) const;
  double bound(double ell) const;

 private:
  double epsilon_;
  double offset_ = 0.0;
  double mean_ = 0.0;
  bool parameterized_;
  double xi_ = 0.0;
  double h0_ = 0.0;
  std::vector<double> cell_g_;     // convolved: int_cell G
  std::vector<double> theta_w_;    // parameterized: log of theta weights / 2
  std::vector<double> phi_;        // parameterized: cell-major table of phi_n(theta_k)
  std::size_t n_theta_ = 0;
};

/// eps log E exp(lambda . Z_eps / eps) in closed form for convolved media
/// with a Dirac kernel, where Z_eps is a sum of independent chi-squared cells.
double cramer_prelimit(const MediaModel& model, const SourceSpec& f, double x, double epsilon, const Vec4& lambda);

double chernoff_bound(const MediaModel& model, const SourceSpec& f, double x, double epsilon, double ell);

enum class RateStatus { Converged, Boundary, Infinite, NotConverged };
const char* status_name(RateStatus status);

struct Legendre1DResult {
  double rate = 0.0;
  double lambda_star = 0.0;
  RateStatus status = RateStatus::Converged;
};

struct Legendre1DOptions {
  double lambda_min = -kInf;
  double initial_step = 1e-2;
  double lambda_cap = 1e12;
};

/// sup_lambda [lambda ell - Lambda(lambda)] for a convex extended-real Lambda
/// with Lambda(0) = 0.
Legendre1DResult legendre_1d(const std::function<double(double)>& lambda_fn, double ell,
                             const Legendre1DOptions& options = {});

struct Legendre4DResult {
  double rate = 0.0;
  Vec4 lambda_star{};
  RateStatus status = RateStatus::Converged;
  int iterations = 0;
};

struct Legendre4DOptions {
  int max_iterations = 200;
  double lambda_cap = 1e8;
  std::optional<Vec4> warm_start;
};

/// sup_lambda [lambda . z - Lambda(lambda)] by damped Newton ascent.
Legendre4DResult legendre_4d(const CramerFunctional& cf, const ZVector& z, const Legendre4DOptions& options = {});

struct RateFullResult {
  double rate = kInf;
  ZVector z_star;
  Vec4 lambda_star{};
  RateStatus status = RateStatus::NotConverged;
  /// Newton iterations spent across the continuation.
  int evaluations = 0;
};

struct RateFullOptions {
  int max_evaluations = 600;
  double lambda_cap = 1e6;
  /// A converged multiplier from a nearby level; the continuation starts
  /// from the level it attains instead of from u0.
  std::optional<Vec4> warm_lambda;
};

/// inf of the 4D rate over {z : g(z) = ell}. The minimizer is z = grad Lambda(lambda)
/// with lambda = mu grad g(z); that system is solved by damped Newton in
/// (lambda, mu), continued in the level from the mean outward.
RateFullResult rate_full(const CramerFunctional& cf, double ell, const RateFullOptions& options = {});

/// Approximate rate I~(ell) from the scalar functional.
Legendre1DResult rate_approx(const CramerFunctional& cf, double ell);

struct RateCurve {
  std::vector<double> levels;
  std::vector<double> values;
  std::vector<double> lambda_star;
  std::vector<ZVector> z_star;
  std::vector<RateStatus> status;
};

RateCurve approx_curve(const CramerFunctional& cf, const std::vector<double>& levels);
/// Levels are swept outward from u0 so each level warm-starts from its
/// neighbour.
RateCurve full_curve(const CramerFunctional& cf, const std::vector<double>& levels, int max_evaluations = 600);

}  // namespace ldhom
