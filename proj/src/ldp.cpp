#include "ldhom/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ldhom/errors.hpp"
#include "ldhom/quadrature.hpp"

namespace ldhom {

namespace {

constexpr double kTruncate = 40.0;   // drop exp(-40) tails
constexpr double kMaxPhase = 10.0;   // |t| * width per panel
constexpr double kMaxRatio = 2.0;    // v_hi / v_lo per panel
constexpr int kVOrder = 16;

double dot(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

}  // namespace

LogMgf log_mgf_valpha_derivs(double alpha, double nu_b, double t) {
  if (!(alpha > nu_b) || !(nu_b > 0.0)) throw NumericalError("log_mgf_valpha: need alpha > nu_b > 0");
  LogMgf out;
  if (t == 0.0) {
    out.d1 = valpha_mean(alpha, nu_b);
    out.d2 = valpha_variance(alpha, nu_b);
    return out;
  }
  const double v_lo = 1.0 / (alpha + nu_b);
  const double v_hi = 1.0 / (alpha - nu_b);
  const double at = std::abs(t);
  const double vm = t > 0.0 ? v_hi : v_lo;
  double lo = v_lo, hi = v_hi;
  if (t > 0.0)
    lo = std::max(v_lo, v_hi - kTruncate / at);
  else
    hi = std::min(v_hi, v_lo + kTruncate / at);

  thread_local std::vector<double> mass, pos;
  mass.clear();
  pos.clear();
  const GaussRule& rule = gauss_legendre(kVOrder);
  const double norm = 1.0 / (2.0 * nu_b);
  double m0 = 0.0, m1 = 0.0;
  double cur = lo;
  while (cur < hi) {
    const double next = std::min({hi, cur * kMaxRatio, cur + kMaxPhase / at});
    const double half = 0.5 * (next - cur);
    const double mid = 0.5 * (next + cur);
    for (int k = 0; k < kVOrder; ++k) {
      const double v = mid + half * rule.nodes[k];
      const double dv = v - vm;
      const double e = half * rule.weights[k] * norm * std::exp(t * dv) / (v * v);
      mass.push_back(e);
      pos.push_back(dv);
      m0 += e;
      m1 += e * dv;
    }
    cur = next;
  }
  const double centre = m1 / m0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double d = pos[k] - centre;
    m2 += mass[k] * d * d;
  }
  out.value = t * vm + std::log(m0);
  out.d1 = vm + centre;
  out.d2 = m2 / m0;
  return out;
}

double log_mgf_valpha(double alpha, double nu_b, double t) { return log_mgf_valpha_derivs(alpha, nu_b, t).value; }

LogMgf log_mgf_chisq_derivs(double xi, double t) {
  LogMgf out;
  if (t >= 0.5) {
    out.value = kInf;
    out.d1 = kInf;
    out.d2 = kInf;
    return out;
  }
  const double q = 1.0 - 2.0 * t;
  out.value = -0.5 * xi * std::log1p(-2.0 * t);
  out.d1 = xi / q;
  out.d2 = 2.0 * xi / (q * q);
  return out;
}

double log_mgf_chisq(double xi, double t) { return log_mgf_chisq_derivs(xi, t).value; }

CramerFunctional::CramerFunctional(const MediaModel& model, const SourceSpec& f, double x, int n_panels, int order)
    : model_(model),
      source_(f),
      x_(x),
      n_panels_(n_panels),
      hom_(homogenize_point(model, f, x)),
      parameterized_(model.is_parameterized()) {
  if (!(x > 0.0 && x < 1.0)) throw ConfigError("evaluation point x must lie in (0, 1)");
  kappa_ = hom_.green_coeffs();
  if (parameterized_) {
    nu_b_ = model.parameterized().nu_b;
  } else {
    xi_ = model.convolved().xi;
    h_norm_ = model.convolved().h_norm();
  }
  std::vector<double> pts = f.breakpoints();
  const auto kinks = coefficient_breakpoints(model);
  pts.insert(pts.end(), kinks.begin(), kinks.end());
  pts.push_back(x);
  const auto panels = aligned_panels(merge_breakpoints(pts), n_panels);
  const GaussRule& rule = gauss_legendre(order);
  for (const auto& [lo, hi] : panels) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double left = mid < x ? 1.0 : 0.0;
    const double f_lo = f.antiderivative(lo);
    const double f_hi = f.antiderivative(hi);
    ends_.push_back({{f_lo * left, f_lo, left, 1.0}, {f_hi * left, f_hi, left, 1.0}});
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double s = mid + half * rule.nodes[k];
      const double a = parameterized_ ? coarse_field(model.parameterized(), s) : 0.0;
      nodes_.push_back({half * rule.weights[k], a, h_vector(f, x, s)});
    }
  }
  approx_offset_ = hom_.u0 - dot(kappa_, mean());
}

LogMgf CramerFunctional::site(const Node& node, double t) const {
  if (parameterized_) return log_mgf_valpha_derivs(node.a, nu_b_, t);
  LogMgf m = log_mgf_chisq_derivs(xi_, h_norm_ * t);
  m.d1 *= h_norm_;
  m.d2 *= h_norm_ * h_norm_;
  return m;
}

bool CramerFunctional::in_domain(const Vec4& lambda) const {
  if (parameterized_) return true;
  for (const auto& e : ends_)
    if (h_norm_ * dot(lambda, e.lo) >= 0.5 || h_norm_ * dot(lambda, e.hi) >= 0.5) return false;
  return true;
}

double CramerFunctional::full(const Vec4& lambda) const {
  if (!in_domain(lambda)) return kInf;
  double acc = 0.0;
  for (const auto& node : nodes_) acc += node.weight * site(node, dot(lambda, node.h)).value;
  return acc;
}

CramerEval CramerFunctional::full_derivs(const Vec4& lambda) const {
  CramerEval out;
  if (!in_domain(lambda)) {
    out.value = kInf;
    return out;
  }
  for (const auto& node : nodes_) {
    const LogMgf m = site(node, dot(lambda, node.h));
    out.value += node.weight * m.value;
    for (int i = 0; i < 4; ++i) {
      const double wi = node.weight * node.h[i];
      out.grad[i] += wi * m.d1;
      for (int j = i; j < 4; ++j) out.hess[i][j] += wi * node.h[j] * m.d2;
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) out.hess[i][j] = out.hess[j][i];
  return out;
}

Vec4 CramerFunctional::mean() const {
  Vec4 out{};
  for (const auto& node : nodes_) {
    const double ev = parameterized_ ? valpha_mean(node.a, nu_b_) : xi_ * h_norm_;
    for (int i = 0; i < 4; ++i) out[i] += node.weight * ev * node.h[i];
  }
  return out;
}

double CramerFunctional::approx(double lambda) const {
  Vec4 l;
  for (int i = 0; i < 4; ++i) l[i] = lambda * kappa_[i];
  const double v = full(l);
  return std::isfinite(v) ? lambda * approx_offset_ + v : kInf;
}

LogMgf CramerFunctional::approx_derivs(double lambda) const {
  Vec4 l;
  for (int i = 0; i < 4; ++i) l[i] = lambda * kappa_[i];
  LogMgf out;
  if (!in_domain(l)) {
    out.value = out.d1 = out.d2 = kInf;
    return out;
  }
  out.value = lambda * approx_offset_;
  out.d1 = approx_offset_;
  for (const auto& node : nodes_) {
    const double g = dot(kappa_, node.h);
    const LogMgf m = site(node, lambda * g);
    out.value += node.weight * m.value;
    out.d1 += node.weight * g * m.d1;
    out.d2 += node.weight * g * g * m.d2;
  }
  return out;
}

bool comparison_integral_diverges(double singular_exponent, int local_order) {
  if (local_order < 1) return false;
  const double r = local_order;
  return singular_exponent + (r - 1.0) / r >= 1.0;
}

SteepnessReport steepness_check(const MediaModel& model, const SourceSpec& f) {
  SteepnessReport report;
  if (model.is_parameterized()) {
    report.condition1 = true;
    report.condition3_supported = false;
    report.note = "bounded V_alpha: log-MGF finite on R";
  } else {
    // Piecewise-constant f makes F piecewise linear, hence piecewise C^2, and
    // the chi-squared log-MGF has the open domain (-inf, 1/2).
    report.condition2 = true;
    if (f.is_zero()) {
      report.condition3_supported = false;
      report.note = "F is identically zero: no extremizer order";
    } else {
      report.local_order = 1;
      // d/dt of -(xi/2) log(1 - 2t) behaves like (1/2 - t)^-1 at the boundary.
      report.condition3 = comparison_integral_diverges(1.0, report.local_order);
      report.note = "chi-squared domain (-inf, 1/2), F piecewise linear";
    }
  }
  report.steep = report.condition1 || report.condition2 || report.condition3;
  return report;
}

ChernoffBound::ChernoffBound(const MediaModel& model, const SourceSpec& f, double x, double epsilon, int gauss_order)
    : epsilon_(epsilon), parameterized_(model.is_parameterized()) {
  if (!parameterized_ && !model.convolved().is_dirac())
    throw ConfigError("chernoff bound: convolved media must have a single-cell (Dirac) kernel");
  const auto hom = homogenize_point(model, f, x);
  const Vec4 kappa = hom.green_coeffs();
  const CellLayout layout(model, f, epsilon, gauss_order);
  const PointKernel kernel(layout, x);
  offset_ = hom.u0 - dot(kappa, hom.z_star.z);
  const std::size_t n = kernel.n_cells();
  if (!parameterized_) {
    xi_ = model.convolved().xi;
    h0_ = model.convolved().kernel[0];
    cell_g_.resize(n);
    mean_ = offset_;
    for (std::size_t c = 0; c < n; ++c) {
      cell_g_[c] = dot(kappa, kernel.cell_moment(c));
      mean_ += xi_ * h0_ * cell_g_[c];
    }
    return;
  }
  // theta panels graded toward -1, where the per-cell integrand is steepest.
  constexpr int kPanels = 32;
  const GaussRule& rule = gauss_legendre(16);
  std::vector<double> thetas;
  for (int j = 0; j < kPanels; ++j) {
    const double u0 = static_cast<double>(j) / kPanels;
    const double u1 = static_cast<double>(j + 1) / kPanels;
    const double lo = -1.0 + 2.0 * u0 * u0;
    const double hi = -1.0 + 2.0 * u1 * u1;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      thetas.push_back(mid + half * rule.nodes[k]);
      theta_w_.push_back(std::log(0.5 * half * rule.weights[k]));
    }
  }
  n_theta_ = thetas.size();
  phi_.resize(n * n_theta_);
  mean_ = offset_;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t k = 0; k < n_theta_; ++k) {
      const double phi = dot(kappa, kernel.cell_contribution(c, thetas[k]));
      phi_[c * n_theta_ + k] = phi;
      mean_ += std::exp(theta_w_[k]) * phi;
    }
  }
}

double cramer_prelimit(const MediaModel& model, const SourceSpec& f, double x, double epsilon, const Vec4& lambda) {
  if (model.is_parameterized() || !model.convolved().is_dirac())
    throw ConfigError("cramer_prelimit: needs convolved media with a Dirac kernel");
  const auto& c = model.convolved();
  const PointKernel kernel(model, f, x, epsilon);
  std::vector<double> terms(kernel.n_cells());
  for (std::size_t n = 0; n < terms.size(); ++n) {
    terms[n] = log_mgf_chisq(c.xi, c.kernel[0] * dot(lambda, kernel.cell_moment(n)) / epsilon);
    if (!std::isfinite(terms[n])) return kInf;
  }
  return epsilon * pairwise_sum(terms);
}

double ChernoffBound::log_mgf(double mu) const {
  double acc = mu * offset_;
  if (!parameterized_) {
    for (double g : cell_g_) {
      const double v = log_mgf_chisq(xi_, mu * h0_ * g);
      if (!std::isfinite(v)) return kInf;
      acc += v;
    }
    return acc;
  }
  std::vector<double> terms(n_theta_);
  const std::size_t n = phi_.size() / n_theta_;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t k = 0; k < n_theta_; ++k) terms[k] = theta_w_[k] + mu * phi_[c * n_theta_ + k];
    acc += log_sum_exp(terms);
  }
  return acc;
}

double ChernoffBound::bound(double ell) const {
  if (ell <= mean_) return 0.0;
  const double eps = epsilon_;
  const double base = log_mgf(0.0);
  auto scaled = [&](double lambda) {
    const double v = log_mgf(lambda / eps);
    return std::isfinite(v) ? eps * (v - base) : kInf;
  };
  Legendre1DOptions opts;
  opts.lambda_min = 0.0;
  const auto r = legendre_1d(scaled, ell, opts);
  return -r.rate;
}

double chernoff_bound(const MediaModel& model, const SourceSpec& f, double x, double epsilon, double ell) {
  return ChernoffBound(model, f, x, epsilon).bound(ell);
}

const char* status_name(RateStatus status) {
  switch (status) {
    case RateStatus::Converged:
      return "converged";
    case RateStatus::Boundary:
      return "boundary";
    case RateStatus::Infinite:
      return "infinite";
    case RateStatus::NotConverged:
      return "not_converged";
  }
  return "unknown";
}

}  // namespace ldhom
