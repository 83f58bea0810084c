#include "ldhom/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ldhom/errors.hpp"
#include "ldhom/quadrature.hpp"

namespace ldhom {

double g_map(const ZVector& z) { return -z[0] + z[1] * z[2] / z[3]; }

std::array<double, 4> h_vector(const SourceSpec& f, double x, double s) {
  const double anti = f.antiderivative(s);
  const double left = s < x ? 1.0 : 0.0;
  return {anti * left, anti, left, 1.0};
}

namespace {

constexpr double kMaxParamPanel = 1.0 / 32.0;

void refine_panel(const ParameterizedCoarse& c, double lo, double hi, int depth,
                  std::vector<std::pair<double, double>>& out) {
  double amin = 1e300, amax = -1e300;
  for (int i = 0; i <= 8; ++i) {
    const double a = coarse_field(c, lo + (hi - lo) * i / 8.0);
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  const double dist = amin - c.nu_b;
  const bool too_wide = hi - lo > kMaxParamPanel;
  const bool too_steep = amax - amin > 0.25 * dist;
  if ((too_wide || too_steep) && depth < 48 && hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    refine_panel(c, lo, mid, depth + 1, out);
    refine_panel(c, mid, hi, depth + 1, out);
    return;
  }
  out.emplace_back(lo, hi);
}

}  // namespace

CellLayout::CellLayout(const MediaModel& model, const SourceSpec& f, double epsilon, int gauss_order)
    : model_(model), source_(f), epsilon_(epsilon), n_cells_(cell_count(epsilon)), order_(gauss_order) {
  if (gauss_order < 1) throw ConfigError("gauss order must be >= 1");
  std::vector<double> breaks = f.breakpoints();
  const auto kinks = coefficient_breakpoints(model);
  breaks.insert(breaks.end(), kinks.begin(), kinks.end());
  std::sort(breaks.begin(), breaks.end());

  offsets_.reserve(n_cells_ + 1);
  offsets_.push_back(0);
  for (std::size_t n = 0; n < n_cells_; ++n) {
    const double lo = static_cast<double>(n) / n_cells_;
    const double hi = static_cast<double>(n + 1) / n_cells_;
    std::vector<double> cuts{lo};
    for (double b : breaks)
      if (b > lo + 1e-14 && b < hi - 1e-14) cuts.push_back(b);
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (model.is_parameterized())
        refine_panel(model.parameterized(), cuts[i], cuts[i + 1], 0, panels_);
      else
        panels_.emplace_back(cuts[i], cuts[i + 1]);
    }
    offsets_.push_back(panels_.size());
  }
}

std::span<const std::pair<double, double>> CellLayout::panels(std::size_t cell) const {
  return std::span<const std::pair<double, double>>(panels_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]);
}

std::array<double, 2> CellLayout::partial(const FieldRealization& realization, std::size_t cell, double lo,
                                          double hi) const {
  std::array<double, 2> out{0.0, 0.0};
  if (hi <= lo) return out;
  const double v = realization.inv_cells[cell];
  if (!model_.is_parameterized()) {
    out[0] = v * (hi - lo);
    out[1] = v * source_.integral_antiderivative(lo, hi);
    return out;
  }
  const auto& c = model_.parameterized();
  const GaussRule& rule = gauss_legendre(order_);
  for (const auto& [pl, ph] : panels(cell)) {
    const double a = std::max(pl, lo);
    const double b = std::min(ph, hi);
    if (b <= a) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double s = mid + half * rule.nodes[k];
      const double w = half * rule.weights[k] / (coarse_field(c, s) + c.nu_b * v);
      out[0] += w;
      out[1] += w * source_.antiderivative(s);
    }
  }
  return out;
}

PointKernel::PointKernel(const CellLayout& layout, double x)
    : x_(x), n_cells_(layout.n_cells()), parameterized_(layout.model().is_parameterized()) {
  if (!(x > 0.0 && x < 1.0)) throw ConfigError("evaluation point x must lie in (0, 1)");
  const SourceSpec& f = layout.source();
  moments_.assign(n_cells_, {0.0, 0.0, 0.0, 0.0});
  if (parameterized_) nu_b_ = layout.model().parameterized().nu_b;
  const GaussRule& rule = gauss_legendre(layout.gauss_order());
  offsets_.push_back(0);
  for (std::size_t n = 0; n < n_cells_; ++n) {
    auto& m = moments_[n];
    for (const auto& [pl, ph] : layout.panels(n)) {
      std::vector<std::pair<double, double>> pieces;
      if (x > pl && x < ph) {
        pieces = {{pl, x}, {x, ph}};
      } else {
        pieces = {{pl, ph}};
      }
      for (const auto& [a, b] : pieces) {
        const bool left = b <= x;
        if (!parameterized_) {
          const double fint = f.integral_antiderivative(a, b);
          m[0] += left ? fint : 0.0;
          m[1] += fint;
          m[2] += left ? b - a : 0.0;
          m[3] += b - a;
          continue;
        }
        const auto& c = layout.model().parameterized();
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          const double s = mid + half * rule.nodes[k];
          const Node node{half * rule.weights[k], coarse_field(c, s), f.antiderivative(s), left};
          nodes_.push_back(node);
          m[0] += node.left ? node.weight * node.anti : 0.0;
          m[1] += node.weight * node.anti;
          m[2] += node.left ? node.weight : 0.0;
          m[3] += node.weight;
        }
      }
    }
    offsets_.push_back(nodes_.size());
  }
}

std::array<double, 4> PointKernel::cell_contribution(std::size_t cell, double cell_value) const {
  if (!parameterized_) {
    const auto& m = moments_[cell];
    return {cell_value * m[0], cell_value * m[1], cell_value * m[2], cell_value * m[3]};
  }
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  const double shift = nu_b_ * cell_value;
  for (std::size_t k = offsets_[cell]; k < offsets_[cell + 1]; ++k) {
    const Node& node = nodes_[k];
    const double w = node.weight / (node.a + shift);
    const double wf = w * node.anti;
    out[1] += wf;
    out[3] += w;
    if (node.left) {
      out[0] += wf;
      out[2] += w;
    }
  }
  return out;
}

ZVector PointKernel::z_vector(const FieldRealization& realization) const {
  ZVector z;
  for (std::size_t n = 0; n < n_cells_; ++n) {
    const auto c = cell_contribution(n, realization.inv_cells[n]);
    for (int i = 0; i < 4; ++i) z[i] += c[i];
  }
  return z;
}

ZVector z_vector(const MediaModel& model, const FieldRealization& realization, const SourceSpec& f, double x,
                 int gauss_order) {
  return PointKernel(model, f, x, realization.epsilon, gauss_order).z_vector(realization);
}

double solve_point(const MediaModel& model, const FieldRealization& realization, const SourceSpec& f, double x,
                   int gauss_order) {
  return g_map(z_vector(model, realization, f, x, gauss_order));
}

ZVector homogenized_z(const MediaModel& model, const SourceSpec& f, double x) {
  ZVector z;
  if (!model.is_parameterized()) {
    const double c = homogenized_inv(model, x);
    z[0] = c * f.integral_antiderivative(0.0, x);
    z[1] = c * f.integral_antiderivative(0.0, 1.0);
    z[2] = c * x;
    z[3] = c;
    return z;
  }
  std::vector<double> pts = f.breakpoints();
  const auto kinks = coefficient_breakpoints(model);
  pts.insert(pts.end(), kinks.begin(), kinks.end());
  pts.push_back(x);
  const auto breaks = merge_breakpoints(pts);
  constexpr double tol = 1e-12;
  for (int i = 0; i < 4; ++i) {
    auto integrand = [&](double s) { return h_vector(f, x, s)[i] * homogenized_inv(model, s); };
    const auto q = adaptive_simpson_pieces(integrand, breaks, tol);
    if (!q.converged) throw NumericalError("homogenized quadrature did not converge");
    z[i] = q.value;
  }
  return z;
}

std::array<double, 4> HomogenizedPoint::green_coeffs() const {
  const double c = f_avg() / inv_avg();
  const double p = p_x() / inv_avg();
  return {-1.0, p, c, -c * p};
}

HomogenizedPoint homogenize_point(const MediaModel& model, const SourceSpec& f, double x) {
  HomogenizedPoint hom;
  hom.x = x;
  hom.z_star = homogenized_z(model, f, x);
  hom.u0 = (x <= 0.0 || x >= 1.0) ? 0.0 : g_map(hom.z_star);
  return hom;
}

SolutionPath solve_homogenized(const MediaModel& model, const SourceSpec& f, const std::vector<double>& grid) {
  SolutionPath path;
  path.grid = grid;
  for (double x : grid) {
    if (x < 0.0 || x > 1.0) throw ConfigError("grid points must lie in [0, 1]");
    const double u0 = homogenize_point(model, f, x).u0;
    path.values.push_back(u0);
    path.u0.push_back(u0);
  }
  return path;
}

double green_kernel(const HomogenizedPoint& hom, const SourceSpec& f, double s) {
  const double c = hom.f_avg() / hom.inv_avg();
  const double p = hom.p_x() / hom.inv_avg();
  const double centred = f.antiderivative(s) - c;
  return s <= hom.x ? centred * (p - 1.0) : centred * p;
}

double green_kernel(const MediaModel& model, const SourceSpec& f, double x, double s) {
  return green_kernel(homogenize_point(model, f, x), f, s);
}

Expansion expansion_terms(const ZVector& z, const HomogenizedPoint& hom) {
  const double a = hom.f_avg();
  const double b = hom.inv_avg();
  const double p = hom.p_x();
  const double x_x = z[2] - p;
  const double y_x = z[0] - hom.z_star[0];
  const double x_1 = z[3] - b;
  const double y_1 = z[1] - a;
  Expansion e;
  e.v_eps = -y_x + (y_1 - x_1 * a / b) * p / b + x_x * a / b;
  e.r_eps = x_1 * x_1 * z[1] / (b * b * z[3]) * z[2] - (x_1 / (b * b)) * (y_1 * p + z[1] * x_x) + y_1 * x_x / b;
  return e;
}

Expansion expansion_terms(const MediaModel& model, const FieldRealization& realization, const SourceSpec& f, double x,
                          int gauss_order) {
  return expansion_terms(z_vector(model, realization, f, x, gauss_order), homogenize_point(model, f, x));
}

SolutionPath solve_path(const CellLayout& layout, const FieldRealization& realization, const std::vector<double>& grid,
                        const std::vector<HomogenizedPoint>& hom) {
  const std::size_t n = layout.n_cells();
  std::vector<std::array<double, 2>> prefix(n + 1, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const auto [lo, hi] = std::pair<double, double>(static_cast<double>(k) / n, static_cast<double>(k + 1) / n);
    const auto c = layout.partial(realization, k, lo, hi);
    prefix[k + 1] = {prefix[k][0] + c[0], prefix[k][1] + c[1]};
  }
  const double z4 = prefix[n][0];
  const double z2 = prefix[n][1];

  SolutionPath path;
  path.grid = grid;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid[j];
    ZVector z;
    z[1] = z2;
    z[3] = z4;
    if (x >= 1.0) {
      z[0] = z2;
      z[2] = z4;
    } else if (x > 0.0) {
      const std::size_t cell = std::min(n - 1, static_cast<std::size_t>(x * n));
      const auto part = layout.partial(realization, cell, static_cast<double>(cell) / n, x);
      z[2] = prefix[cell][0] + part[0];
      z[0] = prefix[cell][1] + part[1];
    }
    const bool boundary = x <= 0.0 || x >= 1.0;
    const double u = boundary ? 0.0 : g_map(z);
    path.values.push_back(u);
    path.u0.push_back(hom[j].u0);
    if (boundary) {
      path.v_eps.push_back(0.0);
      path.r_eps.push_back(0.0);
    } else {
      const auto e = expansion_terms(z, hom[j]);
      path.v_eps.push_back(e.v_eps);
      path.r_eps.push_back(e.r_eps);
    }
  }
  return path;
}

std::vector<double> uniform_grid(std::size_t n_points) {
  std::vector<double> grid(n_points);
  for (std::size_t i = 0; i < n_points; ++i) grid[i] = n_points > 1 ? static_cast<double>(i) / (n_points - 1) : 0.0;
  return grid;
}

double l2_norm_trapezoid(const std::vector<double>& grid, const std::vector<double>& values) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    acc += 0.5 * (grid[i + 1] - grid[i]) * (values[i] * values[i] + values[i + 1] * values[i + 1]);
  return std::sqrt(acc);
}

}  // namespace ldhom
