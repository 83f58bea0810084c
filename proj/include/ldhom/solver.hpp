#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ldhom/media.hpp"
#include "ldhom/source.hpp"

namespace ldhom {

/// Z = (int_0^x F/A, int_0^1 F/A, int_0^x 1/A, int_0^1 1/A).
struct ZVector {
  std::array<double, 4> z{};

  double& operator[](std::size_t i) { return z[i]; }
  double operator[](std::size_t i) const { return z[i]; }
};

/// g(z) = -z1 + z2 z3 / z4.
double g_map(const ZVector& z);

/// H(s) = (F(s) 1_{s<x}, F(s), 1_{s<x}, 1).
std::array<double, 4> h_vector(const SourceSpec& f, double x, double s);

/// Quadrature panels per cell for a given medium, source and epsilon. Cells
/// are split at the kinks of F and of a(x); parameterized cells are further
/// refined where a(x) varies strongly relative to its distance from nu_b.
class CellLayout {
 public:
  CellLayout(const MediaModel& model, const SourceSpec& f, double epsilon, int gauss_order = 8);

  std::size_t n_cells() const { return n_cells_; }
  double epsilon() const { return epsilon_; }
  int gauss_order() const { return order_; }
  const MediaModel& model() const { return model_; }
  const SourceSpec& source() const { return source_; }
  std::span<const std::pair<double, double>> panels(std::size_t cell) const;

  /// (int 1/A, int F/A) over [lo, hi], a subinterval of cell `cell`.
  std::array<double, 2> partial(const FieldRealization& realization, std::size_t cell, double lo, double hi) const;

 private:
  MediaModel model_;
  SourceSpec source_;
  double epsilon_;
  std::size_t n_cells_;
  int order_;
  std::vector<std::pair<double, double>> panels_;
  std::vector<std::size_t> offsets_;
};

/// Precomputed per-cell quadrature for Z at one point x. For convolved media
/// each cell reduces to its H-moments; for parameterized media each node keeps
/// its weight, a(s) and H(s).
class PointKernel {
 public:
  struct Node {
    double weight;
    double a;
    double anti;  // F(s)
    bool left;    // s < x
  };

  PointKernel(const CellLayout& layout, double x);
  PointKernel(const MediaModel& model, const SourceSpec& f, double x, double epsilon, int gauss_order = 8)
      : PointKernel(CellLayout(model, f, epsilon, gauss_order), x) {}

  double x() const { return x_; }
  std::size_t n_cells() const { return n_cells_; }
  bool parameterized() const { return parameterized_; }
  double nu_b() const { return nu_b_; }

  ZVector z_vector(const FieldRealization& realization) const;
  /// Contribution of cell n to Z for the given per-cell value (theta or gamma).
  std::array<double, 4> cell_contribution(std::size_t cell, double cell_value) const;
  /// int_cell H (convolved only; for parameterized returns the integral of H).
  const std::array<double, 4>& cell_moment(std::size_t cell) const { return moments_[cell]; }

 private:
  double x_;
  std::size_t n_cells_;
  bool parameterized_;
  double nu_b_ = 0.0;
  std::vector<std::array<double, 4>> moments_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> offsets_;
};

ZVector z_vector(const MediaModel& model, const FieldRealization& realization, const SourceSpec& f, double x,
                 int gauss_order = 8);
double solve_point(const MediaModel& model, const FieldRealization& realization, const SourceSpec& f, double x,
                   int gauss_order = 8);

/// Homogenized quantities at a point x: z* = int H/A0 and the cached
/// averages used by G. u0 = g(z*).
struct HomogenizedPoint {
  double x = 0.5;
  ZVector z_star;
  double u0 = 0.0;

  double f_avg() const { return z_star[1]; }    // <F/A0>
  double inv_avg() const { return z_star[3]; }  // <1/A0>
  double p_x() const { return z_star[2]; }      // int_0^x 1/A0
  /// G(x, s) = kappa . H(s).
  std::array<double, 4> green_coeffs() const;
};

HomogenizedPoint homogenize_point(const MediaModel& model, const SourceSpec& f, double x);

/// Constant-A0 closed form or adaptive Simpson of H/A0 to 1e-10 absolute.
ZVector homogenized_z(const MediaModel& model, const SourceSpec& f, double x);

struct SolutionPath {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> u0;
  std::vector<double> v_eps;
  std::vector<double> r_eps;
};

SolutionPath solve_homogenized(const MediaModel& model, const SourceSpec& f, const std::vector<double>& grid);

double green_kernel(const HomogenizedPoint& hom, const SourceSpec& f, double s);
double green_kernel(const MediaModel& model, const SourceSpec& f, double x, double s);

struct Expansion {
  double v_eps;
  double r_eps;
};

/// v_eps and R_eps from Z and the homogenized point; u0 + v + R = g(Z).
Expansion expansion_terms(const ZVector& z, const HomogenizedPoint& hom);
Expansion expansion_terms(const MediaModel& model, const FieldRealization& realization, const SourceSpec& f, double x,
                          int gauss_order = 8);

/// u_eps on a sorted grid in [0, 1], with u0, v_eps and R_eps per point.
SolutionPath solve_path(const CellLayout& layout, const FieldRealization& realization, const std::vector<double>& grid,
                        const std::vector<HomogenizedPoint>& hom);

std::vector<double> uniform_grid(std::size_t n_points);

/// Trapezoid-rule L2 norm of samples on a grid.
double l2_norm_trapezoid(const std::vector<double>& grid, const std::vector<double>& values);

}  // namespace ldhom
