#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ldhom {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (order >= 1). Thread-safe.
const GaussRule& gauss_legendre(int order);

template <class Fn>
double integrate_gauss(Fn&& fn, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * fn(mid + half * rule.nodes[k]);
  return half * acc;
}

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Adaptive Simpson with Richardson correction, absolute tolerance.
QuadResult adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double abs_tol,
                            int max_depth = 40);

/// Adaptive Simpson applied piecewise between consecutive sorted breakpoints,
/// splitting the tolerance by interval length.
QuadResult adaptive_simpson_pieces(const std::function<double(double)>& fn, const std::vector<double>& breaks,
                                   double abs_tol, int max_depth = 40);

/// Sorted, deduplicated points inside [lo, hi] plus the endpoints.
std::vector<double> merge_breakpoints(std::vector<double> points, double lo = 0.0, double hi = 1.0);

/// Panels over [breaks.front(), breaks.back()] with roughly `n_panels` in total,
/// distributed proportionally to interval length, never straddling a breakpoint.
std::vector<std::pair<double, double>> aligned_panels(const std::vector<double>& breaks, int n_panels);

/// Pairwise (cascade) summation; the tree shape depends only on the length.
double pairwise_sum(std::span<const double> values);

/// log(sum(exp(values))) with the max factored out; -inf for empty input.
double log_sum_exp(std::span<const double> values);

}  // namespace ldhom
