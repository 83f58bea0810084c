#include "ldhom/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ldhom {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double simpson_rec(const std::function<double(double)>& fn, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, bool& ok, double& err) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth <= 0 || b - a < 1e-15) {
    if (depth <= 0 && std::abs(delta) > 15.0 * tol) ok = false;
    err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_rec(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok, err) +
         simpson_rec(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok, err);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

QuadResult adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double abs_tol,
                            int max_depth) {
  QuadResult result;
  if (b <= a) return result;
  const double fa = fn(a);
  const double fb = fn(b);
  const double fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  bool ok = true;
  double err = 0.0;
  result.value = simpson_rec(fn, a, b, fa, fm, fb, whole, abs_tol, max_depth, ok, err);
  result.error_estimate = err;
  result.converged = ok && std::isfinite(result.value);
  return result;
}

QuadResult adaptive_simpson_pieces(const std::function<double(double)>& fn, const std::vector<double>& breaks,
                                   double abs_tol, int max_depth) {
  QuadResult total;
  if (breaks.size() < 2) return total;
  const double span = breaks.back() - breaks.front();
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (b <= a) continue;
    // Interior evaluation only: one-sided limits at the piece ends.
    const double shrink = 1e-14 * std::max(1.0, std::abs(b - a));
    auto piece = adaptive_simpson(fn, a + shrink, b - shrink, abs_tol * (b - a) / span, max_depth);
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
    total.converged = total.converged && piece.converged;
  }
  return total;
}

std::vector<double> merge_breakpoints(std::vector<double> points, double lo, double hi) {
  points.push_back(lo);
  points.push_back(hi);
  std::vector<double> out;
  std::sort(points.begin(), points.end());
  for (double p : points) {
    if (p < lo || p > hi) continue;
    if (!out.empty() && p - out.back() < 1e-13) continue;
    out.push_back(p);
  }
  if (out.back() < hi) out.back() = hi;
  return out;
}

std::vector<std::pair<double, double>> aligned_panels(const std::vector<double>& breaks, int n_panels) {
  std::vector<std::pair<double, double>> panels;
  const double span = breaks.back() - breaks.front();
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (b <= a) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(n_panels * (b - a) / span - 1e-9)));
    const double h = (b - a) / n;
    for (int k = 0; k < n; ++k) panels.emplace_back(a + k * h, k + 1 == n ? b : a + (k + 1) * h);
  }
  return panels;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_sum_exp(std::span<const double> values) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace ldhom
