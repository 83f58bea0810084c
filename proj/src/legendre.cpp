#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ldhom/errors.hpp"
#include "ldhom/ldp.hpp"

namespace ldhom {

namespace {

constexpr double kGolden = 0.6180339887498949;

double sup_norm(const Vec4& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Legendre1DResult legendre_1d(const std::function<double(double)>& lambda_fn, double ell,
                             const Legendre1DOptions& options) {
  const double at_zero = lambda_fn(0.0);
  if (!(std::abs(at_zero) < 1e-9)) throw NumericalError("legendre_1d: Lambda(0) must vanish");

  auto phi = [&](double lambda) {
    const double v = lambda_fn(lambda);
    return std::isfinite(v) ? lambda * ell - v : -kInf;
  };
  // Central difference of phi, one-sided next to the domain boundary.
  auto dphi = [&](double lambda) {
    const double h = 1e-7 * std::max(1.0, std::abs(lambda));
    const double fp = lambda_fn(lambda + h);
    const double fm = lambda_fn(lambda - h);
    double d;
    if (std::isfinite(fp) && std::isfinite(fm))
      d = (fp - fm) / (2.0 * h);
    else if (std::isfinite(fm))
      d = (lambda_fn(lambda) - fm) / h;
    else if (std::isfinite(fp))
      d = (fp - lambda_fn(lambda)) / h;
    else
      return std::nan("");
    return ell - d;
  };

  Legendre1DResult result;
  const double d0 = dphi(0.0);
  if (d0 == 0.0) return result;
  const double dir = d0 > 0.0 ? 1.0 : -1.0;
  if (dir < 0.0 && options.lambda_min >= 0.0) return result;

  double a = 0.0;
  double b = 0.0;
  double step = options.initial_step;
  while (true) {
    b = dir * step;
    if (std::abs(b) > options.lambda_cap) {
      result.rate = kInf;
      result.lambda_star = dir * kInf;
      result.status = RateStatus::Infinite;
      return result;
    }
    if (!std::isfinite(lambda_fn(b))) {
      double lo = a, hi = b;
      for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::isfinite(lambda_fn(mid)))
          lo = mid;
        else
          hi = mid;
      }
      const double slope = dphi(lo);
      if (slope * dir > 0.0) {
        result.rate = phi(lo);
        result.lambda_star = lo;
        result.status = RateStatus::Boundary;
        return result;
      }
      b = lo;
      break;
    }
    const double slope = dphi(b);
    if (!(slope * dir > 0.0)) break;
    a = b;
    step *= 4.0;
  }

  double lo = std::min(a, b), hi = std::max(a, b);
  double c = hi - kGolden * (hi - lo);
  double d = lo + kGolden * (hi - lo);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 400; ++it) {
    if (hi - lo < 1e-10 * std::max(1.0, std::abs(0.5 * (lo + hi)))) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kGolden * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kGolden * (hi - lo);
      fd = phi(d);
    }
  }
  const double star = 0.5 * (lo + hi);
  result.lambda_star = star;
  result.rate = std::max({phi(star), fc, fd, 0.0});
  return result;
}

Legendre4DResult legendre_4d(const CramerFunctional& cf, const ZVector& z, const Legendre4DOptions& options) {
  using Eigen::Matrix4d;
  using Eigen::Vector4d;
  Legendre4DResult result;
  if (!(z[2] > 0.0 && z[3] > 0.0)) {
    result.rate = kInf;
    result.status = RateStatus::Infinite;
    return result;
  }
  Vec4 lambda{};
  if (options.warm_start) lambda = *options.warm_start;
  CramerEval ev = cf.full_derivs(lambda);
  if (!std::isfinite(ev.value)) {
    lambda = Vec4{};
    ev = cf.full_derivs(lambda);
  }
  auto objective = [&](const Vec4& l, const CramerEval& e) {
    return l[0] * z[0] + l[1] * z[1] + l[2] * z[2] + l[3] * z[3] - e.value;
  };
  double phi = objective(lambda, ev);
  // The supremum is at least the value 0 taken at lambda = 0.
  if (phi < 0.0) {
    lambda = Vec4{};
    ev = cf.full_derivs(lambda);
    phi = objective(lambda, ev);
  }
  double damping = 0.0;
  int short_steps = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it;
    Vector4d g;
    Matrix4d h;
    for (int i = 0; i < 4; ++i) {
      g[i] = z[i] - ev.grad[i];
      for (int j = 0; j < 4; ++j) h(i, j) = ev.hess[i][j];
    }
    Vec4 gv{g[0], g[1], g[2], g[3]};
    if (sup_norm(lambda) > options.lambda_cap || phi > 1e15) {
      result.rate = kInf;
      result.lambda_star = lambda;
      result.status = RateStatus::Infinite;
      return result;
    }
    if (sup_norm(gv) < 1e-8 * (1.0 + std::abs(phi))) {
      result.rate = std::max(phi, 0.0);
      result.lambda_star = lambda;
      result.status = RateStatus::Converged;
      return result;
    }
    const double scale = std::max(1e-300, h.trace());
    bool accepted = false;
    for (int attempt = 0; attempt < 6 && !accepted; ++attempt) {
      Matrix4d m = h + damping * scale * Matrix4d::Identity();
      Eigen::LDLT<Matrix4d> ldlt(m);
      Vector4d d;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        d = ldlt.solve(g);
        if (!d.allFinite() || d.dot(g) <= 0.0) d = g / scale;
      } else {
        d = g / scale;
      }
      const double slope = d.dot(g);
      double alpha = 1.0;
      for (int ls = 0; ls < 30; ++ls) {
        Vec4 trial;
        for (int i = 0; i < 4; ++i) trial[i] = lambda[i] + alpha * d[i];
        const CramerEval et = cf.full_derivs(trial);
        if (std::isfinite(et.value)) {
          const double pt = objective(trial, et);
          if (pt >= phi + 1e-4 * alpha * slope) {
            short_steps = alpha < 1e-3 ? short_steps + 1 : 0;
            lambda = trial;
            ev = et;
            phi = pt;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (accepted) {
        damping = damping > 1e-12 ? damping * 0.1 : 0.0;
      } else {
        damping = damping == 0.0 ? 1e-6 : damping * 100.0;
      }
    }
    // Repeated tiny steps: the iterate is sliding along the domain boundary.
    if (!accepted || short_steps >= 8) break;
  }
  result.rate = std::max(phi, 0.0);
  result.lambda_star = lambda;
  result.status = RateStatus::NotConverged;
  return result;
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

Eigen::Vector4d grad_g(const Vec4& z) {
  return {-1.0, z[2] / z[3], z[1] / z[3], -z[1] * z[2] / (z[3] * z[3])};
}

Eigen::Matrix4d hess_g(const Vec4& z) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  const double z4sq = z[3] * z[3];
  h(1, 2) = h(2, 1) = 1.0 / z[3];
  h(1, 3) = h(3, 1) = -z[2] / z4sq;
  h(2, 3) = h(3, 2) = -z[1] / z4sq;
  h(3, 3) = 2.0 * z[1] * z[2] / (z4sq * z[3]);
  return h;
}

double g_of(const Vec4& z) { return -z[0] + z[1] * z[2] / z[3]; }

// Stationarity of lambda . z - Lambda on {g = level}: z = grad Lambda(lambda),
// lambda = mu grad g(z), g(z) = level.
struct KktState {
  Vec4 lambda{};
  double mu = 0.0;
  CramerEval eval;
};

Vec5 kkt_residual(const KktState& s, double level) {
  const auto gg = grad_g(s.eval.grad);
  Vec5 r;
  for (int i = 0; i < 4; ++i) r[i] = s.lambda[i] - s.mu * gg[i];
  r[4] = g_of(s.eval.grad) - level;
  return r;
}

struct KktSolve {
  bool converged = false;
  bool runaway = false;
};

KktSolve kkt_newton(const CramerFunctional& cf, KktState& state, double level, double weight, double cap,
                    int& budget) {
  KktSolve out;
  const auto merit = [&](const Vec5& r) {
    Vec5 w = r;
    w[4] *= weight;
    return w.squaredNorm();
  };
  Vec5 r = kkt_residual(state, level);
  for (int it = 0; it < 50 && budget > 0; ++it, --budget) {
    const double lam = sup_norm(state.lambda);
    const double lam_tol = 1e-10 * (1.0 + lam);
    bool small = std::abs(r[4]) <= 1e-13 + 1e-11 * std::abs(level);
    for (int i = 0; i < 4; ++i) small = small && std::abs(r[i]) <= lam_tol;
    if (small) {
      out.converged = true;
      return out;
    }
    if (lam > cap) {
      out.runaway = true;
      return out;
    }
    Eigen::Matrix4d h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = state.eval.hess[i][j];
    const auto z = state.eval.grad;
    const auto gg = grad_g(z);
    Mat5 jac = Mat5::Zero();
    jac.topLeftCorner<4, 4>() = Eigen::Matrix4d::Identity() - state.mu * hess_g(z) * h;
    jac.block<4, 1>(0, 4) = -gg;
    jac.block<1, 4>(4, 0) = (h * gg).transpose();
    const Vec5 d = jac.fullPivLu().solve(-r);
    if (!d.allFinite()) return out;
    const double m0 = merit(r);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      KktState trial;
      for (int i = 0; i < 4; ++i) trial.lambda[i] = state.lambda[i] + alpha * d[i];
      trial.mu = state.mu + alpha * d[4];
      trial.eval = cf.full_derivs(trial.lambda);
      if (!std::isfinite(trial.eval.value) || !(trial.eval.grad[3] > 0.0)) continue;
      const Vec5 rt = kkt_residual(trial, level);
      if (merit(rt) <= (1.0 - 1e-4 * alpha) * m0) {
        state = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return out;
  }
  return out;
}

}  // namespace

RateFullResult rate_full(const CramerFunctional& cf, double ell, const RateFullOptions& options) {
  RateFullResult result;
  KktState state;
  state.eval = cf.full_derivs(state.lambda);
  const double u0 = g_of(state.eval.grad);
  Eigen::Matrix4d h0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h0(i, j) = state.eval.hess[i][j];
  const auto k0 = grad_g(state.eval.grad);
  const double variance = k0.dot(h0 * k0);
  // Puts the level residual on the scale of lambda.
  const double weight = 1.0 / std::max(variance, 1e-300);

  KktState base = state;
  if (options.warm_lambda) {
    KktState warm;
    warm.lambda = *options.warm_lambda;
    warm.mu = -warm.lambda[0];
    warm.eval = cf.full_derivs(warm.lambda);
    if (std::isfinite(warm.eval.value) && warm.eval.grad[3] > 0.0) {
      const double reached = g_of(warm.eval.grad);
      // Only a warm start on the same side of the mean helps the continuation.
      if ((reached - u0) * (ell - u0) >= 0.0 && std::abs(reached - u0) <= std::abs(ell - u0)) base = warm;
    }
  }
  double level = g_of(base.eval.grad);
  state = base;

  int budget = options.max_evaluations;
  double step = ell - level;
  const double min_step = 1e-10 * std::max(std::abs(ell - u0), 1e-12);
  bool runaway = false;
  while (true) {
    if (std::abs(ell - level) <= 0.0) break;
    const double target = std::abs(step) >= std::abs(ell - level) ? ell : level + step;
    KktState trial = state;
    const auto solve = kkt_newton(cf, trial, target, weight, options.lambda_cap, budget);
    if (solve.converged) {
      state = trial;
      level = target;
      step *= 2.0;
      continue;
    }
    runaway = runaway || solve.runaway;
    step *= 0.5;
    if (std::abs(step) < min_step || budget <= 0) break;
  }
  result.evaluations = options.max_evaluations - budget;
  result.lambda_star = state.lambda;
  for (int i = 0; i < 4; ++i) result.z_star[i] = state.eval.grad[i];
  if (level == ell) {
    double rate = -state.eval.value;
    for (int i = 0; i < 4; ++i) rate += state.lambda[i] * state.eval.grad[i];
    result.rate = std::max(rate, 0.0);
    result.status = RateStatus::Converged;
    return result;
  }
  // The attainable levels stop short of ell: either the multiplier runs off
  // to infinity or the continuation stalls at the edge of the domain.
  if (runaway || sup_norm(state.lambda) > 1e-3 * options.lambda_cap || budget > 0) {
    result.rate = kInf;
    result.status = RateStatus::Infinite;
  } else {
    result.rate = kInf;
    result.status = RateStatus::NotConverged;
  }
  return result;
}

Legendre1DResult rate_approx(const CramerFunctional& cf, double ell) {
  return legendre_1d([&](double l) { return cf.approx(l); }, ell);
}

RateCurve approx_curve(const CramerFunctional& cf, const std::vector<double>& levels) {
  RateCurve curve;
  for (double ell : levels) {
    const auto r = rate_approx(cf, ell);
    curve.levels.push_back(ell);
    curve.values.push_back(r.rate);
    curve.lambda_star.push_back(r.lambda_star);
    curve.z_star.push_back(ZVector{});
    curve.status.push_back(r.status);
  }
  return curve;
}

RateCurve full_curve(const CramerFunctional& cf, const std::vector<double>& levels, int max_evaluations) {
  RateCurve curve;
  const std::size_t n = levels.size();
  curve.levels = levels;
  curve.values.assign(n, kInf);
  curve.lambda_star.assign(n, 0.0);
  curve.z_star.assign(n, ZVector{});
  curve.status.assign(n, RateStatus::NotConverged);
  const double u0 = cf.homogenized().u0;

  std::vector<std::size_t> above, below;
  for (std::size_t i = 0; i < n; ++i) (levels[i] >= u0 ? above : below).push_back(i);
  std::sort(above.begin(), above.end(), [&](auto a, auto b) { return levels[a] < levels[b]; });
  std::sort(below.begin(), below.end(), [&](auto a, auto b) { return levels[a] > levels[b]; });

  for (const auto* side : {&above, &below}) {
    RateFullOptions opts;
    opts.max_evaluations = max_evaluations;
    for (std::size_t idx : *side) {
      const auto r = rate_full(cf, levels[idx], opts);
      curve.values[idx] = r.rate;
      curve.z_star[idx] = r.z_star;
      curve.status[idx] = r.status;
      // At the optimum lambda is parallel to grad g, whose first entry is -1.
      curve.lambda_star[idx] = -r.lambda_star[0];
      if (std::isfinite(r.rate)) opts.warm_lambda = r.lambda_star;
    }
  }
  return curve;
}

}  // namespace ldhom
