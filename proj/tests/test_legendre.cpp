#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ldhom/corrector.hpp"
#include "ldhom/ldp.hpp"

using namespace ldhom;

namespace {

MediaModel convolved(int xi) { return MediaModel{ConvolvedCoarse::box(xi, 1.0, 1)}; }

double grid_oracle(const std::function<double(double)>& fn, double ell, double lo, double hi, int n) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double l = lo + (hi - lo) * i / n;
    const double v = fn(l);
    if (std::isfinite(v)) best = std::max(best, l * ell - v);
  }
  return best;
}

}  // namespace

TEST_CASE("one-dimensional transform", "[legendre]") {
  const auto quad = [](double l) { return 0.5 * l * l; };
  const auto r = legendre_1d(quad, 1.0);
  REQUIRE(r.rate == Catch::Approx(0.5).epsilon(1e-10));
  REQUIRE(r.lambda_star == Catch::Approx(1.0).epsilon(1e-6));
  REQUIRE(legendre_1d(quad, 0.0).rate == Catch::Approx(0.0).margin(1e-14));

  const auto shifted = [](double l) { return 0.5 * l * l + 2.0; };
  REQUIRE_THROWS(legendre_1d(shifted, 1.0));

  // bounded domain with a finite limit at the boundary
  const auto boxed = [](double l) { return l < 1.0 ? 0.5 * l * l : kInf; };
  const auto b = legendre_1d(boxed, 3.0);
  REQUIRE(b.status == RateStatus::Boundary);
  REQUIRE(b.rate == Catch::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("Legendre transforms are monotone in the functional", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  const auto bigger = [&](double l) { return cf.approx(l) + std::abs(l); };
  for (double ell : {0.0, 0.01, 0.03, 0.06, 0.1}) {
    const double base = legendre_1d([&](double l) { return cf.approx(l); }, ell).rate;
    REQUIRE(legendre_1d(bigger, ell).rate <= base + 1e-12);
  }
}

TEST_CASE("approximate rate against mpmath", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  REQUIRE(rate_approx(cf, 0.02375).rate < 1e-8);
  REQUIRE(rate_approx(cf, 0.03).rate == Catch::Approx(0.014264189996382251).epsilon(1e-7));
  REQUIRE(rate_approx(cf, 0.05).rate == Catch::Approx(0.17371874780953226).epsilon(1e-7));
  REQUIRE(rate_approx(cf, 0.1).rate == Catch::Approx(0.85060954982924889).epsilon(1e-7));
}

TEST_CASE("approximate rate against a brute-force grid", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  const auto fn = [&](double l) { return cf.approx(l); };
  // 1/(2 max G) = 20 closes the domain; every lambda* here lies above -200
  for (double ell : {0.005, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1}) {
    const double oracle = grid_oracle(fn, ell, -200.0, 20.0, 100000);
    const double got = rate_approx(cf, ell).rate;
    REQUIRE(got >= oracle - 1e-12);
    REQUIRE(got - oracle < 1e-6);
  }
}

TEST_CASE("approximate rate shape", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(MediaModel{mild_preset()}, f, 0.5);
  const double u0 = cf.homogenized().u0;
  std::vector<double> levels;
  for (int i = 0; i < 50; ++i) levels.push_back(u0 * (0.5 + i / 49.0));
  const auto curve = approx_curve(cf, levels);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    REQUIRE(curve.values[i] >= 0.0);
    if (i > 0 && levels[i - 1] >= u0) REQUIRE(curve.values[i] >= curve.values[i - 1] - 1e-12);
    if (i > 0 && levels[i] <= u0) REQUIRE(curve.values[i] <= curve.values[i - 1] + 1e-12);
    if (i > 0 && i + 1 < levels.size())
      REQUIRE(curve.values[i] <= 0.5 * (curve.values[i - 1] + curve.values[i + 1]) + 1e-9);
  }
}

TEST_CASE("four-dimensional transform", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  const auto at_mean = legendre_4d(cf, ZVector{cf.mean()});
  REQUIRE(at_mean.rate == Catch::Approx(0.0).margin(1e-12));
  for (double l : at_mean.lambda_star) REQUIRE(std::abs(l) < 1e-6);

  const auto bad = legendre_4d(cf, ZVector{{0.0, 0.05, 2.0, 1.0}});
  REQUIRE(bad.status == RateStatus::Infinite);
  REQUIRE(bad.rate == kInf);

  // exact transform from an mpmath Newton solve
  const auto probe = legendre_4d(cf, ZVector{{0.0015, 0.045, 0.55, 1.05}});
  REQUIRE(probe.status == RateStatus::Converged);
  REQUIRE(probe.rate == Catch::Approx(0.051818639510632624).epsilon(1e-8));
  REQUIRE(probe.lambda_star[0] == Catch::Approx(14.512145404701695).epsilon(1e-5));
  REQUIRE(probe.lambda_star[3] == Catch::Approx(1.1562705732824046).epsilon(1e-5));

  // z2 - z1 exceeds 0.1 (z4 - z3), which no positive coefficient produces
  REQUIRE(legendre_4d(cf, ZVector{{0.002, 0.07, 0.6, 1.2}}).status == RateStatus::Infinite);
}

TEST_CASE("contracted rate", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  const double u0 = cf.homogenized().u0;
  REQUIRE(rate_full(cf, u0).rate < 1e-6);

  const double ell = 0.05;
  const auto full = rate_full(cf, ell);
  REQUIRE(full.status == RateStatus::Converged);
  REQUIRE(g_map(full.z_star) == Catch::Approx(ell).epsilon(1e-10));
  Rng rng(7, 0);
  for (int k = 0; k < 100; ++k) {
    ZVector z;
    z[1] = 0.05 * std::exp(rng.uniform(-0.5, 0.5));
    z[3] = std::exp(rng.uniform(-0.5, 0.5));
    z[2] = z[3] * rng.uniform(0.2, 0.8);
    z[0] = z[1] * z[2] / z[3] - ell;
    REQUIRE(full.rate <= legendre_4d(cf, z).rate + 1e-8);
  }
}

TEST_CASE("contracted and approximate rates coincide at the midpoint", "[legendre]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  const double ell = cf.homogenized().u0 + 5.0 * std::sqrt(corrector_variance(convolved(1), f, 0.5));
  const double approx = rate_approx(cf, ell).rate;
  REQUIRE(rate_full(cf, ell).rate == Catch::Approx(approx).epsilon(1e-6));
}

TEST_CASE("contracted and approximate rates agree near the mean", "[legendre]") {
  const auto f = SourceSpec::indicator();
  for (const MediaModel& model : {convolved(1), MediaModel{mild_preset()}}) {
    const double x = 0.7;
    const CramerFunctional cf(model, f, x);
    const double u0 = cf.homogenized().u0;
    const double ell = u0 + 0.5 * std::sqrt(corrector_variance(model, f, x));
    const double approx = rate_approx(cf, ell).rate;
    const double full = rate_full(cf, ell).rate;
    REQUIRE(full > 0.0);
    REQUIRE(std::abs(full - approx) < 0.15 * approx);
  }
}

TEST_CASE("contracted rate continuation", "[legendre]") {
  const auto f = SourceSpec::indicator();
  SECTION("warm-started sweep matches cold solves") {
    const CramerFunctional cf(convolved(1), f, 0.7);
    const std::vector<double> levels{0.008, 0.012, 0.02, 0.04, 0.08};
    const auto curve = full_curve(cf, levels);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto cold = rate_full(cf, levels[i]);
      REQUIRE(curve.status[i] == RateStatus::Converged);
      REQUIRE(curve.values[i] == Catch::Approx(cold.rate).epsilon(1e-8));
      REQUIRE(g_map(curve.z_star[i]) == Catch::Approx(levels[i]).epsilon(1e-10));
    }
  }
  SECTION("levels beyond a bounded support are unreachable") {
    const CramerFunctional cf(MediaModel{mild_preset()}, f, 0.5);
    const auto r = rate_full(cf, 3.0 * cf.homogenized().u0);
    REQUIRE(r.status == RateStatus::Infinite);
    REQUIRE(r.rate == kInf);
  }
}
