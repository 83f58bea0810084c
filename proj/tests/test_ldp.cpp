#include <catch_amalgamated.hpp>

#include <cmath>

#include "ldhom/errors.hpp"
#include "ldhom/ldp.hpp"

using namespace ldhom;

namespace {

MediaModel convolved(int xi, int kappa = 1) { return MediaModel{ConvolvedCoarse::box(xi, 1.0, kappa)}; }

}  // namespace

TEST_CASE("log-MGF of V_alpha against mpmath", "[ldp]") {
  REQUIRE(log_mgf_valpha(1.0, 0.5, 0.0) == 0.0);
  struct Case {
    double alpha, t, expected;
  };
  const Case cases[] = {
      {1.0, -50.0, -36.491171430658918},     {1.0, -1.0, -1.0414301371662068}, {1.0, 0.5, 0.56581520950009213},
      {1.0, 3.0, 3.9603515537615777},        {1.0, 40.0, 74.950481792854781},  {17.0 / 32, 5.0, 151.47175023023422},
      {17.0 / 32, 200.0, 6387.7705234255648}, {2.0, -7.0, -3.4470223197531427},
  };
  for (const auto& c : cases) REQUIRE(log_mgf_valpha(c.alpha, 0.5, c.t) == Catch::Approx(c.expected).epsilon(1e-12));
  REQUIRE_THROWS(log_mgf_valpha(0.5, 0.5, 1.0));
}

TEST_CASE("log-MGF of V_alpha derivatives at zero", "[ldp]") {
  const double h = 1e-5;
  const double d1 = (log_mgf_valpha(1.0, 0.5, h) - log_mgf_valpha(1.0, 0.5, -h)) / (2 * h);
  REQUIRE(d1 == Catch::Approx(std::log(3.0)).epsilon(1e-8));
  const auto d = log_mgf_valpha_derivs(1.0, 0.5, 0.0);
  REQUIRE(d.d1 == Catch::Approx(std::log(3.0)).epsilon(1e-14));
  REQUIRE(d.d2 == Catch::Approx(0.12638437252075136).epsilon(1e-12));
  const auto at = log_mgf_valpha_derivs(1.0, 0.5, 3.0);
  const double fd = (log_mgf_valpha(1.0, 0.5, 3.0 + h) - log_mgf_valpha(1.0, 0.5, 3.0 - h)) / (2 * h);
  REQUIRE(at.d1 == Catch::Approx(fd).epsilon(1e-8));
}

TEST_CASE("log-MGF of chi-squared", "[ldp]") {
  REQUIRE(log_mgf_chisq(2, 0.25) == Catch::Approx(std::log(2.0)));
  REQUIRE(log_mgf_chisq(3, 0.0) == 0.0);
  REQUIRE(log_mgf_chisq(1, 0.5) == kInf);
  REQUIRE(log_mgf_chisq(1, 0.7) == kInf);
}

TEST_CASE("full Cramer functional", "[ldp]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  REQUIRE(cf.full({0, 0, 0, 0}) == 0.0);
  REQUIRE(cf.full({0, 0, 0, 0.3}) == Catch::Approx(-0.5 * std::log(1 - 0.6)).epsilon(1e-14));
  REQUIRE(cf.full({0, 0, 0, 0.5}) == kInf);
  // closed-form piecewise integral evaluated in mpmath
  REQUIRE(cf.full({-2.0, 3.0, 0.1, 0.15}) == Catch::Approx(0.73040890121974708549).epsilon(1e-13));
  const Vec4 mean = cf.mean();
  const Vec4 expected{0.00125, 0.05, 0.5, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    Vec4 e{};
    e[i] = 1e-6;
    Vec4 me{};
    me[i] = -1e-6;
    const double fd = (cf.full(e) - cf.full(me)) / 2e-6;
    REQUIRE(fd == Catch::Approx(expected[i]).margin(1e-9));
    REQUIRE(mean[i] == Catch::Approx(expected[i]).margin(1e-14));
  }
}

TEST_CASE("Cramer functionals vanish at zero and are convex", "[ldp]") {
  const auto f = SourceSpec::indicator();
  for (const MediaModel& model : {MediaModel{mild_preset()}, MediaModel{wild_preset()}, convolved(2)}) {
    const CramerFunctional cf(model, f, 0.4);
    REQUIRE(std::abs(cf.full({0, 0, 0, 0})) < 1e-12);
    REQUIRE(std::abs(cf.approx(0.0)) < 1e-12);
    Rng rng(3, 0);
    const double scale = model.is_parameterized() ? 20.0 : 0.2;
    int checked = 0;
    while (checked < 200) {
      Vec4 a, b, m;
      for (std::size_t i = 0; i < 4; ++i) {
        a[i] = rng.uniform(-scale, scale);
        b[i] = rng.uniform(-scale, scale);
        m[i] = 0.5 * (a[i] + b[i]);
      }
      const double fa = cf.full(a), fb = cf.full(b);
      if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
      REQUIRE(cf.full(m) <= 0.5 * (fa + fb) + 1e-9);
      ++checked;
    }
  }
}

TEST_CASE("analytic gradient matches finite differences", "[ldp]") {
  const auto f = SourceSpec::indicator();
  for (const MediaModel& model : {MediaModel{wild_preset()}, convolved(1)}) {
    const CramerFunctional cf(model, f, 0.5);
    Rng rng(5, 0);
    const double scale = model.is_parameterized() ? 10.0 : 0.15;
    for (int k = 0; k < 20; ++k) {
      Vec4 l;
      for (auto& v : l) v = rng.uniform(-scale, scale);
      const auto e = cf.full_derivs(l);
      REQUIRE(e.value == Catch::Approx(cf.full(l)).epsilon(1e-14));
      for (std::size_t i = 0; i < 4; ++i) {
        const double h = 1e-5 * (1 + std::abs(l[i]));
        Vec4 p = l, m = l;
        p[i] += h;
        m[i] -= h;
        const double fd = (cf.full(p) - cf.full(m)) / (2 * h);
        REQUIRE(e.grad[i] == Catch::Approx(fd).epsilon(1e-6).margin(1e-9));
      }
    }
  }
}

TEST_CASE("doubling the panels leaves the functional unchanged", "[ldp]") {
  const auto f = SourceSpec::indicator();
  const MediaModel wild{wild_preset()};
  const CramerFunctional base(wild, f, 0.5, 512);
  const CramerFunctional fine(wild, f, 0.5, 1024);
  const Vec4 l{-30.0, 12.0, 4.0, -3.0};
  REQUIRE(std::abs(base.full(l) - fine.full(l)) < 1e-9);
  REQUIRE(std::abs(base.approx(25.0) - fine.approx(25.0)) < 1e-9);
}

TEST_CASE("approximate functional", "[ldp]") {
  const auto f = SourceSpec::indicator();
  const CramerFunctional cf(convolved(1), f, 0.5);
  REQUIRE(cf.approx(0.0) == 0.0);
  const double h = 1e-6;
  REQUIRE((cf.approx(h) - cf.approx(-h)) / (2 * h) == Catch::Approx(0.02375).epsilon(1e-8));
  // max_s G(0.5, s) = 0.025, so lambda = 20 reaches the chi-squared boundary
  REQUIRE(cf.approx(20.0) == kInf);
  REQUIRE(std::isfinite(cf.approx(19.9)));
  const MediaModel mild{mild_preset()};
  const CramerFunctional pm(mild, f, 0.3);
  REQUIRE((pm.approx(h) - pm.approx(-h)) / (2 * h) == Catch::Approx(pm.homogenized().u0).epsilon(1e-7));
}

TEST_CASE("pre-limit functional convergence order", "[ldp]") {
  const auto f = SourceSpec::indicator();
  SECTION("x on a cell boundary: second order") {
    const CramerFunctional cf(convolved(1), f, 0.5);
    const Vec4 l{-2.0, 3.0, 0.1, 0.15};
    double previous = 0.0;
    for (int n : {32, 64, 128, 256}) {
      const double gap = std::abs(cramer_prelimit(convolved(1), f, 0.5, 1.0 / n, l) - cf.full(l));
      if (n > 32) REQUIRE(previous / gap == Catch::Approx(4.0).margin(1.0));
      previous = gap;
    }
  }
  SECTION("x inside a cell: first order") {
    // 1/3 sits at the same fractional cell position for n = 32 and n = 128
    const CramerFunctional cf(convolved(1), f, 1.0 / 3.0);
    const Vec4 l{0.0, 0.0, 0.3, 0.0};
    const double g32 = std::abs(cramer_prelimit(convolved(1), f, 1.0 / 3.0, 1.0 / 32, l) - cf.full(l));
    const double g128 = std::abs(cramer_prelimit(convolved(1), f, 1.0 / 3.0, 1.0 / 128, l) - cf.full(l));
    REQUIRE(g32 / g128 == Catch::Approx(4.0).margin(0.5));
  }
  SECTION("constant direction is exact") {
    const CramerFunctional cf(convolved(1), f, 0.5);
    const Vec4 l{0.0, 0.0, 0.0, 0.2};
    REQUIRE(std::abs(cramer_prelimit(convolved(1), f, 0.5, 1.0 / 32, l) - cf.full(l)) < 1e-13);
  }
  REQUIRE_THROWS_AS(cramer_prelimit(convolved(1, 3), f, 0.5, 0.1, Vec4{}), ConfigError);
}

TEST_CASE("steepness", "[ldp]") {
  const auto f = SourceSpec::indicator();
  const auto p = steepness_check(MediaModel{mild_preset()}, f);
  REQUIRE(p.condition1);
  REQUIRE(p.steep);
  const auto c = steepness_check(convolved(1), f);
  REQUIRE(c.condition2);
  REQUIRE(c.steep);
  REQUIRE(comparison_integral_diverges(1.0, 1));
  REQUIRE_FALSE(comparison_integral_diverges(0.25, 2));
}

TEST_CASE("Chernoff bound", "[ldp]") {
  const auto f = SourceSpec::indicator();
  const ChernoffBound cb(convolved(1), f, 0.5, 0.01);
  REQUIRE(cb.mean() == Catch::Approx(0.02375).epsilon(1e-12));
  REQUIRE(cb.bound(0.02) == 0.0);
  REQUIRE(cb.log_mgf(0.0) == 0.0);
  REQUIRE(chernoff_bound(convolved(1), f, 0.5, 0.01, 0.05) == Catch::Approx(-0.173769).margin(1e-6));
  // converges to -I~ as eps -> 0
  const double fine = chernoff_bound(convolved(1), f, 0.5, 1e-3, 0.05);
  REQUIRE(fine == Catch::Approx(-0.17371874780953226).epsilon(0.02));
  REQUIRE_THROWS_AS(ChernoffBound(convolved(1, 4), f, 0.5, 0.01), ConfigError);
  const MediaModel mild{mild_preset()};
  const ChernoffBound pm(mild, f, 0.5, 0.02);
  REQUIRE(pm.mean() == Catch::Approx(homogenize_point(mild, f, 0.5).u0).epsilon(1e-9));
  REQUIRE(pm.bound(0.03) < 0.0);
}
