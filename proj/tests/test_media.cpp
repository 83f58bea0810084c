#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ldhom/errors.hpp"
#include "ldhom/media.hpp"

using namespace ldhom;

namespace {

MediaModel convolved(int xi, double h_norm = 1.0, int kappa = 1) {
  return MediaModel{ConvolvedCoarse::box(xi, h_norm, kappa)};
}

}  // namespace

TEST_CASE("coarse field", "[media]") {
  ParameterizedCoarse c;
  REQUIRE(coarse_field(c, 0.37) == 1.0);
  c.xi[0] = 1.0;
  REQUIRE(coarse_field(c, 0.5) == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
  c.xi = {-1, 1, -1, 1, -1, 1, -1, 1};
  REQUIRE(coarse_field(c, 0.5) == 17.0 / 32.0);
  REQUIRE(coarse_kinks(c).size() == 2);
}

TEST_CASE("sample_coarse laws", "[media]") {
  SECTION("uniform xi is centred") {
    Rng rng(5, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000 / 8; ++i) {
      const auto m = sample_coarse(MediaFamily::Parameterized, rng);
      for (double v : m.parameterized().xi) {
        REQUIRE(std::abs(v) <= 1.0);
        sum += v;
      }
    }
    REQUIRE(std::abs(sum / 100000.0) < 0.01);
  }
  SECTION("geometric xi has mean 5") {
    Rng rng(6, 0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += sample_coarse(MediaFamily::Convolved, rng).convolved().xi;
    REQUIRE(sum / n == Catch::Approx(5.0).margin(0.02));
  }
}

TEST_CASE("sample_fine for convolved media", "[media]") {
  SECTION("dirac kernel copies beta") {
    Rng rng(1, 1);
    const auto r = sample_fine(convolved(2), 0.01, rng);
    REQUIRE(r.n_cells == 100);
    REQUIRE(r.beta_window.size() == 100);
    for (std::size_t n = 0; n < 100; ++n) REQUIRE(r.inv_cells[n] == r.beta_window[n]);
  }
  SECTION("mean of gamma is xi times the kernel mass") {
    Rng rng(2, 1);
    const auto r = sample_fine(convolved(3), 1e-6, rng);
    double sum = 0.0, sq = 0.0;
    for (double g : r.inv_cells) {
      sum += g;
      sq += g * g;
    }
    const double n = static_cast<double>(r.n_cells);
    const double mean = sum / n;
    REQUIRE(mean == Catch::Approx(3.0).margin(0.01));
    const double se = std::sqrt((sq / n - mean * mean) / n);
    REQUIRE(std::abs(mean - 3.0) < 3.0 * se);
  }
  SECTION("box kernel variance") {
    Rng rng(3, 1);
    const auto model = convolved(1, 1.0, 4);
    REQUIRE(model.convolved().h_sq_sum() == Catch::Approx(0.25));
    const auto r = sample_fine(model, 1e-6, rng);
    REQUIRE(r.beta_window.size() == r.n_cells + 3);
    double sum = 0.0, sq = 0.0;
    for (double g : r.inv_cells) {
      sum += g;
      sq += g * g;
    }
    const double n = static_cast<double>(r.n_cells);
    const double var = sq / n - (sum / n) * (sum / n);
    REQUIRE(var == Catch::Approx(2.0 * 1.0 * 0.25).epsilon(0.05));
  }
  SECTION("non-integer cell count is rejected") {
    Rng rng(4, 1);
    REQUIRE_THROWS_AS(sample_fine(convolved(1), 0.3, rng), ConfigError);
    REQUIRE_THROWS_AS(sample_fine(MediaModel{ParameterizedCoarse{}}, 0.3, rng), ConfigError);
  }
  SECTION("draws are reproducible") {
    Rng a(77, 3), b(77, 3);
    const auto ra = sample_fine(convolved(2, 1.0, 3), 1.0 / 64, a);
    const auto rb = sample_fine(convolved(2, 1.0, 3), 1.0 / 64, b);
    REQUIRE(ra.inv_cells == rb.inv_cells);
    REQUIRE(ra.beta_window == rb.beta_window);
  }
}

TEST_CASE("inverse coefficient lookup", "[media]") {
  const MediaModel flat{ParameterizedCoarse{}};
  FieldRealization r{0.25, 4, {0.0, 0.0, 0.0, 0.0}, {}};
  REQUIRE(inv_coeff_at(flat, r, 0.6) == 1.0);

  FieldRealization c{0.5, 2, {0.7, 1.3}, {0.7, 1.3}};
  REQUIRE(inv_coeff_at(convolved(1), c, 0.2) == 0.7);
  REQUIRE(inv_coeff_at(convolved(1), c, 0.5) == 1.3);
}

TEST_CASE("parameterized coefficients stay inside their bounds", "[media]") {
  Rng rng(8, 0);
  for (int k = 0; k < 10000; ++k) {
    const auto model = sample_coarse(MediaFamily::Parameterized, rng);
    FieldRealization r{0.5, 2, {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, {}};
    const double s = rng.uniform();
    const double inv = inv_coeff_at(model, r, s);
    REQUIRE(inv >= 2.0 / 7.0);
    REQUIRE(inv <= 32.0);
  }
}

TEST_CASE("homogenized coefficient", "[media]") {
  REQUIRE(homogenized_coeff(convolved(3), 0.4) == Catch::Approx(1.0 / 3.0));
  REQUIRE(homogenized_coeff(convolved(1), 0.4) == 1.0);
  // 1 / log 3 from an mpmath quadrature of the V_alpha density
  REQUIRE(homogenized_coeff(MediaModel{ParameterizedCoarse{}}, 0.3) ==
          Catch::Approx(0.91023922662683739).epsilon(1e-14));
  const auto wild = MediaModel{wild_preset()};
  REQUIRE(homogenized_coeff(wild, 0.41) == homogenized_coeff(wild, 0.41));
}

TEST_CASE("local corrector variance", "[media]") {
  REQUIRE(sigma_sq(convolved(1), 0.3) == Catch::Approx(2.0));
  REQUIRE(sigma_sq(convolved(2, 0.5), 0.3) == Catch::Approx(1.0));
  // 4/3 - (log 3)^2 evaluated exactly
  REQUIRE(sigma_sq(MediaModel{ParameterizedCoarse{}}, 0.3) == Catch::Approx(0.12638437252075136).epsilon(1e-12));
}

TEST_CASE("V_alpha moments agree with sampling", "[media]") {
  for (double alpha : {17.0 / 32.0, 1.0, 2.0}) {
    Rng rng(11, static_cast<std::uint64_t>(alpha * 64));
    const int n = 1000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += 1.0 / (alpha + 0.5 * rng.uniform(-1.0, 1.0));
    const double se = std::sqrt(valpha_variance(alpha, 0.5) / n);
    REQUIRE(std::abs(sum / n - valpha_mean(alpha, 0.5)) < 3.0 * se);
  }
  Rng rng(12, 0);
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = 1.0 / (1.0 + 0.5 * rng.uniform(-1.0, 1.0));
    sum += v;
    sq += v * v;
  }
  const double var = sq / n - (sum / n) * (sum / n);
  REQUIRE(var == Catch::Approx(valpha_variance(1.0, 0.5)).epsilon(0.01));
}

TEST_CASE("presets", "[media]") {
  const auto mild = mild_preset();
  const auto wild = wild_preset();
  REQUIRE(coarse_kinks(mild).empty());
  const auto kinks = coarse_kinks(wild);
  REQUIRE(kinks.size() == 2);
  REQUIRE(kinks[0] == Catch::Approx(0.38514006788907).margin(1e-10));
  REQUIRE(kinks[1] == Catch::Approx(0.61485993211093).margin(1e-10));
}
