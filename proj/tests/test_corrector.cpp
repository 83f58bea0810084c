#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ldhom/corrector.hpp"

using namespace ldhom;

namespace {

MediaModel convolved(int xi, double h_norm = 1.0) { return MediaModel{ConvolvedCoarse::box(xi, h_norm, 1)}; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("corrector variance", "[corrector]") {
  const auto f = SourceSpec::indicator();
  REQUIRE(corrector_variance(convolved(1), f, 0.5) == Catch::Approx(0.0011666666666666667).epsilon(1e-9));
  REQUIRE(corrector_variance(convolved(1), SourceSpec(), 0.5) == 0.0);
  REQUIRE(corrector_covariance(convolved(1), f, 0.3, 0.3) == Catch::Approx(corrector_variance(convolved(1), f, 0.3)));
  REQUIRE(corrector_variance(convolved(1), f, 0.5) / sigma_sq(convolved(1), 0.5) ==
          Catch::Approx(5.8333333333333333e-4).epsilon(1e-9));
  // frozen from an mpmath quadrature of G^2 sigma^2
  const MediaModel mild{mild_preset()};
  const MediaModel wild{wild_preset()};
  REQUIRE(corrector_variance(mild, f, 0.5) == Catch::Approx(5.351633260333336e-5).epsilon(1e-8));
  REQUIRE(corrector_variance(mild, f, 0.3) == Catch::Approx(5.3761801667321182e-5).epsilon(1e-8));
  REQUIRE(corrector_variance(wild, f, 0.5) == Catch::Approx(0.0020970432091257057).epsilon(1e-8));
  REQUIRE(corrector_variance(wild, f, 0.3) == Catch::Approx(0.00039707610957273235).epsilon(1e-8));
}

TEST_CASE("sampled corrector paths", "[corrector]") {
  const auto f = SourceSpec::indicator();
  const CorrectorSpec spec{convolved(1), f, 2000};
  const std::vector<double> grid{0.3, 0.5, 0.7};
  const CorrectorSampler sampler(spec, grid);
  const int n = 100000;
  double m = 0.0, v5 = 0.0, c37 = 0.0, q37 = 0.0;
  std::vector<double> draws(10000);
  for (int k = 0; k < n; ++k) {
    Rng rng(3, static_cast<std::uint64_t>(k));
    const auto v = sampler.sample(rng);
    m += v[1];
    v5 += v[1] * v[1];
    c37 += v[0] * v[2];
    q37 += v[0] * v[0] * v[2] * v[2];
    if (k < 10000) draws[k] = v[1];
  }
  const double cc = corrector_variance(spec.model, f, 0.5);
  const double var = v5 / n;
  REQUIRE(std::abs(m / n) < 3.0 * std::sqrt(cc / n));
  REQUIRE(std::abs(var - cc) < 3.0 * cc * std::sqrt(2.0 / n));
  const double cov = corrector_covariance(spec.model, f, 0.3, 0.7);
  const double cov_se = std::sqrt((q37 / n - (c37 / n) * (c37 / n)) / n);
  REQUIRE(std::abs(c37 / n - cov) < 3.0 * cov_se);

  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = normal_cdf(draws[i] / std::sqrt(cc));
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / draws.size()),
                   std::abs(cdf - static_cast<double>(i + 1) / draws.size())});
  }
  // Kolmogorov critical value at level 0.001
  REQUIRE(ks < 1.9495 / std::sqrt(static_cast<double>(draws.size())));

  Rng path_rng(1, 0);
  const SolutionPath path = sample_corrector(spec, grid, path_rng);
  REQUIRE(path.v_eps.size() == grid.size());
}

TEST_CASE("wiener discretization converges", "[corrector]") {
  const auto f = SourceSpec::indicator();
  const MediaModel wild{wild_preset()};
  const std::vector<double> grid{0.5};
  const CorrectorSampler coarse(CorrectorSpec{wild, f, 2000}, grid);
  const CorrectorSampler fine(CorrectorSpec{wild, f, 4000}, grid);
  REQUIRE(std::abs(coarse.discrete_variance(0) / fine.discrete_variance(0) - 1.0) < 0.01);
  REQUIRE(fine.discrete_variance(0) == Catch::Approx(corrector_variance(wild, f, 0.5)).epsilon(0.01));
}

TEST_CASE("gaussian rate", "[corrector]") {
  REQUIRE(gaussian_rate(0.02375, 1.1667e-3, 0.02375) == 0.0);
  REQUIRE(gaussian_rate(0.02375, 1.1667e-3, 0.1) == Catch::Approx(2.4917).epsilon(1e-4));
  REQUIRE(gaussian_rate(0.0, 1.0, 2.0) == Catch::Approx(4.0 * gaussian_rate(0.0, 1.0, 1.0)));
  REQUIRE_THROWS(gaussian_rate(0.0, 0.0, 1.0));
}

TEST_CASE("CLT validity diagnostic", "[corrector]") {
  const double cc = 1.1667e-3;
  REQUIRE(clt_validity(0.0, cc, 1e-12, 0.05).valid);
  const auto edge = clt_validity(0.0, cc, 1e-2, std::sqrt(cc * 1e-2));
  REQUIRE(edge.lhs == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(edge.rhs == Catch::Approx(1.0));
  REQUIRE_FALSE(edge.valid);
  const auto far = clt_validity(0.02375, cc, 1e-2, 0.1);
  REQUIRE(far.rhs == Catch::Approx(498.3).epsilon(1e-3));
  REQUIRE(far.valid);
}
