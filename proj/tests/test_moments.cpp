#include <cmath>
#include <memory>

#include "doctest.h"
#include "locint/errors.hpp"
#include "locint/intensity.hpp"
#include "locint/paircorr.hpp"

using namespace locint;

TEST_CASE("thinned cluster intensity evaluates kappa mu p") {
  const IntensityModel lam =
      IntensityModel::thinned_cluster(50, 40, ThinningField::step_x1(0.8, 0.2, 0.5));
  CHECK(lam({0.25, 0.5}) == doctest::Approx(1600).epsilon(1e-14));
  CHECK(lam({0.75, 0.5}) == doctest::Approx(400).epsilon(1e-14));
  CHECK(lam({0.5, 0.1}) == doctest::Approx(1600).epsilon(1e-14));  // boundary goes left
}

TEST_CASE("covariate log-linear model reproduces the fitted-coefficient fixture") {
  // distance fields that vanish at the origin
  auto df = std::make_shared<CovariateField>(
      CovariateField::distance_to({{}, {{{0, 0}, {0, 1}}}}));
  auto dv = std::make_shared<CovariateField>(CovariateField::distance_to({{{0, 0}}, {}}));
  auto dpb = std::make_shared<CovariateField>(
      CovariateField::distance_to({{}, {{{0, 0}, {1, 0}}}}));
  const std::vector<double> beta{-178.483, 0.611, 9.673, 0.034, -0.061, -0.114, -0.034,
                                 -0.0268, -0.0175, -0.0179, -0.0214, 0.0040, -0.0093};
  const std::vector<double> knots{6.73, 43.48, 54.783, 112.0};
  const IntensityModel lam = IntensityModel::covariate_log_linear(beta, knots, df, dv, dpb);
  CHECK(lam({0, 0}) == doctest::Approx(std::exp(-178.483)).epsilon(1e-12));
  // at (0,2): D_f = 1 (first band), D_v = 2, D_pb = 2
  const double d = 2.0;
  CHECK(std::log(lam({0, d})) - std::log(lam({0, 0})) ==
        doctest::Approx(9.673 * d - 0.114 * d * d - 0.034 * 1.0 + 0.0040 * d - 0.0093 * d)
            .epsilon(1e-9));

  // knots must increase
  CHECK_THROWS_AS(
      IntensityModel::covariate_log_linear(beta, {6.73, 6.73, 54.783, 112.0}, df, dv, dpb),
      InvalidModelError);
}

TEST_CASE("matern pair correlation closed forms") {
  const PairCorrelationModel g = PairCorrelationModel::matern(50, 0.05);
  CHECK(g(0.0) == doctest::Approx(3.5464790895).epsilon(1e-9));
  CHECK(g(0.05) == doctest::Approx(1.9956789745).epsilon(1e-9));
  CHECK(g(0.1) == 1.0);
  CHECK(g(0.25) == 1.0);
  CHECK(g.support_radius() == doctest::Approx(0.1));
}

TEST_CASE("matern pcf is continuous and decreasing on its support") {
  const PairCorrelationModel g = PairCorrelationModel::matern(50, 0.05);
  double prev = g(1e-12);
  for (int i = 1; i <= 2000; ++i) {
    const double r = 0.1 * i / 2000.0;
    const double v = g(r);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK(g(0.1 - 1e-9) == doctest::Approx(1.0).epsilon(1e-5));  // continuous at the support edge
}

TEST_CASE("exponential pcf families") {
  const PairCorrelationModel gp = PairCorrelationModel::exp_plus_one(0.377, 8.69);
  CHECK(gp(0.0) == doctest::Approx(1.0 + 1.0 / 0.377).epsilon(1e-12));
  CHECK(gp(0.04) == doctest::Approx(1.0 + std::exp(-8.69 * 0.2) / 0.377).epsilon(1e-12));

  // literal scaled form from the application section; does not tend to 1
  const PairCorrelationModel gs = PairCorrelationModel::exp_scaled(8.9502, 0.0266);
  CHECK(gs(0.0) == doctest::Approx(1.0 / 8.9502).epsilon(1e-12));
  CHECK(gs(1e6) < 0.2);
}

TEST_CASE("empirical pcf interpolates and closes at one") {
  const PairCorrelationModel g =
      PairCorrelationModel::empirical({0.1, 0.2, 0.3}, {3.0, 2.0, 1.0});
  CHECK(g(0.05) == 3.0);   // flat extension below the first knot
  CHECK(g(0.15) == doctest::Approx(2.5));
  CHECK(g(0.3) == 1.0);
  CHECK(g(0.9) == 1.0);
  CHECK(g.support_radius() == doctest::Approx(0.3));
  CHECK_THROWS_AS(PairCorrelationModel::empirical({0.2, 0.1}, {1, 1}), InvalidModelError);
  CHECK_THROWS_AS(PairCorrelationModel::empirical({0.1, 0.2}, {1, -1}), InvalidModelError);
}

TEST_CASE("raster covariates interpolate bilinearly") {
  // value = x + 10 y on a 3x3 grid
  std::vector<double> xs{0, 1, 2}, ys{0, 1, 2};
  std::vector<double> vals;
  for (double y : ys)
    for (double x : xs) vals.push_back(x + 10 * y);
  const CovariateField f = CovariateField::raster(xs, ys, vals);
  CHECK(f({0.5, 0.25}) == doctest::Approx(0.5 + 2.5).epsilon(1e-12));
  CHECK(f({1.75, 1.5}) == doctest::Approx(1.75 + 15).epsilon(1e-12));
  CHECK_THROWS_AS(f({5, 5}), NumericError);
}

TEST_CASE("intensity upper bound covers the model") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  const IntensityModel lam =
      IntensityModel::thinned_cluster(50, 40, ThinningField::step_x1(0.8, 0.2, 0.5));
  CHECK(lam.upper_bound(w) >= 1600.0);
}
