#include <cmath>

#include "doctest.h"
#include "locint/errors.hpp"
#include "locint/simulate.hpp"

using namespace locint;

namespace {

const double kKappa = 50, kMu = 40;

ThinningField p1() { return ThinningField::step_x1(0.8, 0.2, 0.5); }

}  // namespace

TEST_CASE("zero intensity gives an empty pattern") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  SeededStream rng(1, 0);
  CHECK(simulate_poisson(0.0, w, rng).empty());
  CHECK(simulate_matern_cluster(kKappa, 0.0, 0.05, w, rng).empty());
}

TEST_CASE("homogeneous poisson mean count") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  double total = 0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    SeededStream rng(100, std::uint64_t(r));
    total += double(simulate_poisson(100.0, w, rng).size());
  }
  const double mean = total / reps;
  CHECK(mean > 98.0);
  CHECK(mean < 102.0);
}

TEST_CASE("inhomogeneous poisson respects a piecewise intensity") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  const IntensityModel lam = IntensityModel::halves_x1({0, 0, 1, 1}, 0.5, 1600, 400);
  double left = 0, right = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    SeededStream rng(200, std::uint64_t(r));
    const PointPattern pat = simulate_poisson(lam, w, rng);
    for (const Vec2& p : pat.points()) (p.x <= 0.5 ? left : right) += 1;
  }
  CHECK(left / reps == doctest::Approx(800).epsilon(0.03));
  CHECK(right / reps == doctest::Approx(200).epsilon(0.03));
}

TEST_CASE("matern cluster mean count") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  double total = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    SeededStream rng(300, std::uint64_t(r));
    total += double(simulate_matern_cluster(kKappa, kMu, 0.05, w, rng).size());
  }
  CHECK(total / reps == doctest::Approx(2000).epsilon(0.03));
}

TEST_CASE("thinning basics") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  SeededStream rng(400, 0);
  const PointPattern pat = simulate_poisson(200.0, w, rng);

  SeededStream r1(400, 1);
  const PointPattern all = thin(ThinningField::constant(1.0), pat, r1);
  REQUIRE(all.size() == pat.size());
  for (std::size_t i = 0; i < pat.size(); ++i) CHECK(all.points()[i] == pat.points()[i]);

  SeededStream r2(400, 2);
  CHECK(thin(ThinningField::constant(0.0), pat, r2).empty());

  SeededStream r3(400, 3);
  const ThinningField bad = ThinningField::custom([](Vec2 p) { return 1.5 * p.x + 0.2; });
  CHECK_THROWS_AS(thin(bad, pat, r3), InvalidModelError);
}

TEST_CASE("imcp mean count under p1 thinning") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  double total = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    SeededStream rng(500, std::uint64_t(r));
    total += double(simulate_imcp(kKappa, kMu, 0.09, p1(), w, rng).size());
  }
  // kappa mu int p1 = 2000 * 0.5
  CHECK(total / reps == doctest::Approx(1000).epsilon(0.03));
}

TEST_CASE("simulators are deterministic per (seed, stream)") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  SeededStream a(77, 5), b(77, 5), c(77, 6);
  const PointPattern pa = simulate_imcp(kKappa, kMu, 0.05, p1(), w, a);
  const PointPattern pb = simulate_imcp(kKappa, kMu, 0.05, p1(), w, b);
  const PointPattern pc = simulate_imcp(kKappa, kMu, 0.05, p1(), w, c);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa.points()[i] == pb.points()[i]);
  CHECK(pa.size() != pc.size());  // different stream
}

TEST_CASE("thinning commutes with restriction in distribution") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  const Window sub = Window::rectangle(0.2, 0.2, 0.8, 0.8);
  const int reps = 600;
  double mean_a = 0, mean_b = 0, pairs_a = 0, pairs_b = 0;
  const double rk = 0.1;  // pair-count radius for a crude K statistic
  for (int r = 0; r < reps; ++r) {
    SeededStream rng_a(600, std::uint64_t(r));
    SeededStream rng_b(600, std::uint64_t(r) + reps);
    const PointPattern base_a = simulate_matern_cluster(kKappa, kMu, 0.07, w, rng_a);
    const PointPattern base_b = simulate_matern_cluster(kKappa, kMu, 0.07, w, rng_b);
    const PointPattern a = restrict(thin(p1(), base_a, rng_a), sub);
    const PointPattern b = thin(p1(), restrict(base_b, sub), rng_b);
    mean_a += double(a.size());
    mean_b += double(b.size());
    const PointGrid ga(a.points(), rk), gb(b.points(), rk);
    for (const Vec2& p : a.points()) pairs_a += gb.count_within(p, rk) * 0 + ga.count_within(p, rk) - 1;
    for (const Vec2& p : b.points()) pairs_b += gb.count_within(p, rk) - 1;
  }
  mean_a /= reps;
  mean_b /= reps;
  pairs_a /= reps;
  pairs_b /= reps;
  CHECK(mean_a == doctest::Approx(mean_b).epsilon(0.03));
  CHECK(pairs_a == doctest::Approx(pairs_b).epsilon(0.08));
}

TEST_CASE("matern edge correction keeps the boundary rate unbiased") {
  const Window w = Window::rectangle(0, 0, 1, 1);
  const double R = 0.09;
  double border = 0, interior = 0;
  const int reps = 1500;
  for (int r = 0; r < reps; ++r) {
    SeededStream rng(700, std::uint64_t(r));
    const PointPattern pat = simulate_matern_cluster(kKappa, kMu, R, w, rng);
    for (const Vec2& p : pat.points()) {
      if (p.y <= R) border += 1;
      else if (p.y > 0.4 && p.y <= 0.4 + R) interior += 1;
    }
  }
  // equal-area horizontal strips must see the same rate
  CHECK(border == doctest::Approx(interior).epsilon(0.03));
}
