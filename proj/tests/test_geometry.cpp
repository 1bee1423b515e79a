#include <cmath>

#include "doctest.h"
#include "locint/errors.hpp"
#include "locint/geometry.hpp"
#include "locint/rng.hpp"

using namespace locint;

namespace {

Window unit_square() { return Window::rectangle(0, 0, 1, 1); }

Window square_with_hole() {
  return Window(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                {Polygon{{0.35, 0.35}, {0.65, 0.35}, {0.65, 0.65}, {0.35, 0.65}}});
}

// overlap length of [a0,a1] and [b0,b1]
double seg_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

double rect_overlap(double ax0, double ay0, double ax1, double ay1, double bx0, double by0,
                    double bx1, double by1) {
  return seg_overlap(ax0, ax1, bx0, bx1) * seg_overlap(ay0, ay1, by0, by1);
}

}  // namespace

TEST_CASE("window areas via shoelace") {
  CHECK(unit_square().area() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(square_with_hole().area() == doctest::Approx(0.91).epsilon(1e-15));
  const Window w2(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                  {Polygon{{0.05, 0.36}, {0.95, 0.36}, {0.95, 0.64}, {0.05, 0.64}}});
  CHECK(w2.area() == doctest::Approx(0.748).epsilon(1e-15));
}

TEST_CASE("degenerate windows are rejected") {
  CHECK_THROWS_AS(Window(Polygon{{0, 0}, {1, 0}}), InvalidGeometryError);
  // bowtie
  CHECK_THROWS_AS(Window(Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidGeometryError);
  // hole covering the outer
  CHECK_THROWS_AS(Window(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                         {Polygon{{0.2, 0.2}, {1.5, 0.2}, {1.5, 0.8}, {0.2, 0.8}}}),
                  InvalidGeometryError);
}

TEST_CASE("containment with holes") {
  const Window w = square_with_hole();
  CHECK(unit_square().contains({0.5, 0.5}));
  CHECK_FALSE(w.contains({0.5, 0.5}));  // hole interior
  CHECK_FALSE(w.contains({1.5, 0.5}));  // outside
  CHECK(w.contains({0.1, 0.1}));
  CHECK(w.contains({0.35, 0.35}));  // hole boundary counts as inside
  CHECK(w.contains({0.0, 0.0}));    // outer boundary counts as inside
}

TEST_CASE("distance_to_set basics") {
  GeometrySet pts;
  pts.points = {{3, 4}};
  CHECK(distance_to_set({0, 0}, pts) == doctest::Approx(5.0));

  GeometrySet line;
  line.polylines = {{{0, 0}, {1, 0}, {1, 1}}};
  CHECK(distance_to_set({1, 0}, line) == 0.0);  // on a vertex
  CHECK(distance_to_set({0.5, 0.25}, line) == doctest::Approx(0.25));

  CHECK_THROWS_AS(distance_to_set({0, 0}, GeometrySet{}), InvalidArgumentError);
}

TEST_CASE("distance to hole boundary") {
  const Window w = square_with_hole();
  // nearest hole edge from the centre of the hole
  double d = 1e9;
  for (const auto& h : w.holes()) d = std::min(d, polygon_boundary_distance({0.5, 0.5}, h));
  CHECK(d == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("distance to a set is 1-Lipschitz") {
  GeometrySet s;
  s.points = {{0.3, 0.7}, {0.9, 0.2}};
  s.polylines = {{{0.1, 0.1}, {0.8, 0.5}, {0.2, 0.9}}};
  SeededStream rng(42, 0);
  for (int i = 0; i < 500; ++i) {
    const Vec2 a{rng.uniform(-1, 2), rng.uniform(-1, 2)};
    const Vec2 b{rng.uniform(-1, 2), rng.uniform(-1, 2)};
    const double da = distance_to_set(a, s);
    const double db = distance_to_set(b, s);
    CHECK(std::abs(da - db) <= dist(a, b) + 1e-12);
    CHECK(da >= 0.0);
  }
}

TEST_CASE("border region of the unit square") {
  const Window ring = border_region(unit_square(), 0.05);
  CHECK(ring.area() == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(ring.contains({-0.02, 0.5}));
  CHECK_FALSE(ring.contains({0.5, 0.5}));
  CHECK_THROWS_AS(border_region(unit_square(), 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(border_region(unit_square(), -1.0), InvalidArgumentError);
  // holes do not contribute a ring: same result for the holed window
  const Window ring2 = border_region(square_with_hole(), 0.05);
  CHECK(ring2.area() == doctest::Approx(0.21).epsilon(1e-12));
}

TEST_CASE("border region of a convex polygon uses corner arcs") {
  // right triangle; exact dilation area = A + perimeter*r + pi r^2
  const Window tri(Polygon{{0, 0}, {1, 0}, {0, 1}});
  const double r = 0.05;
  const Window ring = border_region(tri, r, 64);
  const double per = 2.0 + std::sqrt(2.0);
  const double expect = per * r + M_PI * r * r;
  CHECK(ring.area() == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("set covariance of the unit square matches the closed form") {
  const Window w = unit_square();
  for (const Vec2 v : {Vec2{0, 0}, Vec2{0.2, 0.1}, Vec2{-0.3, 0.25}, Vec2{0.9, 0.9}}) {
    const double want = std::max(0.0, 1 - std::abs(v.x)) * std::max(0.0, 1 - std::abs(v.y));
    CHECK(set_covariance(w, v) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("set covariance with a hole matches rectangle arithmetic") {
  const Window w = square_with_hole();
  auto oracle = [](Vec2 v) {
    const double rr = rect_overlap(0, 0, 1, 1, v.x, v.y, 1 + v.x, 1 + v.y);
    const double rh = rect_overlap(0, 0, 1, 1, 0.35 + v.x, 0.35 + v.y, 0.65 + v.x, 0.65 + v.y);
    const double hr = rect_overlap(0.35, 0.35, 0.65, 0.65, v.x, v.y, 1 + v.x, 1 + v.y);
    const double hh = rect_overlap(0.35, 0.35, 0.65, 0.65, 0.35 + v.x, 0.35 + v.y, 0.65 + v.x,
                                   0.65 + v.y);
    return rr - rh - hr + hh;
  };
  SeededStream rng(7, 0);
  for (int i = 0; i < 64; ++i) {
    const Vec2 v{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    CHECK(set_covariance(w, v) == doctest::Approx(oracle(v)).epsilon(1e-10));
  }
  const SetCovarianceTable table(w, 0.4, 81);
  for (int i = 0; i < 32; ++i) {
    const Vec2 v{rng.uniform(-0.35, 0.35), rng.uniform(-0.35, 0.35)};
    CHECK(table(v) == doctest::Approx(oracle(v)).epsilon(0.02));
  }
}

TEST_CASE("convex clipping and region quadrature") {
  const Window w = square_with_hole();
  // disc centred in the hole: intersection with the window removes the hole part
  const Polygon disc = disc_polygon({0.5, 0.5}, 0.2, 256);
  const double disc_area = polygon_signed_area(disc);
  const double got = region_window_area(disc, w);
  // exact: disc area minus hole-overlap; hole [0.35,.65]^2 contains a square chunk
  // of the disc; compute by fine midpoint sampling as an independent oracle
  int inside = 0;
  const int n = 1200;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 p{0.3 + 0.4 * (i + 0.5) / n, 0.3 + 0.4 * (j + 0.5) / n};
      if (dist(p, {0.5, 0.5}) <= 0.2 && w.contains(p)) ++inside;
    }
  const double mc = 0.4 * 0.4 * double(inside) / (double(n) * n);
  CHECK(got == doctest::Approx(mc).epsilon(2e-3));
  CHECK(got < disc_area);

  // quadrature weights sum to the same area
  const auto nodes = region_window_quadrature(disc, w, TriangleRule::of_order(4));
  double sum = 0.0;
  for (const auto& q : nodes) sum += q.w;
  CHECK(sum == doctest::Approx(got).epsilon(1e-12));

  // split integration of a step in x is exact
  const auto split_nodes =
      region_window_quadrature(disc, w, TriangleRule::of_order(4), 0.0, {0.5});
  double left = 0.0;
  for (const auto& q : split_nodes)
    if (q.p.x <= 0.5) left += q.w;
  CHECK(left == doctest::Approx(got / 2).epsilon(1e-9));
}

TEST_CASE("earclip handles non-convex polygons") {
  const Polygon l_shape{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const auto tris = earclip(l_shape);
  double area = 0.0;
  for (const auto& t : tris) area += 0.5 * cross(t[1] - t[0], t[2] - t[0]);
  CHECK(area == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(tris.size() == l_shape.size() - 2);
}
