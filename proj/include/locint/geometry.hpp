#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "locint/quadrature.hpp"

namespace locint {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Simple polygon stored as a vertex loop without a repeated closing vertex.
using Polygon = std::vector<Vec2>;

struct BBox {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  BBox inflated(double r) const { return {xmin - r, ymin - r, xmax + r, ymax + r}; }
  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

double polygon_signed_area(const Polygon& p);
BBox polygon_bbox(const Polygon& p);
bool polygon_is_simple(const Polygon& p);
bool point_in_polygon(Vec2 p, const Polygon& poly);  // even-odd rule, boundary unspecified
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double polygon_boundary_distance(Vec2 p, const Polygon& poly);

// Ear-clipping triangulation of a simple CCW polygon. Throws
// InvalidGeometryError on non-simple input.
std::vector<std::array<Vec2, 3>> earclip(const Polygon& ccw);

struct SignedTriangle {
  Vec2 a, b, c;
  double sign = 1.0;  // +1 outer piece, -1 hole piece
};

// Planar window: a simple outer polygon minus pairwise-disjoint holes
// strictly inside it. Vertices are normalized to CCW (outer) / CW (holes).
// Points within kBoundaryTol of any edge count as inside.
class Window {
 public:
  explicit Window(Polygon outer, std::vector<Polygon> holes = {});
  static Window rectangle(double x0, double y0, double x1, double y1);

  double area() const { return area_; }
  bool contains(Vec2 p) const;
  double boundary_distance(Vec2 p) const;  // distance to outer + hole edges
  double outer_boundary_distance(Vec2 p) const;

  const Polygon& outer() const { return outer_; }
  const std::vector<Polygon>& holes() const { return holes_; }
  BBox bbox() const { return bbox_; }

  // Disjoint triangle tiling with inclusion-exclusion signs:
  // 1_W = sum_i sign_i 1_{T_i}.
  const std::vector<SignedTriangle>& decomposition() const;

  bool operator==(const Window& o) const;

  static constexpr double kBoundaryTol = 1e-12;

 private:
  Polygon outer_;
  std::vector<Polygon> holes_;
  double area_ = 0.0;
  BBox bbox_;
  mutable std::vector<SignedTriangle> decomp_;
};

// Ring of thickness r outside the outer boundary of w (holes are ignored).
// Axis-aligned rectangular outers dilate with square corners; general
// polygons offset edges and join convex corners with arc_segments chords.
Window border_region(const Window& w, double r, int arc_segments = 16);

// Target of distance queries: point sites and/or open polylines.
struct GeometrySet {
  std::vector<Vec2> points;
  std::vector<std::vector<Vec2>> polylines;
  bool empty() const;
};
double distance_to_set(Vec2 p, const GeometrySet& s);

// Convex polygon clipped by the half-plane on the left of a->b.
Polygon clip_halfplane(const Polygon& subject, Vec2 a, Vec2 b);
// Intersection of a convex subject with a convex clip polygon (CCW).
Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip_ccw);

// area(W ∩ (W + v)), the set covariance of the window.
double set_covariance(const Window& w, Vec2 v);

double windows_intersection_area(const Window& a, const Window& b);

// Bilinear table of the set covariance over |v_x|,|v_y| <= rmax.
class SetCovarianceTable {
 public:
  SetCovarianceTable(const Window& w, double rmax, int n_per_axis = 129);
  double operator()(Vec2 v) const;
  double rmax() const { return rmax_; }

 private:
  double rmax_;
  int n_;
  double step_;
  std::vector<double> values_;  // (n x n) row-major over v grid
};

Polygon disc_polygon(Vec2 c, double r, int segments = 64);

struct WeightedPoint {
  Vec2 p;
  double w = 0.0;  // signed; weights sum to the signed region area
};

// Quadrature nodes over (convex region ∩ window). Pieces are fan-triangulated
// and subdivided until edges are below max_edge (0 disables subdivision);
// split_x lists vertical lines the pieces are additionally cut along, so
// integrands with jumps across x = const are integrated exactly per piece.
std::vector<WeightedPoint> region_window_quadrature(const Polygon& convex_region_ccw,
                                                    const Window& w, const TriangleRule& rule,
                                                    double max_edge = 0.0,
                                                    const std::vector<double>& split_x = {});
double region_window_area(const Polygon& convex_region_ccw, const Window& w);

}  // namespace locint
