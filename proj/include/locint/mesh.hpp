#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "locint/geometry.hpp"

namespace locint {

// Conforming triangulation with positively oriented triangles and a uniform
// bin grid for point location.
class TriangleMesh {
 public:
  TriangleMesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t triangle_count() const { return tris_.size(); }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
  double triangle_area(std::size_t t) const { return area_[t]; }
  double total_area() const { return total_area_; }
  BBox bbox() const { return bbox_; }
  double max_edge_length() const;
  double min_angle_deg() const;

  // Index of the triangle containing p (points on shared edges resolve to the
  // lowest triangle index), or -1 when p is outside the mesh beyond tol.
  int locate(Vec2 p, double tol = 1e-10) const;
  std::array<double, 3> barycentric(int tri, Vec2 p) const;

  // P1 interpolation of nodal values at p; throws NumericError if p is
  // outside the mesh.
  double interpolate(std::span<const double> nodal, Vec2 p) const;

 private:
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<double> area_;
  double total_area_ = 0.0;
  BBox bbox_;
  // locator grid
  int nx_ = 0, ny_ = 0;
  double cell_ = 0.0;
  std::vector<std::vector<int>> cells_;
  void build_locator();
};

// Constrained Delaunay refinement. Produces a conforming mesh of w whose
// edges are at most target_edge long and whose angles are at least
// min_angle_deg. Optional internal segment chains (e.g. model discontinuity
// lines) are preserved as mesh edges.
TriangleMesh triangulate(const Window& w, double target_edge,
                         const std::vector<std::vector<Vec2>>& internal_segments = {},
                         double min_angle_deg = 20.0);

// Checks the mesh invariants against its window: positive areas, edge
// conformity, boundary edges on the window boundary (within snap_tol) and
// area conservation within area_rel_tol. Throws InvalidGeometryError.
void validate_mesh(const TriangleMesh& mesh, const Window& w, double snap_tol = 1e-10,
                   double area_rel_tol = 1e-9);

// Line-oriented ASCII mesh format with 1-based ids:
//   NODES <n>       followed by n lines "<id> <x> <y>"
//   TRIANGLES <m>   followed by m lines "<id> <n1> <n2> <n3>"
void save_mesh(const TriangleMesh& mesh, const std::string& path);
TriangleMesh load_mesh(const std::string& path);

}  // namespace locint
