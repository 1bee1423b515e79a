#include "locint/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "locint/errors.hpp"

namespace locint {

TriangleMesh::TriangleMesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles)
    : nodes_(std::move(nodes)), tris_(std::move(triangles)) {
  if (nodes_.empty() || tris_.empty())
    throw InvalidGeometryError("mesh: needs at least one node and one triangle");
  area_.reserve(tris_.size());
  for (const auto& t : tris_) {
    for (const int v : t)
      if (v < 0 || v >= int(nodes_.size()))
        throw InvalidGeometryError("mesh: triangle references missing node");
    const double a = 0.5 * cross(nodes_[size_t(t[1])] - nodes_[size_t(t[0])],
                                 nodes_[size_t(t[2])] - nodes_[size_t(t[0])]);
    if (!(a > 0.0)) throw InvalidGeometryError("mesh: non-positive triangle area");
    area_.push_back(a);
    total_area_ += a;
  }
  bbox_ = polygon_bbox(nodes_);
  build_locator();
}

void TriangleMesh::build_locator() {
  const double mean_area = total_area_ / double(tris_.size());
  cell_ = std::max(2.0 * std::sqrt(mean_area), 1e-12);
  nx_ = std::max(1, int(std::ceil(bbox_.width() / cell_)));
  ny_ = std::max(1, int(std::ceil(bbox_.height() / cell_)));
  cells_.assign(std::size_t(nx_) * ny_, {});
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& tri = tris_[t];
    const BBox b = polygon_bbox({nodes_[size_t(tri[0])], nodes_[size_t(tri[1])], nodes_[size_t(tri[2])]});
    const int i0 = std::clamp(int((b.xmin - bbox_.xmin) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(int((b.xmax - bbox_.xmin) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(int((b.ymin - bbox_.ymin) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(int((b.ymax - bbox_.ymin) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) cells_[std::size_t(j) * nx_ + i].push_back(int(t));
  }
}

double TriangleMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : tris_)
    for (int e = 0; e < 3; ++e)
      m = std::max(m, dist(nodes_[size_t(t[e])], nodes_[size_t(t[(e + 1) % 3])]));
  return m;
}

double TriangleMesh::min_angle_deg() const {
  double m = 180.0;
  for (const auto& t : tris_) {
    const Vec2 a = nodes_[size_t(t[0])], b = nodes_[size_t(t[1])], c = nodes_[size_t(t[2])];
    const double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
    auto ang = [](double opp, double s1, double s2) {
      return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0));
    };
    m = std::min({m, ang(la, lb, lc) * 180 / M_PI, ang(lb, la, lc) * 180 / M_PI,
                  ang(lc, la, lb) * 180 / M_PI});
  }
  return m;
}

std::array<double, 3> TriangleMesh::barycentric(int tri, Vec2 p) const {
  const auto& t = tris_[size_t(tri)];
  const Vec2 a = nodes_[size_t(t[0])], b = nodes_[size_t(t[1])], c = nodes_[size_t(t[2])];
  const double inv = 1.0 / (2.0 * area_[size_t(tri)]);
  return {cross(b - p, c - p) * inv, cross(c - p, a - p) * inv, cross(a - p, b - p) * inv};
}

int TriangleMesh::locate(Vec2 p, double tol) const {
  if (!bbox_.inflated(tol).contains(p)) return -1;
  const int ci = std::clamp(int((p.x - bbox_.xmin) / cell_), 0, nx_ - 1);
  const int cj = std::clamp(int((p.y - bbox_.ymin) / cell_), 0, ny_ - 1);
  int best_tol = -1;
  for (int ring = 0; ring < 2; ++ring) {
    for (int dj = -ring; dj <= ring; ++dj) {
      for (int di = -ring; di <= ring; ++di) {
        if (ring == 1 && std::abs(di) != 1 && std::abs(dj) != 1) continue;
        const int i = ci + di, j = cj + dj;
        if (i < 0 || i >= nx_ || j < 0 || j >= ny_) continue;
        for (const int t : cells_[std::size_t(j) * nx_ + i]) {
          const auto bc = barycentric(t, p);
          const double mn = std::min({bc[0], bc[1], bc[2]});
          if (mn >= 0.0) return t;
          // edge-scaled slack for boundary/edge points
          const double slack = tol / std::sqrt(area_[size_t(t)]);
          if (mn >= -slack && (best_tol < 0 || t < best_tol)) best_tol = t;
        }
      }
    }
    if (best_tol >= 0) break;
  }
  return best_tol;
}

double TriangleMesh::interpolate(std::span<const double> nodal, Vec2 p) const {
  const int t = locate(p);
  if (t < 0) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") is outside the mesh";
    throw NumericError(os.str());
  }
  const auto bc = barycentric(t, p);
  const auto& tri = tris_[size_t(t)];
  return bc[0] * nodal[size_t(tri[0])] + bc[1] * nodal[size_t(tri[1])] + bc[2] * nodal[size_t(tri[2])];
}

void validate_mesh(const TriangleMesh& mesh, const Window& w, double snap_tol,
                   double area_rel_tol) {
  const double warea = w.area();
  if (std::abs(mesh.total_area() - warea) > area_rel_tol * warea)
    throw InvalidGeometryError("mesh does not conserve the window area");

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles())
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) throw InvalidGeometryError("mesh edge shared by more than two triangles");
    if (count == 1) {
      const Vec2 a = mesh.nodes()[size_t(edge.first)];
      const Vec2 b = mesh.nodes()[size_t(edge.second)];
      const Vec2 m = 0.5 * (a + b);
      if (w.boundary_distance(a) > snap_tol || w.boundary_distance(b) > snap_tol ||
          w.boundary_distance(m) > snap_tol)
        throw InvalidGeometryError("mesh has a boundary edge away from the window boundary");
    }
  }
}

namespace {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "NODES " << mesh.node_count() << "\n";
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    os << (i + 1) << " " << format_double(mesh.nodes()[i].x) << " "
       << format_double(mesh.nodes()[i].y) << "\n";
  os << "TRIANGLES " << mesh.triangle_count() << "\n";
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    os << (t + 1) << " " << (tri[0] + 1) << " " << (tri[1] + 1) << " " << (tri[2] + 1) << "\n";
  }
  if (!os) throw Error("write failed: " + path);
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line()) parse_fail(path, lineno, "empty file");
  std::istringstream hs(line);
  std::string tag;
  std::size_t n = 0;
  if (!(hs >> tag >> n) || tag != "NODES") parse_fail(path, lineno, "expected 'NODES <n>'");
  if (n == 0) parse_fail(path, lineno, "empty NODES section");

  std::vector<Vec2> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line()) parse_fail(path, lineno, "unexpected end of NODES section");
    std::istringstream ls(line);
    std::size_t id;
    double x, y;
    if (!(ls >> id >> x >> y)) parse_fail(path, lineno, "malformed node line");
    if (id != i + 1) parse_fail(path, lineno, "node ids must be 1-based and contiguous");
    if (!std::isfinite(x) || !std::isfinite(y)) parse_fail(path, lineno, "non-finite coordinate");
    nodes[i] = {x, y};
  }

  if (!next_line()) parse_fail(path, lineno, "expected 'TRIANGLES <m>'");
  std::istringstream ts(line);
  std::size_t m = 0;
  if (!(ts >> tag >> m) || tag != "TRIANGLES") parse_fail(path, lineno, "expected 'TRIANGLES <m>'");
  if (m == 0) parse_fail(path, lineno, "empty TRIANGLES section");

  std::vector<std::array<int, 3>> tris(m);
  for (std::size_t t = 0; t < m; ++t) {
    if (!next_line()) parse_fail(path, lineno, "unexpected end of TRIANGLES section");
    std::istringstream ls(line);
    std::size_t id;
    long long a, b, c;
    if (!(ls >> id >> a >> b >> c)) parse_fail(path, lineno, "malformed triangle line");
    if (id != t + 1) parse_fail(path, lineno, "triangle ids must be 1-based and contiguous");
    for (const long long v : {a, b, c})
      if (v < 1 || v > (long long)n)
        parse_fail(path, lineno, "triangle references node " + std::to_string(v) +
                                     " outside 1.." + std::to_string(n));
    tris[t] = {int(a - 1), int(b - 1), int(c - 1)};
  }
  return TriangleMesh(std::move(nodes), std::move(tris));
}

}  // namespace locint
