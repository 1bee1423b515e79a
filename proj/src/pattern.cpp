#include "locint/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "locint/errors.hpp"

namespace locint {

PointPattern::PointPattern(std::vector<Vec2> points, Window window)
    : points_(std::move(points)), window_(std::move(window)) {
  for (const Vec2& p : points_)
    if (!window_.contains(p)) {
      std::ostringstream os;
      os << "pattern point (" << p.x << ", " << p.y << ") lies outside its window";
      throw InvalidArgumentError(os.str());
    }
  std::vector<Vec2> sorted = points_;
  std::sort(sorted.begin(), sorted.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      throw InvalidArgumentError("pattern contains duplicate points (process must be simple)");
}

PointPattern restrict(const PointPattern& pattern, const Window& sub) {
  const Window& w = pattern.window();
  auto inside = [&](const Polygon& poly) {
    for (const Vec2& p : poly)
      if (!w.contains(p)) return false;
    return true;
  };
  if (!inside(sub.outer()))
    throw InvalidArgumentError("restrict: sub-window is not contained in the pattern window");
  std::vector<Vec2> kept;
  for (const Vec2& p : pattern.points())
    if (sub.contains(p)) kept.push_back(p);
  return PointPattern(std::move(kept), sub);
}

namespace {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void save_pattern_csv(const PointPattern& pattern, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "x,y\n";
  for (const Vec2& p : pattern.points())
    os << format_double(p.x) << "," << format_double(p.y) << "\n";
  if (!os) throw Error("write failed: " + path);
}

PointPattern load_pattern_csv(const std::string& path, Window window, bool clip_outside) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError(path + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y") throw ParseError(path + ":1: expected header 'x,y'");

  std::vector<Vec2> pts;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'x,y'");
    double x = 0, y = 0;
    try {
      x = std::stod(line.substr(0, comma));
      y = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (!std::isfinite(x) || !std::isfinite(y))
      throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite coordinate");
    if (!window.contains({x, y})) {
      if (clip_outside) continue;
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": point outside the window (use clipping to drop such points)");
    }
    pts.push_back({x, y});
  }
  return PointPattern(std::move(pts), std::move(window));
}

PointGrid::PointGrid(const std::vector<Vec2>& pts, double cell) : cell_(std::max(cell, 1e-12)) {
  own_ = pts;
  pts_ = &own_;
  if (pts.empty()) {
    nx_ = ny_ = 1;
    cells_.assign(1, {});
    return;
  }
  const BBox b = polygon_bbox(pts);
  x0_ = b.xmin;
  y0_ = b.ymin;
  nx_ = std::max(1, int(std::floor(b.width() / cell_)) + 1);
  ny_ = std::max(1, int(std::floor(b.height() / cell_)) + 1);
  cells_.assign(std::size_t(nx_) * ny_, {});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int cx = std::clamp(int((pts[i].x - x0_) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(int((pts[i].y - y0_) / cell_), 0, ny_ - 1);
    cells_[std::size_t(cy) * nx_ + cx].push_back(int(i));
  }
}

void PointGrid::within(Vec2 p, double r, std::vector<int>& out) const {
  out.clear();
  const auto& pts = *pts_;
  const int cx0 = std::clamp(int(std::floor((p.x - r - x0_) / cell_)), 0, nx_ - 1);
  const int cx1 = std::clamp(int(std::floor((p.x + r - x0_) / cell_)), 0, nx_ - 1);
  const int cy0 = std::clamp(int(std::floor((p.y - r - y0_) / cell_)), 0, ny_ - 1);
  const int cy1 = std::clamp(int(std::floor((p.y + r - y0_) / cell_)), 0, ny_ - 1);
  const double r2 = r * r;
  for (int cy = cy0; cy <= cy1; ++cy)
    for (int cx = cx0; cx <= cx1; ++cx)
      for (const int i : cells_[std::size_t(cy) * nx_ + cx]) {
        const Vec2 d = pts[std::size_t(i)] - p;
        if (dot(d, d) <= r2) out.push_back(i);
      }
}

int PointGrid::count_within(Vec2 p, double r) const {
  const auto& pts = *pts_;
  const int cx0 = std::clamp(int(std::floor((p.x - r - x0_) / cell_)), 0, nx_ - 1);
  const int cx1 = std::clamp(int(std::floor((p.x + r - x0_) / cell_)), 0, nx_ - 1);
  const int cy0 = std::clamp(int(std::floor((p.y - r - y0_) / cell_)), 0, ny_ - 1);
  const int cy1 = std::clamp(int(std::floor((p.y + r - y0_) / cell_)), 0, ny_ - 1);
  const double r2 = r * r;
  int n = 0;
  for (int cy = cy0; cy <= cy1; ++cy)
    for (int cx = cx0; cx <= cx1; ++cx)
      for (const int i : cells_[std::size_t(cy) * nx_ + cx]) {
        const Vec2 d = pts[std::size_t(i)] - p;
        if (dot(d, d) <= r2) ++n;
      }
  return n;
}

}  // namespace locint
