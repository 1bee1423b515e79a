#pragma once

#include <string>
#include <vector>

#include "locint/geometry.hpp"

namespace locint {

// A simple point pattern clipped to its carrying window. Points are distinct
// (exact coordinate equality) and all inside the window.
class PointPattern {
 public:
  PointPattern(std::vector<Vec2> points, Window window);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec2>& points() const { return points_; }
  const Window& window() const { return window_; }

 private:
  std::vector<Vec2> points_;
  Window window_;
};

// Points of the pattern inside sub, re-carried by sub. sub must be
// geometrically contained in the pattern's window.
PointPattern restrict(const PointPattern& pattern, const Window& sub);

// CSV with header "x,y". The reader rejects NaN/Inf coordinates, and points
// outside the window unless clip_outside is set (then they are dropped).
void save_pattern_csv(const PointPattern& pattern, const std::string& path);
PointPattern load_pattern_csv(const std::string& path, Window window, bool clip_outside = false);

// Uniform spatial hash over the pattern for radius queries.
class PointGrid {
 public:
  PointGrid(const std::vector<Vec2>& pts, double cell);
  // indices of stored points within radius r of p
  void within(Vec2 p, double r, std::vector<int>& out) const;
  int count_within(Vec2 p, double r) const;

 private:
  double cell_;
  double x0_ = 0, y0_ = 0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> cells_;
  const std::vector<Vec2>* pts_ = nullptr;
  std::vector<Vec2> own_;
};

}  // namespace locint
