#include "locint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locint/errors.hpp"

namespace locint {

double polygon_signed_area(const Polygon& p) {
  double s = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    s += cross(a, b);
  }
  return 0.5 * s;
}

BBox polygon_bbox(const Polygon& p) {
  BBox b{p[0].x, p[0].y, p[0].x, p[0].y};
  for (const Vec2& v : p) {
    b.xmin = std::min(b.xmin, v.x);
    b.xmax = std::max(b.xmax, v.x);
    b.ymin = std::min(b.ymin, v.y);
    b.ymax = std::max(b.ymax, v.y);
  }
  return b;
}

namespace {

// Proper or improper intersection of open segments (a,b) and (c,d),
// excluding shared endpoints.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on = [](Vec2 p, Vec2 q, Vec2 r) {  // r collinear with pq and strictly between
    if (cross(q - p, r - p) != 0.0) return false;
    const double t = dot(r - p, q - p);
    return t > 0.0 && t < dot(q - p, q - p);
  };
  return (d1 == 0 && on(a, b, c)) || (d2 == 0 && on(a, b, d)) ||
         (d3 == 0 && on(c, d, a)) || (d4 == 0 && on(c, d, b));
}

}  // namespace

bool polygon_is_simple(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent
      if (segments_cross(a, b, p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return dist(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + t * ab);
}

double polygon_boundary_distance(Vec2 p, const Polygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    d = std::min(d, point_segment_distance(p, poly[j], poly[i]));
  return d;
}

std::vector<std::array<Vec2, 3>> earclip(const Polygon& ccw) {
  if (ccw.size() < 3) throw InvalidGeometryError("polygon with fewer than 3 vertices");
  std::vector<Vec2> v = ccw;
  std::vector<std::array<Vec2, 3>> out;
  out.reserve(v.size() - 2);

  auto tri_area2 = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
  // blocks an ear when p is strictly inside it, or sits on the ear's
  // diagonal (c,a) strictly between its endpoints
  auto blocks_ear = [&](Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    const double s1 = tri_area2(a, b, p);
    const double s2 = tri_area2(b, c, p);
    const double s3 = tri_area2(c, a, p);
    if (s1 > 0 && s2 > 0 && s3 > 0) return true;
    const double scale = dist(c, a);
    if (std::abs(s3) <= 1e-14 * scale * scale) {
      const double t = dot(p - c, a - c);
      if (t > 0 && t < dot(a - c, a - c)) return true;
    }
    return false;
  };

  std::size_t guard = v.size() * v.size() + 16;
  std::size_t i = 0;
  while (v.size() > 3) {
    if (guard-- == 0) throw InvalidGeometryError("ear clipping failed (non-simple polygon?)");
    const std::size_t n = v.size();
    const Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
    const double area2 = tri_area2(a, b, c);
    bool ear = area2 > 0.0;
    if (ear) {
      for (std::size_t k = 0; k < n && ear; ++k) {
        if (k == i || k == (i + n - 1) % n || k == (i + 1) % n) continue;
        if (blocks_ear(a, b, c, v[k])) ear = false;
      }
    }
    if (ear || area2 == 0.0) {  // clip degenerate (collinear) corners silently
      if (area2 > 0.0) out.push_back({a, b, c});
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
      i = i % v.size();
    } else {
      i = (i + 1) % n;
    }
  }
  if (tri_area2(v[0], v[1], v[2]) > 0.0) out.push_back({v[0], v[1], v[2]});
  return out;
}

Window::Window(Polygon outer, std::vector<Polygon> holes)
    : outer_(std::move(outer)), holes_(std::move(holes)) {
  if (outer_.size() < 3) throw InvalidGeometryError("window outer boundary needs >= 3 vertices");
  if (!polygon_is_simple(outer_)) throw InvalidGeometryError("window outer boundary is self-intersecting");
  double a_out = polygon_signed_area(outer_);
  if (a_out < 0) {
    std::reverse(outer_.begin(), outer_.end());
    a_out = -a_out;
  }
  if (a_out <= 0.0) throw InvalidGeometryError("window outer boundary has zero area");

  double a_holes = 0.0;
  for (Polygon& h : holes_) {
    if (h.size() < 3) throw InvalidGeometryError("hole needs >= 3 vertices");
    if (!polygon_is_simple(h)) throw InvalidGeometryError("hole boundary is self-intersecting");
    double ah = polygon_signed_area(h);
    if (ah > 0) std::reverse(h.begin(), h.end());  // store holes CW
    ah = std::abs(ah);
    if (ah <= 0.0) throw InvalidGeometryError("hole has zero area");
    a_holes += ah;
    for (const Vec2& p : h)
      if (!point_in_polygon(p, outer_))
        throw InvalidGeometryError("hole vertex outside the outer boundary");
    const std::size_t n = h.size(), m = outer_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (segments_cross(h[i], h[(i + 1) % n], outer_[j], outer_[(j + 1) % m]))
          throw InvalidGeometryError("hole crosses the outer boundary");
  }
  for (std::size_t i = 0; i < holes_.size(); ++i)
    for (std::size_t j = i + 1; j < holes_.size(); ++j) {
      const Polygon& h1 = holes_[i];
      const Polygon& h2 = holes_[j];
      if (point_in_polygon(h2[0], h1) || point_in_polygon(h1[0], h2))
        throw InvalidGeometryError("holes overlap");
      for (std::size_t a = 0; a < h1.size(); ++a)
        for (std::size_t b = 0; b < h2.size(); ++b)
          if (segments_cross(h1[a], h1[(a + 1) % h1.size()], h2[b], h2[(b + 1) % h2.size()]))
            throw InvalidGeometryError("holes overlap");
    }

  area_ = a_out - a_holes;
  if (area_ <= 0.0) throw InvalidGeometryError("window has non-positive area");
  bbox_ = polygon_bbox(outer_);
}

Window Window::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) throw InvalidGeometryError("degenerate rectangle");
  return Window(Polygon{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

bool Window::contains(Vec2 p) const {
  if (!bbox_.inflated(kBoundaryTol).contains(p)) return false;
  if (boundary_distance(p) <= kBoundaryTol) return true;
  bool inside = point_in_polygon(p, outer_);
  if (!inside) return false;
  for (const Polygon& h : holes_)
    if (point_in_polygon(p, h)) return false;
  return true;
}

double Window::boundary_distance(Vec2 p) const {
  double d = polygon_boundary_distance(p, outer_);
  for (const Polygon& h : holes_) d = std::min(d, polygon_boundary_distance(p, h));
  return d;
}

double Window::outer_boundary_distance(Vec2 p) const {
  return polygon_boundary_distance(p, outer_);
}

const std::vector<SignedTriangle>& Window::decomposition() const {
  if (decomp_.empty()) {
    for (const auto& t : earclip(outer_)) decomp_.push_back({t[0], t[1], t[2], +1.0});
    for (const Polygon& h : holes_) {
      Polygon r(h.rbegin(), h.rend());  // holes are CW; earclip wants CCW
      for (const auto& t : earclip(r)) decomp_.push_back({t[0], t[1], t[2], -1.0});
    }
  }
  return decomp_;
}

bool Window::operator==(const Window& o) const {
  return outer_ == o.outer_ && holes_ == o.holes_;
}

namespace {

bool is_axis_aligned_rect(const Polygon& p) {
  if (p.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % 4];
    if (a.x != b.x && a.y != b.y) return false;
  }
  return true;
}

}  // namespace

Window border_region(const Window& w, double r, int arc_segments) {
  if (!(r > 0.0)) throw InvalidArgumentError("border_region: thickness must be > 0");
  const Polygon& outer = w.outer();
  Polygon dilated;
  if (is_axis_aligned_rect(outer)) {
    const BBox b = polygon_bbox(outer).inflated(r);
    dilated = {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
  } else {
    const std::size_t n = outer.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = outer[(i + n - 1) % n];
      const Vec2 cur = outer[i];
      const Vec2 next = outer[(i + 1) % n];
      Vec2 din = cur - prev, dout = next - cur;
      const double lin = norm(din), lout = norm(dout);
      if (lin == 0 || lout == 0) continue;
      din = (1.0 / lin) * din;
      dout = (1.0 / lout) * dout;
      const Vec2 nin{din.y, -din.x};    // outward normal for a CCW loop
      const Vec2 nout{dout.y, -dout.x};
      const double turn = cross(din, dout);
      if (turn > 0) {  // convex corner: arc from nin to nout, counterclockwise
        const double a0 = std::atan2(nin.y, nin.x);
        double dtheta = std::atan2(cross(nin, nout), dot(nin, nout));
        if (dtheta < 0) dtheta += 2 * M_PI;
        const int segs = std::max(1, static_cast<int>(std::ceil(arc_segments * dtheta / (M_PI / 2))));
        for (int k = 0; k <= segs; ++k) {
          const double a = a0 + dtheta * k / segs;
          dilated.push_back(cur + Vec2{r * std::cos(a), r * std::sin(a)});
        }
      } else {  // reflex (from outside) corner: miter at offset-line intersection
        const Vec2 p1 = cur + r * nin;
        const Vec2 p2 = cur + r * nout;
        const double denom = cross(din, dout);
        if (std::abs(denom) < 1e-14) {
          dilated.push_back(p1);
        } else {
          const double t = cross(p2 - p1, dout) / denom;
          dilated.push_back(p1 + t * din);
        }
      }
    }
    Polygon dedup;
    for (const Vec2& p : dilated)
      if (dedup.empty() || dist(dedup.back(), p) > 1e-14) dedup.push_back(p);
    if (dedup.size() > 1 && dist(dedup.front(), dedup.back()) <= 1e-14) dedup.pop_back();
    dilated.swap(dedup);
    if (!polygon_is_simple(dilated))
      throw InvalidGeometryError("border_region: offset boundary self-intersects (thickness too large)");
  }
  return Window(dilated, {outer});
}

bool GeometrySet::empty() const { return points.empty() && polylines.empty(); }

double distance_to_set(Vec2 p, const GeometrySet& s) {
  if (s.empty()) throw InvalidArgumentError("distance_to_set: empty set");
  double d = std::numeric_limits<double>::infinity();
  for (const Vec2& q : s.points) d = std::min(d, dist(p, q));
  for (const auto& line : s.polylines) {
    if (line.size() == 1) d = std::min(d, dist(p, line[0]));
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
      d = std::min(d, point_segment_distance(p, line[i], line[i + 1]));
  }
  return d;
}

Polygon clip_halfplane(const Polygon& subject, Vec2 a, Vec2 b) {
  Polygon out;
  const std::size_t n = subject.size();
  if (n == 0) return out;
  const Vec2 d = b - a;
  auto side = [&](Vec2 p) { return cross(d, p - a); };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 cur = subject[i];
    const Vec2 nxt = subject[(i + 1) % n];
    const double sc = side(cur), sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i)
    out = clip_halfplane(out, clip[i], clip[(i + 1) % n]);
  return out;
}

double set_covariance(const Window& w, Vec2 v) {
  const auto& dec = w.decomposition();
  double area = 0.0;
  for (const SignedTriangle& s : dec) {
    const BBox bs = polygon_bbox({s.a, s.b, s.c});
    for (const SignedTriangle& t : dec) {
      const Polygon shifted{t.a + v, t.b + v, t.c + v};
      const BBox bt = polygon_bbox(shifted);
      if (bt.xmin > bs.xmax || bt.xmax < bs.xmin || bt.ymin > bs.ymax || bt.ymax < bs.ymin)
        continue;
      const Polygon inter = clip_convex({s.a, s.b, s.c}, shifted);
      if (inter.size() >= 3) area += s.sign * t.sign * polygon_signed_area(inter);
    }
  }
  return std::max(0.0, area);
}

double windows_intersection_area(const Window& a, const Window& b) {
  double area = 0.0;
  for (const SignedTriangle& s : a.decomposition()) {
    const BBox bs = polygon_bbox({s.a, s.b, s.c});
    for (const SignedTriangle& t : b.decomposition()) {
      const BBox bt = polygon_bbox({t.a, t.b, t.c});
      if (bt.xmin > bs.xmax || bt.xmax < bs.xmin || bt.ymin > bs.ymax || bt.ymax < bs.ymin)
        continue;
      const Polygon inter = clip_convex({s.a, s.b, s.c}, {t.a, t.b, t.c});
      if (inter.size() >= 3) area += s.sign * t.sign * polygon_signed_area(inter);
    }
  }
  return std::max(0.0, area);
}

SetCovarianceTable::SetCovarianceTable(const Window& w, double rmax, int n_per_axis)
    : rmax_(rmax), n_(n_per_axis) {
  if (!(rmax > 0) || n_per_axis < 3) throw InvalidArgumentError("SetCovarianceTable: bad grid");
  step_ = 2.0 * rmax_ / (n_ - 1);
  values_.resize(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      values_[static_cast<std::size_t>(i) * n_ + j] =
          set_covariance(w, {-rmax_ + j * step_, -rmax_ + i * step_});
}

double SetCovarianceTable::operator()(Vec2 v) const {
  const double fx = (v.x + rmax_) / step_;
  const double fy = (v.y + rmax_) / step_;
  const int j = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
  const int i = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
  const double tx = std::clamp(fx - j, 0.0, 1.0);
  const double ty = std::clamp(fy - i, 0.0, 1.0);
  auto at = [&](int r, int c) { return values_[static_cast<std::size_t>(r) * n_ + c]; };
  return (1 - ty) * ((1 - tx) * at(i, j) + tx * at(i, j + 1)) +
         ty * ((1 - tx) * at(i + 1, j) + tx * at(i + 1, j + 1));
}

Polygon disc_polygon(Vec2 c, double r, int segments) {
  Polygon p;
  p.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double a = 2 * M_PI * k / segments;
    p.push_back(c + Vec2{r * std::cos(a), r * std::sin(a)});
  }
  return p;
}

namespace {

void fan_quadrature(const Polygon& piece, double sign, const TriangleRule& rule, double max_edge,
                    std::vector<WeightedPoint>& out) {
  if (piece.size() < 3) return;
  // fan-triangulate, then uniform refinement until edges below max_edge
  std::vector<std::array<Vec2, 3>> tris;
  for (std::size_t i = 1; i + 1 < piece.size(); ++i)
    tris.push_back({piece[0], piece[i], piece[i + 1]});
  if (max_edge > 0) {
    std::vector<std::array<Vec2, 3>> work;
    while (!tris.empty()) {
      const auto t = tris.back();
      tris.pop_back();
      const double e = std::max({dist(t[0], t[1]), dist(t[1], t[2]), dist(t[2], t[0])});
      if (e > max_edge) {
        const Vec2 m01 = 0.5 * (t[0] + t[1]);
        const Vec2 m12 = 0.5 * (t[1] + t[2]);
        const Vec2 m20 = 0.5 * (t[2] + t[0]);
        tris.push_back({t[0], m01, m20});
        tris.push_back({m01, t[1], m12});
        tris.push_back({m20, m12, t[2]});
        tris.push_back({m01, m12, m20});
      } else {
        work.push_back(t);
      }
    }
    tris.swap(work);
  }
  for (const auto& t : tris) {
    const double a = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    if (a == 0.0) continue;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& b = rule.points[q];
      out.push_back({{b[0] * t[0].x + b[1] * t[1].x + b[2] * t[2].x,
                      b[0] * t[0].y + b[1] * t[1].y + b[2] * t[2].y},
                     sign * a * rule.weights[q]});
    }
  }
}

}  // namespace

std::vector<WeightedPoint> region_window_quadrature(const Polygon& region, const Window& w,
                                                    const TriangleRule& rule, double max_edge,
                                                    const std::vector<double>& split_x) {
  std::vector<WeightedPoint> out;
  const BBox rb = polygon_bbox(region);
  for (const SignedTriangle& t : w.decomposition()) {
    const BBox tb = polygon_bbox({t.a, t.b, t.c});
    if (tb.xmin > rb.xmax || tb.xmax < rb.xmin || tb.ymin > rb.ymax || tb.ymax < rb.ymin) continue;
    Polygon piece = clip_convex(region, {t.a, t.b, t.c});
    if (piece.size() < 3) continue;
    std::vector<Polygon> parts{std::move(piece)};
    for (double sx : split_x) {
      std::vector<Polygon> next;
      for (const Polygon& p : parts) {
        Polygon lo = clip_halfplane(p, {sx, 0.0}, {sx, 1.0});   // x <= sx
        Polygon hi = clip_halfplane(p, {sx, 0.0}, {sx, -1.0});  // x >= sx
        if (lo.size() >= 3) next.push_back(std::move(lo));
        if (hi.size() >= 3) next.push_back(std::move(hi));
      }
      parts.swap(next);
    }
    for (const Polygon& p : parts) fan_quadrature(p, t.sign, rule, max_edge, out);
  }
  return out;
}

double region_window_area(const Polygon& region, const Window& w) {
  double area = 0.0;
  const BBox rb = polygon_bbox(region);
  for (const SignedTriangle& t : w.decomposition()) {
    const BBox tb = polygon_bbox({t.a, t.b, t.c});
    if (tb.xmin > rb.xmax || tb.xmax < rb.xmin || tb.ymin > rb.ymax || tb.ymax < rb.ymin) continue;
    const Polygon piece = clip_convex(region, {t.a, t.b, t.c});
    if (piece.size() >= 3) area += t.sign * polygon_signed_area(piece);
  }
  return area;
}

}  // namespace locint
