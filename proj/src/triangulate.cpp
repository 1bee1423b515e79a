#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "locint/errors.hpp"
#include "locint/mesh.hpp"

namespace locint {
namespace {

using ld = long double;

ld orient_ld(Vec2 a, Vec2 b, Vec2 c) {
  return (ld(b.x) - a.x) * (ld(c.y) - a.y) - (ld(b.y) - a.y) * (ld(c.x) - a.x);
}

// > 0 when p lies strictly inside the circumcircle of CCW triangle abc.
ld incircle_ld(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  const ld ax = ld(a.x) - p.x, ay = ld(a.y) - p.y;
  const ld bx = ld(b.x) - p.x, by = ld(b.y) - p.y;
  const ld cx = ld(c.x) - p.x, cy = ld(c.y) - p.y;
  const ld a2 = ax * ax + ay * ay;
  const ld b2 = bx * bx + by * by;
  const ld c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const ld bx = ld(b.x) - a.x, by = ld(b.y) - a.y;
  const ld cx = ld(c.x) - a.x, cy = ld(c.y) - a.y;
  const ld d = 2 * (bx * cy - by * cx);
  const ld b2 = bx * bx + by * by;
  const ld c2 = cx * cx + cy * cy;
  const ld ux = (cy * b2 - by * c2) / d;
  const ld uy = (bx * c2 - cx * b2) / d;
  return {a.x + double(ux), a.y + double(uy)};
}

struct Cdt {
  struct Tri {
    std::array<int, 3> v;  // CCW
    std::array<int, 3> n;  // n[i] across edge opposite v[i]; -1 on hull
    bool alive = true;
  };

  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> v2t;                 // one alive triangle incident to vertex
  std::unordered_set<std::uint64_t> segs;  // constrained undirected edges
  double snap_tol = 1e-10;
  ld incircle_eps = 0;

  std::deque<std::pair<int, int>> seg_queue;
  std::deque<int> tri_queue;

  static std::uint64_t ekey(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
  }
  bool is_seg(int a, int b) const { return segs.count(ekey(a, b)) != 0; }

  void init_box(BBox box) {
    pts = {{box.xmin, box.ymin}, {box.xmax, box.ymin}, {box.xmax, box.ymax}, {box.xmin, box.ymax}};
    tris.push_back({{0, 1, 2}, {-1, 1, -1}, true});
    tris.push_back({{0, 2, 3}, {-1, -1, 0}, true});
    v2t = {0, 0, 0, 1};
    const double diag = std::hypot(box.width(), box.height());
    snap_tol = 1e-10 * std::max(1.0, diag);
    incircle_eps = ld(1e-20) * diag * diag * diag * diag;
  }

  int local_index(const Tri& t, int v) const {
    for (int i = 0; i < 3; ++i)
      if (t.v[i] == v) return i;
    return -1;
  }

  // Walking point location. Returns a triangle containing p (within
  // orientation noise); falls back to a linear scan on cycling.
  int locate(Vec2 p, int hint) const {
    int cur = hint;
    if (cur < 0 || !tris[size_t(cur)].alive)
      for (std::size_t i = 0; i < tris.size(); ++i)
        if (tris[i].alive) { cur = int(i); break; }
    std::size_t steps = 0;
    const std::size_t cap = tris.size() * 2 + 64;
    while (steps++ < cap) {
      const Tri& t = tris[size_t(cur)];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const Vec2 a = pts[size_t(t.v[(i + 1) % 3])];
        const Vec2 b = pts[size_t(t.v[(i + 2) % 3])];
        if (orient_ld(a, b, p) < 0) {
          next = t.n[size_t(i)];
          break;
        }
      }
      if (next == -1) return cur;
      cur = next;
    }
    for (std::size_t i = 0; i < tris.size(); ++i) {  // robust fallback
      if (!tris[i].alive) continue;
      const Tri& t = tris[i];
      bool in = true;
      for (int e = 0; e < 3 && in; ++e)
        if (orient_ld(pts[size_t(t.v[(e + 1) % 3])], pts[size_t(t.v[(e + 2) % 3])], p) < -1e-12) in = false;
      if (in) return int(i);
    }
    throw InvalidGeometryError("triangulation: point location failed");
  }

  // Straight-walk visibility: returns a constrained edge crossed between the
  // centroid of start and p, or {-1,-1} when the path is clear.
  std::pair<int, int> blocking_segment(int start, Vec2 p) const {
    const Tri& t0 = tris[size_t(start)];
    Vec2 from = {(pts[size_t(t0.v[0])].x + pts[size_t(t0.v[1])].x + pts[size_t(t0.v[2])].x) / 3,
                 (pts[size_t(t0.v[0])].y + pts[size_t(t0.v[1])].y + pts[size_t(t0.v[2])].y) / 3};
    int cur = start;
    std::size_t steps = 0;
    const std::size_t cap = tris.size() + 64;
    while (steps++ < cap) {
      const Tri& t = tris[size_t(cur)];
      int next = -1, va = -1, vb = -1;
      for (int i = 0; i < 3; ++i) {
        const int u = t.v[(i + 1) % 3], w = t.v[(i + 2) % 3];
        const Vec2 a = pts[size_t(u)], b = pts[size_t(w)];
        if (orient_ld(a, b, p) < 0 &&
            orient_ld(from, p, a) * orient_ld(from, p, b) <= 0) {
          next = t.n[size_t(i)];
          va = u;
          vb = w;
          break;
        }
      }
      if (next == -1) {
        // no crossing edge: either p reached or walk stalls; fall back to any
        // negative edge to keep moving
        for (int i = 0; i < 3 && next == -1; ++i) {
          const Vec2 a = pts[size_t(t.v[(i + 1) % 3])], b = pts[size_t(t.v[(i + 2) % 3])];
          if (orient_ld(a, b, p) < 0) {
            next = t.n[size_t(i)];
            va = t.v[(i + 1) % 3];
            vb = t.v[(i + 2) % 3];
          }
        }
        if (next == -1) return {-1, -1};
      }
      if (is_seg(va, vb)) return {va, vb};
      if (next < 0) return {-1, -1};
      cur = next;
    }
    return {-1, -1};
  }

  int nearest_vertex_of(int tri, Vec2 p) const {
    const Tri& t = tris[size_t(tri)];
    int best = -1;
    double bd = snap_tol;
    for (int i = 0; i < 3; ++i) {
      const double d = dist(pts[size_t(t.v[i])], p);
      if (d <= bd) {
        bd = d;
        best = t.v[i];
      }
    }
    return best;
  }

  // Bowyer-Watson insertion with constrained edges as cavity barriers.
  // force_pair seeds the cavity (used when splitting a segment whose
  // diametral triangles must both retriangulate). Returns the vertex id.
  int insert(Vec2 p, int hint, std::pair<int, int> force_tris = {-1, -1}) {
    const int t0 = force_tris.first >= 0 ? force_tris.first : locate(p, hint);
    if (const int ex = nearest_vertex_of(t0, p); ex >= 0) return ex;

    std::vector<int> cavity;
    std::unordered_set<int> in_cavity;
    std::vector<int> stack{t0};
    in_cavity.insert(t0);
    if (force_tris.second >= 0 && !in_cavity.count(force_tris.second)) {
      stack.push_back(force_tris.second);
      in_cavity.insert(force_tris.second);
    }
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      cavity.push_back(ti);
      const Tri t = tris[size_t(ti)];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[size_t(i)];
        if (nb < 0 || in_cavity.count(nb)) continue;
        const int u = t.v[(i + 1) % 3], w = t.v[(i + 2) % 3];
        if (is_seg(u, w)) continue;  // barrier
        const Tri& nt = tris[size_t(nb)];
        if (incircle_ld(pts[size_t(nt.v[0])], pts[size_t(nt.v[1])], pts[size_t(nt.v[2])], p) >
            incircle_eps) {
          in_cavity.insert(nb);
          stack.push_back(nb);
        }
      }
    }

    // boundary edges (u,w) in cavity-CCW order with their outside neighbor
    struct BEdge {
      int u, w, outside;
    };
    std::vector<BEdge> bedges;
    for (const int ti : cavity) {
      const Tri& t = tris[size_t(ti)];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[size_t(i)];
        if (nb >= 0 && in_cavity.count(nb)) continue;
        bedges.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], nb});
        if (is_seg(t.v[(i + 1) % 3], t.v[(i + 2) % 3]))
          seg_queue.emplace_back(t.v[(i + 1) % 3], t.v[(i + 2) % 3]);
      }
    }

    const int pid = int(pts.size());
    pts.push_back(p);
    v2t.push_back(-1);
    for (const int ti : cavity) tris[size_t(ti)].alive = false;

    std::unordered_map<int, int> fan_by_u;  // first vertex of boundary edge -> new tri
    std::vector<int> created;
    created.reserve(bedges.size());
    for (const BEdge& e : bedges) {
      const int id = int(tris.size());
      tris.push_back({{pid, e.u, e.w}, {e.outside, -1, -1}, true});
      if (e.outside >= 0) {
        Tri& ot = tris[size_t(e.outside)];
        for (int i = 0; i < 3; ++i)
          if (in_cavity.count(ot.n[size_t(i)]) || ot.n[size_t(i)] < 0) {
            const int ou = ot.v[(i + 1) % 3], ow = ot.v[(i + 2) % 3];
            if ((ou == e.w && ow == e.u) || (ou == e.u && ow == e.w)) ot.n[size_t(i)] = id;
          }
      }
      fan_by_u[e.u] = id;
      created.push_back(id);
      v2t[size_t(e.u)] = id;
      v2t[size_t(e.w)] = id;
    }
    for (const int id : created) {  // link fan neighbors: edge (pid, u) and (w, pid)
      Tri& t = tris[size_t(id)];
      const int u = t.v[1], w = t.v[2];
      t.n[1] = fan_by_u.count(w) ? fan_by_u[w] : -1;  // across edge (w, pid) -> tri starting at w
      // across edge (pid, u): the tri whose w == u
      // find via fan_by_u of predecessor: tri with boundary edge (x, u)
      // handled below by symmetric pass
      (void)u;
    }
    // second pass for n[2] (edge pid->u shared with triangle whose edge ends at u)
    std::unordered_map<int, int> fan_by_w;
    for (const int id : created) fan_by_w[tris[size_t(id)].v[2]] = id;
    for (const int id : created) {
      Tri& t = tris[size_t(id)];
      t.n[2] = fan_by_w.count(t.v[1]) ? fan_by_w[t.v[1]] : -1;
    }
    v2t[size_t(pid)] = created.empty() ? -1 : created.front();
    for (const int id : created) tri_queue.push_back(id);
    return pid;
  }

  // Find the alive triangle with directed edge (a,b); -1 if absent.
  int find_edge_tri(int a, int b) const {
    int start = v2t[size_t(a)];
    if (start < 0 || !tris[size_t(start)].alive) {
      for (std::size_t i = 0; i < tris.size(); ++i)
        if (tris[i].alive && local_index(tris[i], a) >= 0) { start = int(i); break; }
    }
    if (start < 0) return -1;
    // ring walk around a
    int cur = start;
    std::size_t guard = tris.size() + 8;
    // rotate in one direction until back or hit border, then other direction
    for (int pass = 0; pass < 2; ++pass) {
      cur = start;
      std::size_t g = guard;
      while (g--) {
        const Tri& t = tris[size_t(cur)];
        const int i = local_index(t, a);
        if (i < 0) break;
        if (t.v[(i + 1) % 3] == b || t.v[(i + 2) % 3] == b) {
          // ensure directed edge (a,b) belongs to this triangle
          for (int e = 0; e < 3; ++e)
            if (t.v[e] == a && t.v[(e + 1) % 3] == b) return cur;
          // otherwise the twin triangle holds the directed edge
          for (int e = 0; e < 3; ++e)
            if (t.v[e] == b && t.v[(e + 1) % 3] == a) {
              const int nb = t.n[(e + 2) % 3];
              return nb;
            }
        }
        const int next = pass == 0 ? t.n[size_t((i + 1) % 3)] : t.n[size_t((i + 2) % 3)];
        if (next < 0 || next == start) break;
        cur = next;
      }
    }
    // fallback linear scan
    for (std::size_t ti = 0; ti < tris.size(); ++ti) {
      if (!tris[ti].alive) continue;
      for (int e = 0; e < 3; ++e)
        if (tris[ti].v[e] == a && tris[ti].v[(e + 1) % 3] == b) return int(ti);
    }
    return -1;
  }

  // Both alive triangles adjacent to undirected edge (a,b).
  std::pair<int, int> edge_tris(int a, int b) const {
    const int t1 = find_edge_tri(a, b);
    const int t2 = find_edge_tri(b, a);
    return {t1, t2};
  }

  bool edge_exists(int a, int b) const { return find_edge_tri(a, b) >= 0 || find_edge_tri(b, a) >= 0; }

  void recover_segment(int a, int b, int depth = 0) {
    if (depth > 48) throw InvalidGeometryError("triangulation: segment recovery failed");
    if (edge_exists(a, b)) {
      segs.insert(ekey(a, b));
      seg_queue.emplace_back(a, b);
      return;
    }
    const Vec2 m = 0.5 * (pts[size_t(a)] + pts[size_t(b)]);
    const int mid = insert(m, v2t[size_t(a)]);
    if (mid == a || mid == b) throw InvalidGeometryError("triangulation: degenerate segment");
    recover_segment(a, mid, depth + 1);
    recover_segment(mid, b, depth + 1);
  }

  bool encroached(int a, int b) const {
    const Vec2 pa = pts[size_t(a)], pb = pts[size_t(b)];
    const Vec2 mid = 0.5 * (pa + pb);
    const double r2 = 0.25 * dot(pb - pa, pb - pa);
    auto apex_in = [&](int tri) {
      if (tri < 0) return false;
      const Tri& t = tris[size_t(tri)];
      for (int i = 0; i < 3; ++i) {
        const int v = t.v[i];
        if (v == a || v == b) continue;
        const Vec2 d = pts[size_t(v)] - mid;
        if (dot(d, d) < r2 * (1.0 - 1e-12)) return true;
      }
      return false;
    };
    const auto [t1, t2] = edge_tris(a, b);
    return apex_in(t1) || apex_in(t2);
  }

  bool point_encroaches(Vec2 p, int a, int b) const {
    const Vec2 pa = pts[size_t(a)], pb = pts[size_t(b)];
    const Vec2 mid = 0.5 * (pa + pb);
    const double r2 = 0.25 * dot(pb - pa, pb - pa);
    const Vec2 d = p - mid;
    return dot(d, d) < r2 * (1.0 - 1e-12);
  }

  void split_segment(int a, int b) {
    if (!segs.count(ekey(a, b))) return;
    segs.erase(ekey(a, b));
    const auto [t1, t2] = edge_tris(a, b);
    const Vec2 m = 0.5 * (pts[size_t(a)] + pts[size_t(b)]);
    const int mid = insert(m, t1 >= 0 ? t1 : v2t[size_t(a)], {t1, t2});
    if (mid == a || mid == b) {
      segs.insert(ekey(a, b));  // too short to split further
      return;
    }
    segs.insert(ekey(a, mid));
    segs.insert(ekey(mid, b));
    seg_queue.emplace_back(a, mid);
    seg_queue.emplace_back(mid, b);
  }
};

double tri_min_angle(Vec2 a, Vec2 b, Vec2 c) {
  const double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
  auto ang = [](double opp, double s1, double s2) {
    const double v = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
    return std::acos(v);
  };
  return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)}) * 180.0 / M_PI;
}

}  // namespace

TriangleMesh triangulate(const Window& w, double target_edge,
                         const std::vector<std::vector<Vec2>>& internal_segments,
                         double min_angle_deg) {
  if (!(target_edge > 0)) throw InvalidArgumentError("triangulate: target_edge must be > 0");
  const BBox wb = w.bbox();
  if (target_edge > std::max(wb.width(), wb.height()))
    throw InvalidArgumentError("triangulate: target_edge exceeds the window size");

  Cdt cdt;
  cdt.init_box(wb.inflated(4.0 * std::max(wb.width(), wb.height())));

  // collect constraint chains: boundary rings + internal polylines,
  // pre-split to edge lengths <= target_edge
  std::vector<std::vector<Vec2>> chains;
  auto add_ring = [&](const Polygon& ring) {
    std::vector<Vec2> c(ring.begin(), ring.end());
    c.push_back(ring.front());
    chains.push_back(std::move(c));
  };
  add_ring(w.outer());
  for (const Polygon& h : w.holes()) add_ring(h);
  for (const auto& s : internal_segments)
    if (s.size() >= 2) chains.push_back(s);

  std::vector<std::vector<int>> chain_ids;
  int hint = 0;
  for (const auto& chain : chains) {
    std::vector<int> ids;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const Vec2 a = chain[i], b = chain[i + 1];
      const double len = dist(a, b);
      const int parts = std::max(1, int(std::ceil(len / target_edge)));
      for (int k = (i == 0 ? 0 : 1); k < parts + 1; ++k) {
        const double t = double(k) / parts;
        const int id = cdt.insert(a + t * (b - a), hint);
        hint = cdt.v2t[size_t(id)];
        if (ids.empty() || ids.back() != id) ids.push_back(id);
      }
    }
    chain_ids.push_back(std::move(ids));
  }
  for (const auto& ids : chain_ids)
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) cdt.recover_segment(ids[i], ids[i + 1]);

  auto inside_domain = [&](const Cdt::Tri& t) {
    const Vec2 c = {(cdt.pts[size_t(t.v[0])].x + cdt.pts[size_t(t.v[1])].x + cdt.pts[size_t(t.v[2])].x) / 3,
                    (cdt.pts[size_t(t.v[0])].y + cdt.pts[size_t(t.v[1])].y + cdt.pts[size_t(t.v[2])].y) / 3};
    return w.contains(c);
  };

  cdt.tri_queue.clear();
  for (std::size_t i = 0; i < cdt.tris.size(); ++i)
    if (cdt.tris[i].alive) cdt.tri_queue.push_back(int(i));

  const double expected = w.area() / (0.433 * target_edge * target_edge);
  const std::size_t max_pts = std::size_t(64.0 * (expected + 64)) + 4096;

  std::size_t stall_guard = 0;
  while (!cdt.seg_queue.empty() || !cdt.tri_queue.empty()) {
    if (cdt.pts.size() > max_pts || ++stall_guard > 64 * max_pts)
      throw InvalidGeometryError("triangulate: refinement did not terminate (degenerate geometry?)");
    if (!cdt.seg_queue.empty()) {
      const auto [a, b] = cdt.seg_queue.front();
      cdt.seg_queue.pop_front();
      if (!cdt.segs.count(Cdt::ekey(a, b))) continue;
      if (cdt.encroached(a, b)) cdt.split_segment(a, b);
      continue;
    }
    const int ti = cdt.tri_queue.front();
    cdt.tri_queue.pop_front();
    if (!cdt.tris[size_t(ti)].alive) continue;
    const Cdt::Tri& t = cdt.tris[size_t(ti)];
    if (!inside_domain(t)) continue;
    const Vec2 a = cdt.pts[size_t(t.v[0])], b = cdt.pts[size_t(t.v[1])], c = cdt.pts[size_t(t.v[2])];
    const double longest = std::max({dist(a, b), dist(b, c), dist(c, a)});
    // size slack keeps the element count near the equilateral-tiling estimate
    // while staying within the 1.5 * target_edge contract
    const bool bad = longest > 1.25 * target_edge || tri_min_angle(a, b, c) < min_angle_deg;
    if (!bad) continue;

    const Vec2 cc = circumcenter(a, b, c);
    // segments diametrally encroached by the circumcenter get split instead
    bool deferred = false;
    std::vector<std::pair<int, int>> hit;
    for (const std::uint64_t key : cdt.segs) {
      const int sa = int(key >> 32), sb = int(key & 0xffffffffu);
      if (cdt.point_encroaches(cc, sa, sb)) hit.emplace_back(sa, sb);
    }
    if (!hit.empty()) {
      for (const auto& [sa, sb] : hit) cdt.split_segment(sa, sb);
      cdt.tri_queue.push_back(ti);
      deferred = true;
    } else if (const auto blk = cdt.blocking_segment(ti, cc); blk.first >= 0) {
      cdt.split_segment(blk.first, blk.second);
      cdt.tri_queue.push_back(ti);
      deferred = true;
    }
    if (deferred) continue;

    const int before = int(cdt.pts.size());
    const int vid = cdt.insert(cc, ti);
    if (vid < before) {
      // circumcenter snapped to an existing vertex: split the longest edge
      int ea = t.v[0], eb = t.v[1];
      double best = dist(a, b);
      if (dist(b, c) > best) { best = dist(b, c); ea = t.v[1]; eb = t.v[2]; }
      if (dist(c, a) > best) { ea = t.v[2]; eb = t.v[0]; }
      if (cdt.is_seg(ea, eb)) {
        cdt.split_segment(ea, eb);
      } else if (cdt.tris[size_t(ti)].alive) {
        cdt.insert(0.5 * (cdt.pts[size_t(ea)] + cdt.pts[size_t(eb)]), ti);
      }
    }
  }

  // extract inside triangles, renumber nodes by first use
  std::vector<int> remap(cdt.pts.size(), -1);
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> out_tris;
  for (const auto& t : cdt.tris) {
    if (!t.alive || !inside_domain(t)) continue;
    std::array<int, 3> tv{};
    for (int i = 0; i < 3; ++i) {
      const int v = t.v[i];
      if (remap[size_t(v)] < 0) {
        remap[size_t(v)] = int(nodes.size());
        nodes.push_back(cdt.pts[size_t(v)]);
      }
      tv[size_t(i)] = remap[size_t(v)];
    }
    out_tris.push_back(tv);
  }
  if (out_tris.empty()) throw InvalidGeometryError("triangulate: produced no triangles");

  TriangleMesh mesh(std::move(nodes), std::move(out_tris));
  validate_mesh(mesh, w);
  return mesh;
}

}  // namespace locint
