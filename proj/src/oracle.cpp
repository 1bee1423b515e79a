#include "locint/oracle.hpp"

#include <cmath>
#include <iostream>

#include "locint/errors.hpp"
#include "locint/mesh.hpp"
#include "locint/parallel.hpp"
#include "locint/quadrature.hpp"

namespace locint {

MaternOracle::MaternOracle(MaternOracleParams params, Window observation, Options opts)
    : params_(std::move(params)), obs_(std::move(observation)),
      border_(border_region(obs_, opts.border_thickness > 0 ? opts.border_thickness
                                                            : params_.cluster_radius)),
      opts_(opts),
      border_thickness_(opts.border_thickness > 0 ? opts.border_thickness : params_.cluster_radius) {
  if (!(params_.kappa >= 0) || !(params_.mu >= 0) || !(params_.cluster_radius > 0))
    throw InvalidModelError("oracle: invalid Matern parameters");
}

double MaternOracle::pint_at(Vec2 y) const {
  const double r = params_.cluster_radius;
  const Polygon disc = disc_polygon(y, r, opts_.disc_segments);
  const auto nodes = region_window_quadrature(disc, obs_, TriangleRule::of_order(opts_.quad_order),
                                              0.0, params_.p.split_lines_x());
  double s = 0.0;
  for (const auto& n : nodes) s += n.w * params_.p(n.p);
  return std::max(0.0, s);
}

double MaternOracle::parent_intensity(Vec2 y, const PointGrid& observed) const {
  const double r = params_.cluster_radius;
  const double pir2 = M_PI * r * r;
  const int count = observed.count_within(y, r);
  double first = 0.0;
  if (count > 0) {
    const double py = params_.p(y);
    if (py <= 0.0) return std::numeric_limits<double>::infinity();
    first = double(count) / (params_.mu * py * pir2);
  }
  const double second = params_.kappa * std::exp(-(params_.mu / pir2) * pint_at(y));
  return first + second;
}

MaternOracle::TargetCache MaternOracle::prepare_target(Vec2 x_o) const {
  const double r = params_.cluster_radius;
  TargetCache cache;
  cache.x_o = x_o;
  cache.p_xo = params_.p(x_o);
  const Polygon disc = disc_polygon(x_o, r, opts_.disc_segments);
  cache.area_total = polygon_signed_area(disc);

  const auto& rule = TriangleRule::of_order(opts_.quad_order);
  const double max_edge = r / opts_.sub_edge_factor;
  const auto& splits = params_.p.split_lines_x();
  for (const Window* region : {&obs_, &border_}) {
    const auto nodes = region_window_quadrature(disc, *region, rule, max_edge, splits);
    for (const auto& n : nodes) {
      cache.area_inside += n.w;
      cache.nodes.push_back({n.p, n.w, params_.p(n.p), pint_at(n.p)});
    }
  }
  return cache;
}

double MaternOracle::local_intensity(const TargetCache& cache, const PointGrid& observed) const {
  const double r = params_.cluster_radius;
  const double pir2 = M_PI * r * r;
  const double mu = params_.mu, kappa = params_.kappa;
  double integral = 0.0;
  for (const auto& n : cache.nodes) {
    const int count = observed.count_within(n.y, r);
    double lamp;
    if (count > 0 && n.p_y <= 0.0) {
      skipped_.fetch_add(1, std::memory_order_relaxed);
      continue;  // flagged +inf node: measure-zero under the study thinnings
    }
    lamp = (count > 0 ? double(count) / (mu * n.p_y * pir2) : 0.0) +
           kappa * std::exp(-(mu / pir2) * n.pint);
    integral += n.w * lamp;
  }
  const double unobs = std::max(0.0, cache.area_total - cache.area_inside);
  if (opts_.corrected_normalization)
    return mu * cache.p_xo / cache.area_total * (integral + kappa * unobs);
  return mu * cache.p_xo / cache.area_total * integral + kappa * mu * cache.p_xo * unobs;
}

double MaternOracle::local_intensity(Vec2 x_o, const PointPattern& observed) const {
  const PointGrid grid = make_point_grid(observed);
  return local_intensity(prepare_target(x_o), grid);
}

PredictionGrid MaternOracle::grid(const PointPattern& observed, const std::vector<Vec2>& targets,
                                  int threads) const {
  PredictionGrid out;
  out.targets = targets;
  out.values.assign(targets.size(), 0.0);
  out.failed.assign(targets.size(), 0);
  out.reasons.assign(targets.size(), "");
  const PointGrid pgrid = make_point_grid(observed);
  parallel_chunks(targets.size(), threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        out.values[i] = local_intensity(prepare_target(targets[i]), pgrid);
      } catch (const Error& err) {
        out.failed[i] = 1;
        out.reasons[i] = err.what();
      }
    }
  });
  return out;
}

OracleIntegrator::OracleIntegrator(const MaternOracle& oracle, const Window& region,
                                   double target_edge, int quad_order)
    : oracle_(oracle) {
  const TriangleMesh mesh = triangulate(region, target_edge);
  const auto& rule = TriangleRule::of_order(quad_order);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Vec2 a = mesh.nodes()[size_t(tri[0])], b = mesh.nodes()[size_t(tri[1])],
               c = mesh.nodes()[size_t(tri[2])];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& bc = rule.points[q];
      const Vec2 p{bc[0] * a.x + bc[1] * b.x + bc[2] * c.x,
                   bc[0] * a.y + bc[1] * b.y + bc[2] * c.y};
      caches_.push_back(oracle_.prepare_target(p));
      weights_.push_back(mesh.triangle_area(t) * rule.weights[q]);
    }
  }
}

double OracleIntegrator::integrate(const PointPattern& observed) const {
  const PointGrid grid = oracle_.make_point_grid(observed);
  double s = 0.0;
  for (std::size_t i = 0; i < caches_.size(); ++i)
    s += weights_[i] * oracle_.local_intensity(caches_[i], grid);
  return s;
}

}  // namespace locint
