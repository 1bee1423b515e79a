#include "locint/fredholm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "locint/errors.hpp"
#include "locint/fem.hpp"
#include "locint/parallel.hpp"
#include "locint/quadrature.hpp"

namespace locint {

namespace {

using QNode = FredholmMoments::QNode;

constexpr double kResidualFloor = 1e-12;

double checked(double v, Vec2 at, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << " is not finite at (" << at.x << ", " << at.y << ")";
    throw NumericError(os.str());
  }
  return v;
}

}  // namespace

FredholmMoments::FredholmMoments(std::shared_ptr<const TriangleMesh> mesh, IntensityModel lambda,
                                 PairCorrelationModel g, int single_order, int pair_order,
                                 Normalization norm)
    : mesh_(std::move(mesh)), lambda_(std::move(lambda)), g_(std::move(g)), norm_(norm),
      single_order_(single_order), pair_order_(pair_order) {
  const TriangleMesh& m = *mesh_;
  area_ = m.total_area();
  const auto& srule = TriangleRule::of_order(single_order_);
  const auto& prule = TriangleRule::of_order(pair_order_);
  znodes_.reserve(m.triangle_count() * srule.size());
  ynodes_.reserve(m.triangle_count() * prule.size());
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles()[t];
    const Vec2 a = m.nodes()[size_t(tri[0])], b = m.nodes()[size_t(tri[1])],
               c = m.nodes()[size_t(tri[2])];
    const double area = m.triangle_area(t);
    for (const auto* rule : {&srule, &prule}) {
      auto& nodes = rule == &srule ? znodes_ : ynodes_;
      for (std::size_t qi = 0; qi < rule->size(); ++qi) {
        const auto& bc = rule->points[qi];
        QNode n;
        n.p = {bc[0] * a.x + bc[1] * b.x + bc[2] * c.x, bc[0] * a.y + bc[1] * b.y + bc[2] * c.y};
        n.w = area * rule->weights[qi];
        n.lam = checked(lambda_(n.p), n.p, "intensity");
        if (n.lam < 0) throw InvalidModelError("intensity is negative at a quadrature point");
        n.bary = bc;
        nodes.push_back(n);
      }
    }
  }
  for (const QNode& n : znodes_) lambda_int_ += n.w * n.lam;
  if (!(lambda_int_ > 0) && norm_ == Normalization::appendix)
    throw InvalidModelError("intensity integrates to zero; appendix normalization undefined");

  // centroid grid for support queries
  const BBox bb = m.bbox();
  gbox_ = bb;
  const double mean_edge = std::sqrt(4.0 * (area_ / double(m.triangle_count())) / std::sqrt(3.0));
  cell_ = std::max(2.0 * mean_edge, 1e-9);
  gnx_ = std::max(1, int(std::ceil(bb.width() / cell_)));
  gny_ = std::max(1, int(std::ceil(bb.height() / cell_)));
  gcells_.assign(std::size_t(gnx_) * gny_, {});
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles()[t];
    const Vec2 a = m.nodes()[size_t(tri[0])], b = m.nodes()[size_t(tri[1])],
               c = m.nodes()[size_t(tri[2])];
    const Vec2 cen{(a.x + b.x + c.x) / 3, (a.y + b.y + c.y) / 3};
    max_reach_ = std::max({max_reach_, dist(cen, a), dist(cen, b), dist(cen, c)});
    const int gi = std::clamp(int((cen.x - gbox_.xmin) / cell_), 0, gnx_ - 1);
    const int gj = std::clamp(int((cen.y - gbox_.ymin) / cell_), 0, gny_ - 1);
    gcells_[std::size_t(gj) * gnx_ + gi].push_back(int(t));
  }
}

bool FredholmMoments::local_support() const {
  return std::isfinite(g_.support_radius());
}

void FredholmMoments::triangles_near(Vec2 p, double radius, std::vector<int>& out) const {
  out.clear();
  const double r = radius + max_reach_;
  const int gi0 = std::clamp(int((p.x - r - gbox_.xmin) / cell_), 0, gnx_ - 1);
  const int gi1 = std::clamp(int((p.x + r - gbox_.xmin) / cell_), 0, gnx_ - 1);
  const int gj0 = std::clamp(int((p.y - r - gbox_.ymin) / cell_), 0, gny_ - 1);
  const int gj1 = std::clamp(int((p.y + r - gbox_.ymin) / cell_), 0, gny_ - 1);
  const double r2 = r * r;
  const auto& nodes = mesh_->nodes();
  const auto& tris = mesh_->triangles();
  for (int gj = gj0; gj <= gj1; ++gj)
    for (int gi = gi0; gi <= gi1; ++gi)
      for (const int t : gcells_[std::size_t(gj) * gnx_ + gi]) {
        const auto& tri = tris[size_t(t)];
        const Vec2 cen{(nodes[size_t(tri[0])].x + nodes[size_t(tri[1])].x + nodes[size_t(tri[2])].x) / 3,
                       (nodes[size_t(tri[0])].y + nodes[size_t(tri[1])].y + nodes[size_t(tri[2])].y) / 3};
        const Vec2 d = cen - p;
        if (dot(d, d) <= r2) out.push_back(t);
      }
  std::sort(out.begin(), out.end());
}

double FredholmMoments::D(Vec2 y) const {
  const double support = g_.support_radius();
  double s = 0.0;
  if (std::isfinite(support)) {
    const auto& srule = TriangleRule::of_order(single_order_);
    const std::size_t per = srule.size();
    std::vector<int> near;
    triangles_near(y, support, near);
    for (const int t : near) {
      const std::size_t base = std::size_t(t) * per;
      for (std::size_t k = 0; k < per; ++k) {
        const QNode& n = znodes_[base + k];
        const double r = dist(n.p, y);
        if (r >= support) continue;
        s += n.w * n.lam * (g_(r) - 1.0);
      }
    }
  } else {
    for (const QNode& n : znodes_) s += n.w * n.lam * (g_(dist(n.p, y)) - 1.0);
  }
  return s;
}

double FredholmMoments::q(Vec2 y) const {
  const double d = D(y);
  if (norm_ == Normalization::appendix) return d / lambda_int_;
  return (lambda_int_ + d) / area_ - 1.0;
}

double FredholmMoments::source_const(Vec2 x_o) const {
  const double d = D(x_o);
  if (norm_ == Normalization::appendix) return (1.0 - d) / lambda_int_;
  return (1.0 + area_ - lambda_int_ - d) / area_;
}

double FredholmMoments::kernel(Vec2 x, Vec2 y) const {
  const double lam_y = checked(lambda_(y), y, "intensity");
  return lam_y * ((checked(g_(dist(x, y)), y, "pair correlation") - 1.0) - q(y));
}

double FredholmMoments::source(Vec2 x, Vec2 x_o) const {
  const double lam_o = checked(lambda_(x_o), x_o, "intensity");
  return lam_o * (source_const(x_o) + (checked(g_(dist(x, x_o)), x, "pair correlation") - 1.0));
}

FredholmOperator FredholmOperator::assemble(std::shared_ptr<const TriangleMesh> mesh,
                                            Window observation, IntensityModel lambda,
                                            PairCorrelationModel g, const Options& opts) {
  FredholmOperator op;
  op.opts_ = opts;
  op.window_ = std::make_shared<const Window>(std::move(observation));
  op.moments_ = std::make_shared<FredholmMoments>(mesh, std::move(lambda), std::move(g),
                                                  opts.single_order, opts.pair_order, opts.norm);
  const FredholmMoments& mm = *op.moments_;
  const TriangleMesh& m = *mesh;
  const auto n = Eigen::Index(m.node_count());
  const std::size_t tcount = m.triangle_count();
  const auto& prule = TriangleRule::of_order(opts.pair_order);
  const std::size_t per = prule.size();
  const auto& ynodes = mm.pair_nodes();

  op.mass_ = locint::mass_matrix(m);

  const double support = mm.pcf().support_radius();
  const bool local = std::isfinite(support);

  // q at every pair node (the x_o-independent part of the kernel)
  std::vector<double> qvals(ynodes.size());
  parallel_chunks(ynodes.size(), opts.threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) qvals[i] = mm.q(ynodes[i].p);
  });

  // K = E - a d^T with
  //   E_ij = ∫∫ (g-1)(x-y) lambda(y) φ_i(x) φ_j(y),
  //   a_i  = ∫ φ_i,  d_j = ∫ lambda(y) q(y) φ_j(y)
  // all under the pair rule, so assembled K equals its brute pair-rule
  // quadrature exactly.
  Eigen::VectorXd avec = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd dvec = Eigen::VectorXd::Zero(n);
  for (std::size_t yi = 0; yi < ynodes.size(); ++yi) {
    const QNode& ny = ynodes[yi];
    const auto& tri = m.triangles()[yi / per];
    for (int j = 0; j < 3; ++j) {
      avec[tri[size_t(j)]] += ny.w * ny.bary[size_t(j)];
      dvec[tri[size_t(j)]] += ny.w * ny.lam * qvals[yi] * ny.bary[size_t(j)];
    }
  }

  const int threads = resolve_threads(opts.threads);
  const std::size_t bytes_per_buffer = std::size_t(n) * std::size_t(n) * sizeof(double);
  const int buffers = (bytes_per_buffer * std::size_t(threads) > (std::size_t(6) << 30)) ? 1 : threads;

  std::vector<Eigen::MatrixXd> acc;
  acc.resize(std::size_t(buffers));
  for (auto& a : acc) a = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::size_t> pair_counts(std::size_t(buffers), 0);

  parallel_chunks(tcount, buffers, [&](std::size_t tb, std::size_t te, int ci) {
    Eigen::MatrixXd& K = acc[std::size_t(ci)];
    std::vector<int> near;
    std::size_t pairs = 0;
    const auto& pcf = mm.pcf();
    for (std::size_t s = tb; s < te; ++s) {
      const auto& tri_s = m.triangles()[s];
      const QNode* xs = &ynodes[s * per];
      const Vec2 cen{(m.nodes()[size_t(tri_s[0])].x + m.nodes()[size_t(tri_s[1])].x +
                      m.nodes()[size_t(tri_s[2])].x) / 3,
                     (m.nodes()[size_t(tri_s[0])].y + m.nodes()[size_t(tri_s[1])].y +
                      m.nodes()[size_t(tri_s[2])].y) / 3};
      const int* tlist = nullptr;
      std::size_t tlen = 0;
      if (local) {
        mm.triangles_near(cen, support + mm.max_reach(), near);
        tlist = near.data();
        tlen = near.size();
      } else {
        tlen = tcount;
      }
      for (std::size_t ti = 0; ti < tlen; ++ti) {
        const std::size_t t = local ? std::size_t(tlist[ti]) : ti;
        const auto& tri_t = m.triangles()[t];
        const QNode* ys = &ynodes[t * per];
        double block[3][3] = {};
        bool any = false;
        for (std::size_t qx = 0; qx < per; ++qx) {
          for (std::size_t qy = 0; qy < per; ++qy) {
            const double r = dist(xs[qx].p, ys[qy].p);
            if (local && r >= support) continue;
            const double gm1 = pcf(r) - 1.0;
            if (gm1 == 0.0) continue;
            const double v = xs[qx].w * ys[qy].w * ys[qy].lam * gm1;
            any = true;
            for (int i = 0; i < 3; ++i) {
              const double vi = v * xs[qx].bary[size_t(i)];
              block[i][0] += vi * ys[qy].bary[0];
              block[i][1] += vi * ys[qy].bary[1];
              block[i][2] += vi * ys[qy].bary[2];
            }
          }
        }
        ++pairs;
        if (!any) continue;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            K(tri_s[size_t(i)], tri_t[size_t(j)]) += block[i][j];
      }
    }
    pair_counts[std::size_t(ci)] = pairs;
  });

  for (int c = 1; c < buffers; ++c) acc[0] += acc[std::size_t(c)];
  acc.resize(1);
  op.pair_count_ = 0;
  for (const std::size_t c : pair_counts) op.pair_count_ += c;

  op.system_ = std::move(acc[0]);
  op.system_.noalias() -= avec * dvec.transpose();
  op.system_ += op.mass_;
  op.factorize();
  return op;
}

void FredholmOperator::factorize() {
  lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(system_);
  // cheap singularity probe: a solve against a constant must stay finite
  const Eigen::VectorXd probe =
      lu_->solve(Eigen::VectorXd::Ones(system_.rows()));
  if (!probe.allFinite())
    throw NumericError("(M+K) factorization failed; refine the mesh or check the moments");
}

Eigen::MatrixXd FredholmOperator::kernel_matrix() const {
  Eigen::MatrixXd k = system_;
  k -= mass_;
  return k;
}

Eigen::VectorXd FredholmOperator::build_source(Vec2 x_o) const {
  const FredholmMoments& mm = *moments_;
  const TriangleMesh& m = mm.mesh();
  const auto n = Eigen::Index(m.node_count());
  const double lam_o = mm.intensity()(x_o);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  if (lam_o == 0.0) return f;

  const double c0 = mm.source_const(x_o);
  const auto& srule = TriangleRule::of_order(mm.single_order());
  const std::size_t per = srule.size();
  const auto& znodes = mm.single_nodes();
  const auto& pcf = mm.pcf();
  const double support = pcf.support_radius();

  // constant part: c0 * ∫ φ_i  (exact for P1 under any rule >= order 1)
  for (std::size_t zi = 0; zi < znodes.size(); ++zi) {
    const auto& tri = m.triangles()[zi / per];
    for (int i = 0; i < 3; ++i)
      f[tri[size_t(i)]] += c0 * znodes[zi].w * znodes[zi].bary[size_t(i)];
  }
  // (g-1)(x - x_o) part
  if (std::isfinite(support)) {
    std::vector<int> near;
    moments_->triangles_near(x_o, support, near);
    for (const int t : near) {
      const std::size_t base = std::size_t(t) * per;
      const auto& tri = m.triangles()[size_t(t)];
      for (std::size_t k = 0; k < per; ++k) {
        const QNode& nz = znodes[base + k];
        const double r = dist(nz.p, x_o);
        if (r >= support) continue;
        const double gm1 = pcf(r) - 1.0;
        for (int i = 0; i < 3; ++i) f[tri[size_t(i)]] += gm1 * nz.w * nz.bary[size_t(i)];
      }
    }
  } else {
    for (std::size_t zi = 0; zi < znodes.size(); ++zi) {
      const auto& tri = m.triangles()[zi / per];
      const double gm1 = pcf(dist(znodes[zi].p, x_o)) - 1.0;
      for (int i = 0; i < 3; ++i) f[tri[size_t(i)]] += gm1 * znodes[zi].w * znodes[zi].bary[size_t(i)];
    }
  }
  return lam_o * f;
}

WeightField FredholmOperator::solve_weights(Vec2 x_o) const {
  if (!lu_) throw StateError("operator is not factorized");
  WeightField wf;
  wf.x_o = x_o;
  wf.mesh = moments_->mesh_ptr();
  wf.window = window_;
  wf.lambda_xo = moments_->intensity()(x_o);
  wf.target_inside_observation = window_->contains(x_o);
  if (wf.target_inside_observation)
    std::cerr << "locint: warning: target (" << x_o.x << ", " << x_o.y
              << ") lies inside the observation window; solving anyway (diagnostic use)\n";

  const Eigen::VectorXd f = build_source(x_o);
  const double fnorm = f.norm();
  if (fnorm == 0.0) {
    wf.coeffs = Eigen::VectorXd::Zero(system_.rows());
    wf.solver_residual = 0.0;
    return wf;
  }
  Eigen::VectorXd w = lu_->solve(f);
  Eigen::VectorXd r = f - system_ * w;
  double rel = r.norm() / fnorm;
  for (int it = 0; it < 2 && rel > 1e-11; ++it) {  // iterative refinement
    w += lu_->solve(r);
    r = f - system_ * w;
    rel = r.norm() / fnorm;
  }
  wf.coeffs = std::move(w);
  wf.solver_residual = rel;
  return wf;
}

double WeightField::evaluate(Vec2 x) const {
  return mesh->interpolate(std::span<const double>(coeffs.data(), std::size_t(coeffs.size())), x);
}

double predict(const WeightField& wf, const PointPattern& pattern) {
  if (!(pattern.window() == *wf.window))
    throw InvalidArgumentError("predict: pattern window differs from the observation window");
  double s = 0.0;
  for (const Vec2& p : pattern.points()) s += wf.evaluate(p);
  return s;
}

std::size_t PredictionGrid::failure_count() const {
  std::size_t n = 0;
  for (const auto f : failed) n += f;
  return n;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void PredictionGrid::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << (variances.empty() ? "x,y,lambda_hat\n" : "x,y,lambda_hat,variance\n");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    os << fmt(targets[i].x) << "," << fmt(targets[i].y) << ",";
    if (failed[i]) {
      os << "NA";
      if (!variances.empty()) os << ",NA";
      os << "  # " << reasons[i];
    } else {
      os << fmt(values[i]);
      if (!variances.empty()) os << "," << fmt(variances[i]);
    }
    os << "\n";
  }
}

PredictionGrid predict_grid(const FredholmOperator& op, const PointPattern& pattern,
                            const std::vector<Vec2>& targets, const PredictOptions& popts) {
  PredictionGrid out;
  out.targets = targets;
  out.values.assign(targets.size(), 0.0);
  if (popts.with_variance) out.variances.assign(targets.size(), 0.0);
  out.failed.assign(targets.size(), 0);
  out.reasons.assign(targets.size(), "");

  // pattern point locations are target-independent; cache the interpolation
  const TriangleMesh& mesh = op.mesh();
  if (!(pattern.window() == op.observation()))
    throw InvalidArgumentError("predict_grid: pattern window differs from the observation window");
  struct Loc {
    int tri;
    std::array<double, 3> bary;
  };
  std::vector<Loc> locs(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const int t = mesh.locate(pattern.points()[i]);
    if (t < 0) {
      std::ostringstream os;
      os << "pattern point (" << pattern.points()[i].x << ", " << pattern.points()[i].y
         << ") is outside the mesh";
      throw NumericError(os.str());
    }
    locs[i] = {t, mesh.barycentric(t, pattern.points()[i])};
  }

  parallel_chunks(targets.size(), popts.threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec2 xo = targets[i];
      if (op.observation().contains(xo)) {
        out.failed[i] = 1;
        out.reasons[i] = "target inside the observation window";
        continue;
      }
      try {
        const WeightField wf = op.solve_weights(xo);
        double v = 0.0;
        for (const Loc& l : locs) {
          const auto& tri = mesh.triangles()[size_t(l.tri)];
          v += l.bary[0] * wf.coeffs[tri[0]] + l.bary[1] * wf.coeffs[tri[1]] +
               l.bary[2] * wf.coeffs[tri[2]];
        }
        if (popts.clamp_at_zero && v < 0) v = 0;
        out.values[i] = v;
        if (popts.with_variance) out.variances[i] = prediction_variance(op, wf);
      } catch (const Error& err) {
        out.failed[i] = 1;
        out.reasons[i] = err.what();
      }
    }
  });
  return out;
}

double unbiasedness_residual(const FredholmOperator& op, const WeightField& wf) {
  const FredholmMoments& mm = op.moments();
  const TriangleMesh& m = mm.mesh();
  const auto& znodes = mm.single_nodes();
  const std::size_t per = TriangleRule::of_order(mm.single_order()).size();
  double s = 0.0;
  for (std::size_t zi = 0; zi < znodes.size(); ++zi) {
    const auto& tri = m.triangles()[zi / per];
    const double w = znodes[zi].bary[0] * wf.coeffs[tri[0]] + znodes[zi].bary[1] * wf.coeffs[tri[1]] +
                     znodes[zi].bary[2] * wf.coeffs[tri[2]];
    s += znodes[zi].w * znodes[zi].lam * w;
  }
  return std::abs(s - wf.lambda_xo) / std::max(wf.lambda_xo, kResidualFloor);
}

double prediction_variance(const FredholmOperator& op, const WeightField& wf) {
  const FredholmMoments& mm = op.moments();
  const TriangleMesh& m = mm.mesh();
  const auto& znodes = mm.single_nodes();
  const auto& ynodes = mm.pair_nodes();
  const std::size_t sper = TriangleRule::of_order(mm.single_order()).size();
  const std::size_t pper = TriangleRule::of_order(mm.pair_order()).size();

  double term1 = 0.0;
  for (std::size_t zi = 0; zi < znodes.size(); ++zi) {
    const auto& tri = m.triangles()[zi / sper];
    const double w = znodes[zi].bary[0] * wf.coeffs[tri[0]] + znodes[zi].bary[1] * wf.coeffs[tri[1]] +
                     znodes[zi].bary[2] * wf.coeffs[tri[2]];
    term1 += znodes[zi].w * znodes[zi].lam * w * w;
  }

  // w at every pair node
  std::vector<double> wvals(ynodes.size());
  for (std::size_t yi = 0; yi < ynodes.size(); ++yi) {
    const auto& tri = m.triangles()[yi / pper];
    wvals[yi] = ynodes[yi].bary[0] * wf.coeffs[tri[0]] + ynodes[yi].bary[1] * wf.coeffs[tri[1]] +
                ynodes[yi].bary[2] * wf.coeffs[tri[2]];
  }
  const auto& pcf = mm.pcf();
  const double support = pcf.support_radius();
  const bool local = std::isfinite(support);
  double term2 = 0.0;
  std::vector<int> near;
  const std::size_t tcount = m.triangle_count();
  for (std::size_t s = 0; s < tcount; ++s) {
    const QNode* xs = &ynodes[s * pper];
    const double* wx = &wvals[s * pper];
    std::size_t tlen = tcount;
    const int* tlist = nullptr;
    if (local) {
      const auto& tri_s = m.triangles()[s];
      const Vec2 cen{(m.nodes()[size_t(tri_s[0])].x + m.nodes()[size_t(tri_s[1])].x +
                      m.nodes()[size_t(tri_s[2])].x) / 3,
                     (m.nodes()[size_t(tri_s[0])].y + m.nodes()[size_t(tri_s[1])].y +
                      m.nodes()[size_t(tri_s[2])].y) / 3};
      op.moments().triangles_near(cen, support + mm.max_reach(), near);
      tlist = near.data();
      tlen = near.size();
    }
    for (std::size_t ti = 0; ti < tlen; ++ti) {
      const std::size_t t = local ? std::size_t(tlist[ti]) : ti;
      const QNode* ys = &ynodes[t * pper];
      const double* wy = &wvals[t * pper];
      for (std::size_t qx = 0; qx < pper; ++qx)
        for (std::size_t qy = 0; qy < pper; ++qy) {
          const double r = dist(xs[qx].p, ys[qy].p);
          if (local && r >= support) continue;
          const double gm1 = pcf(r) - 1.0;
          if (gm1 == 0.0) continue;
          term2 += xs[qx].w * ys[qy].w * xs[qx].lam * ys[qy].lam * wx[qx] * wy[qy] * gm1;
        }
    }
  }
  const double var = term1 + term2;
  if (var < -1e-8 * (std::abs(term1) + std::abs(term2)))
    std::cerr << "locint: warning: negative prediction variance " << var
              << " (pair correlation model may be inadmissible)\n";
  return var;
}

std::vector<Vec2> make_grid_targets(const BBox& box, int nx, int ny) {
  if (nx < 1 || ny < 1) throw InvalidArgumentError("grid must have at least one cell per axis");
  std::vector<Vec2> out;
  out.reserve(std::size_t(nx) * std::size_t(ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out.push_back({box.xmin + box.width() * (i + 0.5) / nx,
                     box.ymin + box.height() * (j + 0.5) / ny});
  return out;
}

namespace {

constexpr char kCacheMagic[9] = "LOCINTOP";
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mesh_hash(const TriangleMesh& m) {
  std::uint64_t h = fnv1a(m.nodes().data(), m.nodes().size() * sizeof(Vec2));
  h = fnv1a(m.triangles().data(), m.triangles().size() * sizeof(std::array<int, 3>), h);
  return h;
}

}  // namespace

void FredholmOperator::save_cache(const std::string& path, const std::string& moments_key) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(kCacheMagic, 8);
  const std::uint32_t version = kCacheVersion;
  const std::uint32_t norm = std::uint32_t(opts_.norm);
  const std::uint32_t po = std::uint32_t(opts_.pair_order), so = std::uint32_t(opts_.single_order);
  const std::uint64_t mh = mesh_hash(moments_->mesh());
  const std::uint64_t kh = fnv1a(moments_key.data(), moments_key.size());
  const std::uint64_t n = std::uint64_t(system_.rows());
  const std::uint64_t pc = pair_count_;
  for (const auto* v : {(const void*)&version, (const void*)&norm, (const void*)&po, (const void*)&so})
    os.write(static_cast<const char*>(v), sizeof(std::uint32_t));
  for (const auto* v : {(const void*)&mh, (const void*)&kh, (const void*)&n, (const void*)&pc})
    os.write(static_cast<const char*>(v), sizeof(std::uint64_t));
  os.write(reinterpret_cast<const char*>(system_.data()),
           std::streamsize(sizeof(double)) * system_.size());
  if (!os) throw Error("write failed: " + path);
}

FredholmOperator FredholmOperator::load_cache(const std::string& path,
                                              const std::string& moments_key,
                                              std::shared_ptr<const TriangleMesh> mesh,
                                              Window observation, IntensityModel lambda,
                                              PairCorrelationModel g, const Options& opts) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kCacheMagic, 8) != 0)
    throw ParseError(path + ": not an operator cache file");
  std::uint32_t version, norm, po, so;
  std::uint64_t mh, kh, n, pc;
  for (auto* v : {&version, &norm, &po, &so}) is.read(reinterpret_cast<char*>(v), sizeof(std::uint32_t));
  for (auto* v : {&mh, &kh, &n, &pc}) is.read(reinterpret_cast<char*>(v), sizeof(std::uint64_t));
  if (!is || version != kCacheVersion) throw ParseError(path + ": unsupported cache version");
  if (norm != std::uint32_t(opts.norm) || po != std::uint32_t(opts.pair_order) ||
      so != std::uint32_t(opts.single_order))
    throw StateError(path + ": cache was assembled with different quadrature/normalization options");
  if (mh != mesh_hash(*mesh)) throw StateError(path + ": cache does not match the mesh");
  if (kh != fnv1a(moments_key.data(), moments_key.size()))
    throw StateError(path + ": cache does not match the moment models");

  FredholmOperator op;
  op.opts_ = opts;
  op.window_ = std::make_shared<const Window>(std::move(observation));
  op.moments_ = std::make_shared<FredholmMoments>(mesh, std::move(lambda), std::move(g),
                                                  opts.single_order, opts.pair_order, opts.norm);
  op.mass_ = locint::mass_matrix(*mesh);
  op.pair_count_ = pc;
  op.system_.resize(Eigen::Index(n), Eigen::Index(n));
  is.read(reinterpret_cast<char*>(op.system_.data()), std::streamsize(sizeof(double)) * op.system_.size());
  if (!is) throw ParseError(path + ": truncated cache file");
  op.factorize();
  return op;
}

}  // namespace locint
