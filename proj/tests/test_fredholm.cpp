#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <memory>

#include "doctest.h"
#include "locint/errors.hpp"
#include "locint/fredholm.hpp"
#include "locint/rng.hpp"
#include "locint/simulate.hpp"

using namespace locint;

namespace {

Window obs_window_p1() {
  return Window(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                {Polygon{{0.35, 0.35}, {0.65, 0.35}, {0.65, 0.65}, {0.35, 0.65}}});
}

std::shared_ptr<const TriangleMesh> shared_mesh(const Window& w, double edge,
                                                const std::vector<std::vector<Vec2>>& segs = {}) {
  return std::make_shared<const TriangleMesh>(triangulate(w, edge, segs));
}

IntensityModel imcp_intensity() {
  return IntensityModel::thinned_cluster(50, 40, ThinningField::step_x1(0.8, 0.2, 0.5));
}

}  // namespace

TEST_CASE("kernel vanishes for a poisson pcf under the appendix normalization") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.1);
  const FredholmMoments mm(mesh, IntensityModel::constant(100.0), PairCorrelationModel::poisson());
  for (const Vec2 x : {Vec2{0.1, 0.1}, Vec2{0.9, 0.2}, Vec2{0.2, 0.8}})
    for (const Vec2 y : {Vec2{0.7, 0.9}, Vec2{0.05, 0.5}})
      CHECK(std::abs(mm.kernel(x, y)) <= 1e-12);
}

TEST_CASE("normalizations agree for unit intensity and differ otherwise") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.1);
  const FredholmMoments unit_a(mesh, IntensityModel::constant(1.0), PairCorrelationModel::poisson(),
                               4, 2, Normalization::appendix);
  const FredholmMoments unit_m(mesh, IntensityModel::constant(1.0), PairCorrelationModel::poisson(),
                               4, 2, Normalization::main_text);
  CHECK(unit_a.kernel({0.1, 0.1}, {0.9, 0.8}) ==
        doctest::Approx(unit_m.kernel({0.1, 0.1}, {0.9, 0.8})).epsilon(1e-10));

  const FredholmMoments hundred_m(mesh, IntensityModel::constant(100.0),
                                  PairCorrelationModel::poisson(), 4, 2,
                                  Normalization::main_text);
  CHECK(hundred_m.kernel({0.1, 0.1}, {0.9, 0.8}) == doctest::Approx(-9900.0).epsilon(1e-9));
}

TEST_CASE("source term closed forms for a poisson pcf") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.1);
  const FredholmMoments mm(mesh, IntensityModel::constant(100.0), PairCorrelationModel::poisson());
  const double lam_int = mm.lambda_integral();
  CHECK(lam_int == doctest::Approx(91.0).epsilon(1e-9));
  const Vec2 x_o{0.5, 0.5};
  // constant in x, equal to lambda(x_o)/Lambda
  const double f1 = mm.source({0.05, 0.05}, x_o);
  const double f2 = mm.source({0.9, 0.9}, x_o);
  CHECK(f1 == doctest::Approx(100.0 / 91.0).epsilon(1e-9));
  CHECK(f2 == doctest::Approx(f1).epsilon(1e-12));

  // lambda = lambda0 gives f = 1/nu
  const FredholmMoments mm7(mesh, IntensityModel::constant(7.0), PairCorrelationModel::poisson());
  CHECK(mm7.source({0.1, 0.2}, x_o) == doctest::Approx(1.0 / 0.91).epsilon(1e-9));

  // lambda(x_o) = 0 kills the source
  const IntensityModel dead =
      IntensityModel::thinned_cluster(50, 40, ThinningField::step_x1(0.8, 0.0, 0.5));
  const FredholmMoments mmz(mesh, dead, PairCorrelationModel::poisson());
  CHECK(mmz.source({0.1, 0.2}, {0.75, 0.5}) == 0.0);
}

TEST_CASE("assembled kernel matrix vanishes for a poisson pcf") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.08);
  const FredholmOperator op = FredholmOperator::assemble(
      mesh, w, IntensityModel::constant(100.0), PairCorrelationModel::poisson());
  CHECK(op.kernel_matrix().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("assembled kernel rows match brute-force pair quadrature") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.16, {{{0.5, 0.0}, {0.5, 0.35}}, {{0.5, 0.65}, {0.5, 1.0}}});
  const IntensityModel lam = imcp_intensity();
  const PairCorrelationModel g = PairCorrelationModel::matern(50, 0.09);
  const FredholmOperator op = FredholmOperator::assemble(mesh, w, lam, g);
  const FredholmMoments& mm = op.moments();

  // independent route: K_ij = sum over triangle pairs and pair-rule nodes of
  // w_x w_y k(x,y) phi_i(x) phi_j(y), with k evaluated through the public
  // kernel() entry point
  const auto n = Eigen::Index(mesh->node_count());
  Eigen::MatrixXd brute = Eigen::MatrixXd::Zero(n, n);
  const auto& ynodes = mm.pair_nodes();
  const std::size_t per = TriangleRule::of_order(mm.pair_order()).size();
  for (std::size_t s = 0; s < mesh->triangle_count(); ++s) {
    const auto& tri_s = mesh->triangles()[s];
    for (std::size_t t = 0; t < mesh->triangle_count(); ++t) {
      const auto& tri_t = mesh->triangles()[t];
      for (std::size_t qx = 0; qx < per; ++qx)
        for (std::size_t qy = 0; qy < per; ++qy) {
          const auto& nx = ynodes[s * per + qx];
          const auto& ny = ynodes[t * per + qy];
          const double v = nx.w * ny.w * mm.kernel(nx.p, ny.p);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              brute(tri_s[size_t(i)], tri_t[size_t(j)]) +=
                  v * nx.bary[size_t(i)] * ny.bary[size_t(j)];
        }
    }
  }
  const Eigen::MatrixXd k = op.kernel_matrix();
  const Eigen::VectorXd row_sums = k.rowwise().sum();
  const Eigen::VectorXd brute_sums = brute.rowwise().sum();
  const double scale = brute_sums.cwiseAbs().maxCoeff();
  REQUIRE(scale > 0);
  CHECK((row_sums - brute_sums).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  CHECK((k - brute).cwiseAbs().maxCoeff() <= 1e-10 * k.cwiseAbs().maxCoeff());
}

TEST_CASE("poisson closed-form weights and prediction") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.05);
  const FredholmOperator op = FredholmOperator::assemble(
      mesh, w, IntensityModel::constant(100.0), PairCorrelationModel::poisson());
  const WeightField wf = op.solve_weights({0.5, 0.5});
  const double expect = 1.0 / 0.91;
  for (Eigen::Index i = 0; i < wf.coeffs.size(); ++i)
    CHECK(wf.coeffs[i] == doctest::Approx(expect).epsilon(1e-8));
  CHECK(wf.solver_residual <= 1e-10);

  SeededStream rng(42, 0);
  const PointPattern pat = simulate_poisson(100.0, w, rng);
  const double pred = predict(wf, pat);
  CHECK(pred == doctest::Approx(double(pat.size()) / 0.91).epsilon(1e-6));
  CHECK(predict(wf, PointPattern({}, w)) == 0.0);

  CHECK(unbiasedness_residual(op, wf) <= 1e-10);
  CHECK(prediction_variance(op, wf) == doctest::Approx(100.0 / 0.91).epsilon(1e-6));
}

TEST_CASE("zero target intensity gives a zero weight field") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.08, {{{0.5, 0.0}, {0.5, 0.35}}, {{0.5, 0.65}, {0.5, 1.0}}});
  const IntensityModel dead =
      IntensityModel::thinned_cluster(50, 40, ThinningField::step_x1(0.8, 0.0, 0.5));
  const FredholmOperator op =
      FredholmOperator::assemble(mesh, w, dead, PairCorrelationModel::matern(50, 0.09));
  const WeightField wf = op.solve_weights({0.75, 0.5});
  CHECK(wf.coeffs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(unbiasedness_residual(op, wf) == 0.0);
  CHECK(prediction_variance(op, wf) == 0.0);
}

TEST_CASE("prediction is linear in the pattern") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.06, {{{0.5, 0.0}, {0.5, 0.35}}, {{0.5, 0.65}, {0.5, 1.0}}});
  const FredholmOperator op =
      FredholmOperator::assemble(mesh, w, imcp_intensity(), PairCorrelationModel::matern(50, 0.09));
  const WeightField wf = op.solve_weights({0.5, 0.6});
  SeededStream rng(7, 0);
  std::vector<Vec2> a, b;
  for (int i = 0; i < 60; ++i) {
    const Vec2 p{rng.uniform(), rng.uniform()};
    if (!w.contains(p)) continue;
    (i % 2 ? a : b).push_back(p);
  }
  std::vector<Vec2> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const double pa = predict(wf, PointPattern(a, w));
  const double pb = predict(wf, PointPattern(b, w));
  const double pboth = predict(wf, PointPattern(both, w));
  CHECK(pboth == doctest::Approx(pa + pb).epsilon(1e-12));
}

TEST_CASE("imcp variance exceeds the poisson variance at equal intensity") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.06, {{{0.5, 0.0}, {0.5, 0.35}}, {{0.5, 0.65}, {0.5, 1.0}}});
  const IntensityModel lam = imcp_intensity();
  const FredholmOperator clustered =
      FredholmOperator::assemble(mesh, w, lam, PairCorrelationModel::matern(50, 0.05));
  const FredholmOperator poisson =
      FredholmOperator::assemble(mesh, w, lam, PairCorrelationModel::poisson());
  const Vec2 x_o{0.5, 0.63};
  const double vc = prediction_variance(clustered, clustered.solve_weights(x_o));
  const double vp = prediction_variance(poisson, poisson.solve_weights(x_o));
  CHECK(vc > vp);
}

TEST_CASE("predict_grid masks targets inside the observation window") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.07);
  const FredholmOperator op = FredholmOperator::assemble(
      mesh, w, IntensityModel::constant(100.0), PairCorrelationModel::poisson());
  SeededStream rng(9, 0);
  const PointPattern pat = simulate_poisson(100.0, w, rng);
  const std::vector<Vec2> targets{{0.5, 0.5}, {0.45, 0.55}, {0.1, 0.1}};
  const PredictionGrid grid = predict_grid(op, pat, targets);
  CHECK(grid.failed[0] == 0);
  CHECK(grid.failed[1] == 0);
  CHECK(grid.failed[2] == 1);  // inside W_obs
  CHECK(grid.failure_count() == 1);
  const double expect = double(pat.size()) / 0.91;
  CHECK(grid.values[0] == doctest::Approx(expect).epsilon(1e-6));
  CHECK(grid.values[1] == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("solved weight fields respect a mirror symmetry") {
  // mesh the lower half of the holed square (hole notch on its top edge),
  // mirror across y = 0.5, and glue: a conforming mesh invariant under the
  // reflection that maps W_obs to itself
  const Polygon lower{{0, 0}, {1, 0}, {1, 0.5}, {0.65, 0.5}, {0.65, 0.35},
                      {0.35, 0.35}, {0.35, 0.5}, {0, 0.5}};
  const TriangleMesh half = triangulate(Window(lower), 0.07);
  std::vector<Vec2> nodes = half.nodes();
  std::vector<std::array<int, 3>> tris = half.triangles();
  std::vector<int> mirror_id(half.node_count());
  for (std::size_t i = 0; i < half.node_count(); ++i) {
    const Vec2 p = half.nodes()[i];
    if (std::abs(p.y - 0.5) <= 1e-13) {
      mirror_id[i] = int(i);
    } else {
      mirror_id[i] = int(nodes.size());
      nodes.push_back({p.x, 1.0 - p.y});
    }
  }
  for (const auto& t : half.triangles())
    tris.push_back({mirror_id[size_t(t[0])], mirror_id[size_t(t[2])], mirror_id[size_t(t[1])]});
  auto mesh = std::make_shared<const TriangleMesh>(std::move(nodes), std::move(tris));
  const Window w = obs_window_p1();
  validate_mesh(*mesh, w);

  const FredholmOperator op =
      FredholmOperator::assemble(mesh, w, imcp_intensity(), PairCorrelationModel::matern(50, 0.09));
  const WeightField wf = op.solve_weights({0.5, 0.5});  // x_o on the symmetry axis? no: axis is y=0.5
  const double scale = wf.coeffs.cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < mesh->node_count(); ++i) {
    const Vec2 p = mesh->nodes()[i];
    const double wv = wf.coeffs[Eigen::Index(i)];
    const double wm = wf.evaluate({p.x, 1.0 - p.y});
    CHECK(std::abs(wv - wm) <= 1e-8 * scale);
  }
}

TEST_CASE("operator cache round trip") {
  const Window w = obs_window_p1();
  auto mesh = shared_mesh(w, 0.1);
  const IntensityModel lam = imcp_intensity();
  const PairCorrelationModel g = PairCorrelationModel::matern(50, 0.09);
  const FredholmOperator op = FredholmOperator::assemble(mesh, w, lam, g);
  const auto path = std::filesystem::temp_directory_path() / "locint_op.cache";
  op.save_cache(path.string(), "imcp-p1-R0.09");
  const FredholmOperator back =
      FredholmOperator::load_cache(path.string(), "imcp-p1-R0.09", mesh, w, lam, g);
  CHECK((back.system_matrix() - op.system_matrix()).cwiseAbs().maxCoeff() == 0.0);
  const WeightField w1 = op.solve_weights({0.5, 0.5});
  const WeightField w2 = back.solve_weights({0.5, 0.5});
  CHECK((w1.coeffs - w2.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(
      FredholmOperator::load_cache(path.string(), "other-moments", mesh, w, lam, g), StateError);
  std::filesystem::remove(path);
}
