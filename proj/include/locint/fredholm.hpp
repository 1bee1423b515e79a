#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

#include "locint/intensity.hpp"
#include "locint/mesh.hpp"
#include "locint/paircorr.hpp"
#include "locint/pattern.hpp"

namespace locint {

// Which normalization divides the moment integrals: the appendix derivation
// uses 1/Lambda with Lambda = ∫ lambda, the main-text display uses
// 1/nu(W_obs). They coincide for lambda ≡ 1; the appendix form is the default
// because it alone reproduces the exact constant solution in the Poisson
// case.
enum class Normalization { appendix, main_text };

// Quadrature context shared by the kernel, source and assembly routines:
// caches lambda at the mesh quadrature nodes and evaluates the inner moment
// integral D(y) = ∫ lambda(z) (g(z-y)-1) dz with support-radius pruning.
class FredholmMoments {
 public:
  FredholmMoments(std::shared_ptr<const TriangleMesh> mesh, IntensityModel lambda,
                  PairCorrelationModel g, int single_order = 4, int pair_order = 2,
                  Normalization norm = Normalization::appendix);

  double lambda_integral() const { return lambda_int_; }
  double area() const { return area_; }
  Normalization normalization() const { return norm_; }
  const TriangleMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriangleMesh> mesh_ptr() const { return mesh_; }
  const IntensityModel& intensity() const { return lambda_; }
  const PairCorrelationModel& pcf() const { return g_; }
  int single_order() const { return single_order_; }
  int pair_order() const { return pair_order_; }

  double D(Vec2 y) const;
  // q(y) such that k(x,y) = lambda(y) [ (g-1)(x-y) - q(y) ]
  double q(Vec2 y) const;
  // constant part of the source: f(x;x_o) = lambda(x_o) [ C(x_o) + (g-1)(x-x_o) ]
  double source_const(Vec2 x_o) const;

  double kernel(Vec2 x, Vec2 y) const;
  double source(Vec2 x, Vec2 x_o) const;

  // triangles whose quadrature nodes can interact with a disc around p
  void triangles_near(Vec2 p, double radius, std::vector<int>& out) const;
  bool local_support() const;

  struct QNode {
    Vec2 p;
    double w;        // area-scaled quadrature weight
    double lam;      // lambda(p)
    std::array<double, 3> bary;
  };
  const std::vector<QNode>& single_nodes() const { return znodes_; }
  const std::vector<QNode>& pair_nodes() const { return ynodes_; }
  double max_reach() const { return max_reach_; }

 private:
  std::shared_ptr<const TriangleMesh> mesh_;
  IntensityModel lambda_;
  PairCorrelationModel g_;
  Normalization norm_;
  int single_order_, pair_order_;
  double area_ = 0, lambda_int_ = 0;
  std::vector<QNode> znodes_;  // single-integral rule, per triangle
  std::vector<QNode> ynodes_;  // pair rule, per triangle
  // centroid grid over triangles
  double cell_ = 0, max_reach_ = 0;
  int gnx_ = 0, gny_ = 0;
  BBox gbox_;
  std::vector<std::vector<int>> gcells_;
};

struct WeightField {
  Vec2 x_o;
  double lambda_xo = 0.0;
  Eigen::VectorXd coeffs;
  double solver_residual = 0.0;
  bool target_inside_observation = false;
  std::shared_ptr<const TriangleMesh> mesh;
  std::shared_ptr<const Window> window;

  double evaluate(Vec2 x) const;  // P1 interpolation; throws outside the mesh
};

struct PredictionGrid {
  std::vector<Vec2> targets;
  std::vector<double> values;
  std::vector<double> variances;     // empty unless requested
  std::vector<unsigned char> failed;
  std::vector<std::string> reasons;  // parallel to targets; empty string = ok
  int grid_nx = 0, grid_ny = 0;      // 0 when targets are not a regular grid
  BBox grid_bbox{};

  std::size_t failure_count() const;
  void write_csv(const std::string& path) const;
};

struct FredholmOptions {
  int pair_order = 2;
  int single_order = 4;
  Normalization norm = Normalization::appendix;
  int threads = 0;  // 0 = hardware
};

// Assembled Galerkin system (M + K) with a reusable factorization.
class FredholmOperator {
 public:
  using Options = FredholmOptions;

  static FredholmOperator assemble(std::shared_ptr<const TriangleMesh> mesh, Window observation,
                                   IntensityModel lambda, PairCorrelationModel g,
                                   const Options& opts = FredholmOptions());

  WeightField solve_weights(Vec2 x_o) const;
  Eigen::VectorXd build_source(Vec2 x_o) const;  // F_i = ∫ f(x;x_o) φ_i dx

  const FredholmMoments& moments() const { return *moments_; }
  const Window& observation() const { return *window_; }
  std::shared_ptr<const Window> window_ptr() const { return window_; }
  const TriangleMesh& mesh() const { return moments_->mesh(); }
  double lambda_integral() const { return moments_->lambda_integral(); }
  double area() const { return moments_->area(); }
  const Eigen::MatrixXd& system_matrix() const { return system_; }
  const Eigen::SparseMatrix<double>& mass_matrix() const { return mass_; }
  Eigen::MatrixXd kernel_matrix() const;  // K = (M+K) - M
  std::size_t triangle_pair_count() const { return pair_count_; }

  // Binary cache of the assembled system keyed by a caller-supplied moments
  // fingerprint; the factorization is rebuilt on load.
  void save_cache(const std::string& path, const std::string& moments_key) const;
  static FredholmOperator load_cache(const std::string& path, const std::string& moments_key,
                                     std::shared_ptr<const TriangleMesh> mesh, Window observation,
                                     IntensityModel lambda, PairCorrelationModel g,
                                     const Options& opts = FredholmOptions());

 private:
  FredholmOperator() = default;
  void factorize();

  std::shared_ptr<FredholmMoments> moments_;
  std::shared_ptr<const Window> window_;
  Options opts_;
  Eigen::SparseMatrix<double> mass_;
  Eigen::MatrixXd system_;  // M + K
  std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  std::size_t pair_count_ = 0;
};

// Σ w(x; x_o) over the observed points. The pattern window must equal the
// operator's observation window.
double predict(const WeightField& wf, const PointPattern& pattern);

struct PredictOptions {
  bool clamp_at_zero = false;
  bool with_variance = false;
  int threads = 0;
};
PredictionGrid predict_grid(const FredholmOperator& op, const PointPattern& pattern,
                            const std::vector<Vec2>& targets, const PredictOptions& popts = {});

// |∫ lambda w - lambda(x_o)| / max(lambda(x_o), eps)
double unbiasedness_residual(const FredholmOperator& op, const WeightField& wf);

// Var[λ̂(x_o|Φ)] = ∫ lambda w² + ∫∫ lambda lambda w w (g-1)
double prediction_variance(const FredholmOperator& op, const WeightField& wf);

std::vector<Vec2> make_grid_targets(const BBox& box, int nx, int ny);

}  // namespace locint
