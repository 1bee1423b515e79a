#pragma once

#include <atomic>
#include <vector>

#include "locint/fredholm.hpp"
#include "locint/intensity.hpp"
#include "locint/pattern.hpp"

namespace locint {

struct MaternOracleParams {
  double kappa = 0, mu = 0, cluster_radius = 0;
  ThinningField p = ThinningField::constant(1.0);
};

// Closed-form approximation of the conditional intensity of a thinned Matern
// cluster process given the offspring observed in W_obs. Validation ground
// truth, not an estimator.
struct OracleOptions {
  int disc_segments = 64;
  int quad_order = 4;
  double sub_edge_factor = 6.0;  // outer-disc pieces split to R / factor
  // apply the 1/(pi R^2) normalization to the unobserved-ball term as well,
  // restoring the far-field identity lambda -> kappa mu p (presumed typo in
  // the printed formula); the literal reading is kept behind the flag
  bool corrected_normalization = true;
  double border_thickness = -1;  // < 0 means the cluster radius
};

class MaternOracle {
 public:
  using Options = OracleOptions;

  MaternOracle(MaternOracleParams params, Window observation, Options opts = OracleOptions());

  // conditional intensity of parents at y given the observed offspring
  double parent_intensity(Vec2 y, const PointGrid& observed) const;

  struct TargetCache {
    Vec2 x_o;
    double p_xo = 0;
    double area_total = 0;   // polygonal disc area
    double area_inside = 0;  // area of disc ∩ (W_obs ∪ border)
    struct Node {
      Vec2 y;
      double w;     // signed quadrature weight
      double p_y;   // thinning probability at y
      double pint;  // ∫_{b(y,R) ∩ W_obs} p(z) dz
    };
    std::vector<Node> nodes;
  };
  TargetCache prepare_target(Vec2 x_o) const;
  double local_intensity(const TargetCache& cache, const PointGrid& observed) const;
  double local_intensity(Vec2 x_o, const PointPattern& observed) const;

  PredictionGrid grid(const PointPattern& observed, const std::vector<Vec2>& targets,
                      int threads = 0) const;

  const Window& observation() const { return obs_; }
  const Window& border() const { return border_; }
  double border_thickness() const { return border_thickness_; }
  // quadrature nodes skipped because p(y) = 0 under a covering observed point
  std::size_t skipped_infinite_nodes() const { return skipped_.load(); }

  // suggested hash-grid cell for observed patterns
  PointGrid make_point_grid(const PointPattern& observed) const {
    return PointGrid(observed.points(), params_.cluster_radius);
  }

 private:
  double pint_at(Vec2 y) const;

  MaternOracleParams params_;
  Window obs_;
  Window border_;
  Options opts_;
  double border_thickness_;
  mutable std::atomic<std::size_t> skipped_{0};
};

// ∫ of the oracle local intensity over a window, with target caches built on
// the quadrature nodes of a throwaway mesh (reusable across replicates).
class OracleIntegrator {
 public:
  OracleIntegrator(const MaternOracle& oracle, const Window& region, double target_edge,
                   int quad_order = 2);
  double integrate(const PointPattern& observed) const;

 private:
  const MaternOracle& oracle_;
  std::vector<MaternOracle::TargetCache> caches_;
  std::vector<double> weights_;
};

}  // namespace locint
