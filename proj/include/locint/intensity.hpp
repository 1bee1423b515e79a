#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "locint/geometry.hpp"

namespace locint {

class TriangleMesh;

// Deterministic retention probability field p(x) in [0, 1].
class ThinningField {
 public:
  static ThinningField constant(double p);
  // alpha1 on {x1 <= v}, alpha2 on {x1 > v}
  static ThinningField step_x1(double alpha1, double alpha2, double v);
  // 1 - x1, clamped to [0, 1] outside the unit band
  static ThinningField linear_x1();
  static ThinningField custom(std::function<double(Vec2)> f);

  double operator()(Vec2 x) const;
  // vertical lines the field jumps across (quadrature/meshing hints)
  const std::vector<double>& split_lines_x() const { return splits_; }

 private:
  ThinningField() = default;
  std::function<double(Vec2)> f_;
  std::vector<double> splits_;
  bool validated_ = true;  // builtin fields are in-range by construction
  friend class IntensityModel;

 public:
  bool needs_validation() const { return !validated_; }
};

// Covariate surface: an analytic distance field against stored geometry or a
// raster with bilinear interpolation.
class CovariateField {
 public:
  static CovariateField distance_to(GeometrySet geometry);
  static std::shared_ptr<CovariateField> raster_from_csv(const std::string& path);
  static CovariateField raster(std::vector<double> xs, std::vector<double> ys,
                               std::vector<double> values /* row-major over y then x */);

  double operator()(Vec2 x) const;

 private:
  CovariateField() = default;
  // distance variant
  GeometrySet geom_;
  bool is_raster_ = false;
  // raster variant
  std::vector<double> xs_, ys_, values_;
};

struct LogLinearTerm {
  enum class Kind { one, x1, x2, x1sq, x1x2, x2sq, field, banded_field };
  Kind kind = Kind::one;
  double coef = 0.0;
  std::shared_ptr<const CovariateField> field;  // field / banded_field
  double band_lo = 0.0, band_hi = 0.0;          // banded: band_lo < D(x) <= band_hi
};

// First-order moment model lambda(x) >= 0.
class IntensityModel {
 public:
  static IntensityModel constant(double lambda0);
  // disjoint regions covering the domain, constant value per region
  static IntensityModel piecewise(std::vector<Window> regions, std::vector<double> values);
  // convenience: split of [x0,x1]x[y0,y1] at x1 = v
  static IntensityModel halves_x1(const BBox& box, double v, double beta1, double beta2);
  static IntensityModel thinned_cluster(double kappa, double mu, ThinningField p);
  static IntensityModel log_linear(std::vector<LogLinearTerm> terms);
  // Eq.-style log-linear model: quadratic polynomial in (x1,x2), five
  // distance bands of d_fault split at strictly increasing knots, plus linear
  // d_volcano and d_plate terms. coefficients: b0..b12.
  static IntensityModel covariate_log_linear(const std::vector<double>& beta,
                                             const std::vector<double>& knots,
                                             std::shared_ptr<const CovariateField> d_fault,
                                             std::shared_ptr<const CovariateField> d_volcano,
                                             std::shared_ptr<const CovariateField> d_plate);

  double operator()(Vec2 x) const;
  const std::vector<double>& split_lines_x() const { return splits_; }

  // Upper bound of lambda over w for rejection sampling: max over a probe
  // grid (and mesh quadrature points when a mesh is supplied) times a 1.2
  // safety factor.
  double upper_bound(const Window& w, const TriangleMesh* probe_mesh = nullptr) const;

  bool is_piecewise() const { return kind_ == Kind::piecewise; }
  bool is_thinned_cluster() const { return kind_ == Kind::thinned_cluster; }
  const std::vector<double>& piecewise_values() const { return values_; }
  const std::vector<LogLinearTerm>& terms() const { return terms_; }

 private:
  enum class Kind { constant, piecewise, thinned_cluster, log_linear };
  IntensityModel() = default;
  Kind kind_ = Kind::constant;
  double lambda0_ = 0.0;
  std::vector<Window> regions_;
  std::vector<double> values_;
  double kappa_ = 0.0, mu_ = 0.0;
  ThinningField p_ = ThinningField::constant(1.0);
  std::vector<LogLinearTerm> terms_;
  std::vector<double> splits_;
};

}  // namespace locint
