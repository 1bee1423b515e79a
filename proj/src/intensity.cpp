#include "locint/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "locint/errors.hpp"
#include "locint/mesh.hpp"
#include "locint/quadrature.hpp"

namespace locint {

ThinningField ThinningField::constant(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidModelError("thinning probability outside [0,1]");
  ThinningField f;
  f.f_ = [p](Vec2) { return p; };
  return f;
}

ThinningField ThinningField::step_x1(double alpha1, double alpha2, double v) {
  if (!(alpha1 >= 0 && alpha1 <= 1 && alpha2 >= 0 && alpha2 <= 1))
    throw InvalidModelError("thinning probabilities outside [0,1]");
  ThinningField f;
  f.f_ = [=](Vec2 x) { return x.x <= v ? alpha1 : alpha2; };
  f.splits_ = {v};
  return f;
}

ThinningField ThinningField::linear_x1() {
  ThinningField f;
  f.f_ = [](Vec2 x) { return std::clamp(1.0 - x.x, 0.0, 1.0); };
  return f;
}

ThinningField ThinningField::custom(std::function<double(Vec2)> fn) {
  ThinningField f;
  f.f_ = std::move(fn);
  f.validated_ = false;
  return f;
}

double ThinningField::operator()(Vec2 x) const {
  const double v = f_(x);
  if (!validated_ && !(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << "thinning probability " << v << " outside [0,1] at (" << x.x << ", " << x.y << ")";
    throw InvalidModelError(os.str());
  }
  return v;
}

CovariateField CovariateField::distance_to(GeometrySet geometry) {
  if (geometry.empty()) throw InvalidArgumentError("covariate: empty geometry set");
  CovariateField f;
  f.geom_ = std::move(geometry);
  return f;
}

CovariateField CovariateField::raster(std::vector<double> xs, std::vector<double> ys,
                                      std::vector<double> values) {
  if (xs.size() < 2 || ys.size() < 2 || values.size() != xs.size() * ys.size())
    throw InvalidArgumentError("raster covariate: inconsistent grid");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw InvalidArgumentError("raster covariate: x grid not increasing");
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1])) throw InvalidArgumentError("raster covariate: y grid not increasing");
  CovariateField f;
  f.is_raster_ = true;
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  f.values_ = std::move(values);
  return f;
}

std::shared_ptr<CovariateField> CovariateField::raster_from_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,value") throw ParseError(path + ":1: expected header 'x,y,value'");
  std::set<double> xs, ys;
  std::vector<std::array<double, 3>> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 3> row{};
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ls, cell, ',')) throw ParseError(path + ":" + std::to_string(lineno) + ": expected x,y,value");
      try {
        row[size_t(c)] = std::stod(cell);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": malformed number");
      }
      if (!std::isfinite(row[size_t(c)]))
        throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite value");
    }
    xs.insert(row[0]);
    ys.insert(row[1]);
    rows.push_back(row);
  }
  const std::vector<double> gx(xs.begin(), xs.end());
  const std::vector<double> gy(ys.begin(), ys.end());
  if (rows.size() != gx.size() * gy.size())
    throw ParseError(path + ": points do not form a complete regular grid");
  auto uniform = [](const std::vector<double>& g) {
    if (g.size() < 2) return false;
    const double h = g[1] - g[0];
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
      if (std::abs((g[i + 1] - g[i]) - h) > 1e-9 * std::max(1.0, std::abs(h))) return false;
    return true;
  };
  if (!uniform(gx) || !uniform(gy)) throw ParseError(path + ": grid spacing is irregular");
  std::vector<double> values(gx.size() * gy.size(), std::nan(""));
  auto idx_of = [](const std::vector<double>& g, double v) {
    return std::size_t(std::lower_bound(g.begin(), g.end(), v) - g.begin());
  };
  for (const auto& row : rows)
    values[idx_of(gy, row[1]) * gx.size() + idx_of(gx, row[0])] = row[2];
  return std::make_shared<CovariateField>(raster(gx, gy, std::move(values)));
}

double CovariateField::operator()(Vec2 x) const {
  if (!is_raster_) return distance_to_set(x, geom_);
  if (x.x < xs_.front() - 1e-12 || x.x > xs_.back() + 1e-12 || x.y < ys_.front() - 1e-12 ||
      x.y > ys_.back() + 1e-12) {
    std::ostringstream os;
    os << "covariate not evaluable at (" << x.x << ", " << x.y << "): outside the raster";
    throw NumericError(os.str());
  }
  auto cell = [](const std::vector<double>& g, double v) {
    const auto it = std::upper_bound(g.begin(), g.end(), v);
    return std::clamp<std::ptrdiff_t>(it - g.begin() - 1, 0, std::ptrdiff_t(g.size()) - 2);
  };
  const std::size_t i = std::size_t(cell(xs_, x.x));
  const std::size_t j = std::size_t(cell(ys_, x.y));
  const double tx = std::clamp((x.x - xs_[i]) / (xs_[i + 1] - xs_[i]), 0.0, 1.0);
  const double ty = std::clamp((x.y - ys_[j]) / (ys_[j + 1] - ys_[j]), 0.0, 1.0);
  auto at = [&](std::size_t jj, std::size_t ii) { return values_[jj * xs_.size() + ii]; };
  return (1 - ty) * ((1 - tx) * at(j, i) + tx * at(j, i + 1)) +
         ty * ((1 - tx) * at(j + 1, i) + tx * at(j + 1, i + 1));
}

IntensityModel IntensityModel::constant(double lambda0) {
  if (!(lambda0 >= 0)) throw InvalidModelError("intensity must be non-negative");
  IntensityModel m;
  m.kind_ = Kind::constant;
  m.lambda0_ = lambda0;
  return m;
}

IntensityModel IntensityModel::piecewise(std::vector<Window> regions, std::vector<double> values) {
  if (regions.empty() || regions.size() != values.size())
    throw InvalidModelError("piecewise intensity: regions and values must match");
  for (const double v : values)
    if (!(v >= 0)) throw InvalidModelError("intensity must be non-negative");
  IntensityModel m;
  m.kind_ = Kind::piecewise;
  m.regions_ = std::move(regions);
  m.values_ = std::move(values);
  return m;
}

IntensityModel IntensityModel::halves_x1(const BBox& box, double v, double beta1, double beta2) {
  std::vector<Window> regions;
  regions.push_back(Window::rectangle(box.xmin, box.ymin, v, box.ymax));
  regions.push_back(Window::rectangle(v, box.ymin, box.xmax, box.ymax));
  IntensityModel m = piecewise(std::move(regions), {beta1, beta2});
  m.splits_ = {v};
  return m;
}

IntensityModel IntensityModel::thinned_cluster(double kappa, double mu, ThinningField p) {
  if (!(kappa >= 0) || !(mu >= 0)) throw InvalidModelError("kappa and mu must be non-negative");
  IntensityModel m;
  m.kind_ = Kind::thinned_cluster;
  m.kappa_ = kappa;
  m.mu_ = mu;
  m.splits_ = p.split_lines_x();
  m.p_ = std::move(p);
  return m;
}

IntensityModel IntensityModel::log_linear(std::vector<LogLinearTerm> terms) {
  if (terms.empty()) throw InvalidModelError("log-linear intensity needs at least one term");
  for (const auto& t : terms)
    if ((t.kind == LogLinearTerm::Kind::field || t.kind == LogLinearTerm::Kind::banded_field) &&
        !t.field)
      throw InvalidModelError("log-linear term references no covariate field");
  IntensityModel m;
  m.kind_ = Kind::log_linear;
  m.terms_ = std::move(terms);
  return m;
}

IntensityModel IntensityModel::covariate_log_linear(
    const std::vector<double>& beta, const std::vector<double>& knots,
    std::shared_ptr<const CovariateField> d_fault, std::shared_ptr<const CovariateField> d_volcano,
    std::shared_ptr<const CovariateField> d_plate) {
  if (beta.size() != 13) throw InvalidModelError("covariate log-linear model needs 13 coefficients");
  if (knots.size() != 4) throw InvalidModelError("covariate log-linear model needs 4 knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw InvalidModelError("knots must be strictly increasing");
  if (!d_fault || !d_volcano || !d_plate)
    throw InvalidModelError("covariate log-linear model needs all three covariate fields");
  using K = LogLinearTerm::Kind;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<LogLinearTerm> terms{
      {K::one, beta[0], nullptr, 0, 0},
      {K::x1, beta[1], nullptr, 0, 0},
      {K::x2, beta[2], nullptr, 0, 0},
      {K::x1sq, beta[3], nullptr, 0, 0},
      {K::x1x2, beta[4], nullptr, 0, 0},
      {K::x2sq, beta[5], nullptr, 0, 0},
      {K::banded_field, beta[6], d_fault, -inf, knots[0]},
      {K::banded_field, beta[7], d_fault, knots[0], knots[1]},
      {K::banded_field, beta[8], d_fault, knots[1], knots[2]},
      {K::banded_field, beta[9], d_fault, knots[2], knots[3]},
      {K::banded_field, beta[10], d_fault, knots[3], inf},
      {K::field, beta[11], d_volcano, 0, 0},
      {K::field, beta[12], d_plate, 0, 0},
  };
  return log_linear(std::move(terms));
}

double IntensityModel::operator()(Vec2 x) const {
  switch (kind_) {
    case Kind::constant:
      return lambda0_;
    case Kind::piecewise:
      for (std::size_t i = 0; i < regions_.size(); ++i)
        if (regions_[i].contains(x)) return values_[i];
      throw NumericError("piecewise intensity: point outside every region");
    case Kind::thinned_cluster:
      return kappa_ * mu_ * p_(x);
    case Kind::log_linear: {
      double e = 0.0;
      for (const auto& t : terms_) {
        switch (t.kind) {
          case LogLinearTerm::Kind::one: e += t.coef; break;
          case LogLinearTerm::Kind::x1: e += t.coef * x.x; break;
          case LogLinearTerm::Kind::x2: e += t.coef * x.y; break;
          case LogLinearTerm::Kind::x1sq: e += t.coef * x.x * x.x; break;
          case LogLinearTerm::Kind::x1x2: e += t.coef * x.x * x.y; break;
          case LogLinearTerm::Kind::x2sq: e += t.coef * x.y * x.y; break;
          case LogLinearTerm::Kind::field: e += t.coef * (*t.field)(x); break;
          case LogLinearTerm::Kind::banded_field: {
            const double d = (*t.field)(x);
            if (d > t.band_lo && d <= t.band_hi) e += t.coef * d;
            break;
          }
        }
      }
      return std::exp(e);
    }
  }
  throw StateError("unreachable intensity kind");
}

double IntensityModel::upper_bound(const Window& w, const TriangleMesh* probe_mesh) const {
  switch (kind_) {
    case Kind::constant:
      return lambda0_;
    case Kind::piecewise:
      return *std::max_element(values_.begin(), values_.end());
    case Kind::thinned_cluster:
      if (!p_.needs_validation()) return kappa_ * mu_;  // p <= 1 by construction
      break;
    case Kind::log_linear:
      break;
  }
  double m = 0.0;
  const BBox b = w.bbox();
  const int n = 96;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const Vec2 p{b.xmin + b.width() * i / n, b.ymin + b.height() * j / n};
      if (!w.contains(p)) continue;
      m = std::max(m, (*this)(p));
    }
  if (probe_mesh) {
    const auto& rule = TriangleRule::of_order(4);
    for (std::size_t t = 0; t < probe_mesh->triangle_count(); ++t) {
      const auto& tri = probe_mesh->triangles()[t];
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& bc = rule.points[q];
        const Vec2 a = probe_mesh->nodes()[size_t(tri[0])];
        const Vec2 bb = probe_mesh->nodes()[size_t(tri[1])];
        const Vec2 c = probe_mesh->nodes()[size_t(tri[2])];
        m = std::max(m, (*this)({bc[0] * a.x + bc[1] * bb.x + bc[2] * c.x,
                                 bc[0] * a.y + bc[1] * bb.y + bc[2] * c.y}));
      }
    }
  }
  if (!std::isfinite(m)) throw InvalidModelError("intensity upper bound is not finite");
  return 1.2 * m;
}

}  // namespace locint
