#include "locint/paircorr.hpp"

#include <algorithm>
#include <cmath>

#include "locint/errors.hpp"

namespace locint {

PairCorrelationModel PairCorrelationModel::poisson() {
  PairCorrelationModel m;
  m.family_ = Family::poisson;
  return m;
}

PairCorrelationModel PairCorrelationModel::matern(double parent_intensity, double cluster_radius) {
  if (!(parent_intensity > 0) || !(cluster_radius > 0))
    throw InvalidModelError("matern pcf needs positive parameters");
  PairCorrelationModel m;
  m.family_ = Family::matern;
  m.params_ = {parent_intensity, cluster_radius};
  return m;
}

PairCorrelationModel PairCorrelationModel::exp_plus_one(double a3, double a4) {
  if (!(a3 > 0) || !(a4 > 0)) throw InvalidModelError("exponential pcf needs positive parameters");
  PairCorrelationModel m;
  m.family_ = Family::exp_plus_one;
  m.params_ = {a3, a4};
  return m;
}

PairCorrelationModel PairCorrelationModel::exp_scaled(double a1, double a2) {
  if (!(a1 > 0) || !(a2 > 0)) throw InvalidModelError("exponential pcf needs positive parameters");
  PairCorrelationModel m;
  m.family_ = Family::exp_scaled;
  m.params_ = {a1, a2};
  return m;
}

PairCorrelationModel PairCorrelationModel::empirical(std::vector<double> r, std::vector<double> g,
                                                     double bias_flag_below) {
  if (r.size() != g.size() || r.size() < 2)
    throw InvalidModelError("empirical pcf needs matching r and g tables with >= 2 knots");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0) || (i > 0 && !(r[i] > r[i - 1])))
      throw InvalidModelError("empirical pcf knots must be positive and strictly increasing");
    if (!std::isfinite(g[i]) || g[i] < 0)
      throw InvalidModelError("empirical pcf values must be finite and non-negative");
  }
  PairCorrelationModel m;
  m.family_ = Family::empirical;
  m.r_ = std::move(r);
  m.g_ = std::move(g);
  m.bias_flag_below_ = bias_flag_below;
  return m;
}

double PairCorrelationModel::operator()(double r) const {
  if (!(r >= 0)) throw InvalidArgumentError("pcf evaluated at negative distance");
  switch (family_) {
    case Family::poisson:
      return 1.0;
    case Family::matern: {
      const double a1 = params_[0], a2 = params_[1];
      if (r >= 2 * a2) return 1.0;
      const double u = r / (2 * a2);
      return 1.0 + 2.0 / (a1 * M_PI * M_PI * a2 * a2) *
                       (std::acos(u) - u * std::sqrt(std::max(0.0, 1 - u * u)));
    }
    case Family::exp_plus_one:
      return 1.0 + std::exp(-params_[1] * std::sqrt(r)) / params_[0];
    case Family::exp_scaled:
      return std::exp(-params_[1] * std::sqrt(r)) / params_[0];
    case Family::empirical: {
      if (r <= r_.front()) return g_.front();
      if (r >= r_.back()) return 1.0;
      const auto it = std::upper_bound(r_.begin(), r_.end(), r);
      const std::size_t i = std::size_t(it - r_.begin()) - 1;
      const double t = (r - r_[i]) / (r_[i + 1] - r_[i]);
      return (1 - t) * g_[i] + t * g_[i + 1];
    }
  }
  throw StateError("unreachable pcf family");
}

double PairCorrelationModel::support_radius() const {
  switch (family_) {
    case Family::poisson: return 0.0;
    case Family::matern: return 2 * params_[1];
    case Family::empirical: return r_.back();
    case Family::exp_plus_one:
    case Family::exp_scaled: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

std::string PairCorrelationModel::family_name() const {
  switch (family_) {
    case Family::poisson: return "poisson";
    case Family::matern: return "matern";
    case Family::exp_plus_one: return "exp_plus_one";
    case Family::exp_scaled: return "exp_scaled";
    case Family::empirical: return "empirical";
  }
  return "?";
}

}  // namespace locint
