#pragma once

#include <limits>
#include <string>
#include <vector>

namespace locint {

// Second-order moment model g(r), isotropic.
class PairCorrelationModel {
 public:
  enum class Family { poisson, matern, exp_plus_one, exp_scaled, empirical };

  static PairCorrelationModel poisson();
  // Matern cluster pcf: 1 + 2/(a1 pi^2 a2^2) (arccos(u) - u sqrt(1-u^2)),
  // u = r/(2 a2), for r < 2 a2; exactly 1 beyond.
  static PairCorrelationModel matern(double parent_intensity, double cluster_radius);
  // 1 + (1/a3) exp(-a4 sqrt(r))
  static PairCorrelationModel exp_plus_one(double a3, double a4);
  // exp(-a2 sqrt(r)) / a1, the literal scaled form (violates g -> 1)
  static PairCorrelationModel exp_scaled(double a1, double a2);
  // tabulated values, linear interpolation, g = 1 beyond the last knot;
  // bias_flag_below marks knots with r < that threshold as smoothing-biased
  static PairCorrelationModel empirical(std::vector<double> r, std::vector<double> g,
                                        double bias_flag_below = 0.0);

  double operator()(double r) const;
  // radius beyond which g(r) - 1 vanishes identically (inf when it never does)
  double support_radius() const;

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& knots_r() const { return r_; }
  const std::vector<double>& knots_g() const { return g_; }
  double bias_flag_below() const { return bias_flag_below_; }
  std::string family_name() const;

 private:
  PairCorrelationModel() = default;
  Family family_ = Family::poisson;
  std::vector<double> params_;
  std::vector<double> r_, g_;
  double bias_flag_below_ = 0.0;
};

}  // namespace locint
