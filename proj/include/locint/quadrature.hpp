#pragma once

#include <array>
#include <vector>

namespace locint {

// Quadrature rule on the reference triangle, stored as barycentric points
// with weights normalized to sum to 1 (integral = area * sum w_q f(x_q)).
// All provided rules have strictly positive weights.
struct TriangleRule {
  int order = 0;  // polynomial exactness degree
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }

  // Available orders: 1, 2, 4, 5. Throws InvalidArgumentError otherwise.
  static const TriangleRule& of_order(int p);
};

}  // namespace locint
