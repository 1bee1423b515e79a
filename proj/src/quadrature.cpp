#include "locint/quadrature.hpp"

#include "locint/errors.hpp"

namespace locint {
namespace {

TriangleRule make_order1() {
  TriangleRule r;
  r.order = 1;
  r.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  r.weights = {1.0};
  return r;
}

TriangleRule make_order2() {
  TriangleRule r;
  r.order = 2;
  const double a = 2.0 / 3.0, b = 1.0 / 6.0;
  r.points = {{a, b, b}, {b, a, b}, {b, b, a}};
  r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return r;
}

void push_sym3(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  r.weights.insert(r.weights.end(), 3, w);
}

// Strang-Fix 6-point rule, degree 4.
TriangleRule make_order4() {
  TriangleRule r;
  r.order = 4;
  push_sym3(r, 0.091576213509771, 0.109951743655322);
  push_sym3(r, 0.445948490915965, 0.223381589678011);
  return r;
}

// Classic 7-point rule, degree 5.
TriangleRule make_order5() {
  TriangleRule r;
  r.order = 5;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.225);
  push_sym3(r, 0.101286507323456, 0.125939180544827);
  push_sym3(r, 0.470142064105115, 0.132394152788506);
  return r;
}

}  // namespace

const TriangleRule& TriangleRule::of_order(int p) {
  static const TriangleRule r1 = make_order1();
  static const TriangleRule r2 = make_order2();
  static const TriangleRule r4 = make_order4();
  static const TriangleRule r5 = make_order5();
  switch (p) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r4;  // no positive-weight degree-3 rule; use degree 4
    case 4: return r4;
    case 5: return r5;
    default:
      throw InvalidArgumentError("no triangle quadrature rule of order " + std::to_string(p));
  }
}

}  // namespace locint
