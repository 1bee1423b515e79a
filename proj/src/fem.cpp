#include "locint/fem.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "locint/errors.hpp"

namespace locint {

Eigen::SparseMatrix<double> mass_matrix(const TriangleMesh& mesh) {
  const auto n = Eigen::Index(mesh.node_count());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangle_count() * 9);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a12 = mesh.triangle_area(t) / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[size_t(i)], tri[size_t(j)], i == j ? 2.0 * a12 : a12);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::VectorXd integrate_basis(const TriangleMesh& mesh, const ScalarField& f,
                                const TriangleRule& rule) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(mesh.node_count()));
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Vec2 a = mesh.nodes()[size_t(tri[0])];
    const Vec2 b = mesh.nodes()[size_t(tri[1])];
    const Vec2 c = mesh.nodes()[size_t(tri[2])];
    const double area = mesh.triangle_area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& bc = rule.points[q];
      const Vec2 p{bc[0] * a.x + bc[1] * b.x + bc[2] * c.x,
                   bc[0] * a.y + bc[1] * b.y + bc[2] * c.y};
      const double v = f(p);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "integrand is not finite at quadrature point (" << p.x << ", " << p.y << ")";
        throw NumericError(os.str());
      }
      const double wv = area * rule.weights[q] * v;
      for (int i = 0; i < 3; ++i) out[tri[size_t(i)]] += wv * bc[size_t(i)];
    }
  }
  return out;
}

double integrate(const TriangleMesh& mesh, const ScalarField& f, const TriangleRule& rule) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Vec2 a = mesh.nodes()[size_t(tri[0])];
    const Vec2 b = mesh.nodes()[size_t(tri[1])];
    const Vec2 c = mesh.nodes()[size_t(tri[2])];
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& bc = rule.points[q];
      acc += rule.weights[q] * f({bc[0] * a.x + bc[1] * b.x + bc[2] * c.x,
                                  bc[0] * a.y + bc[1] * b.y + bc[2] * c.y});
    }
    s += mesh.triangle_area(t) * acc;
  }
  return s;
}

}  // namespace locint
