#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "locint/mesh.hpp"
#include "locint/quadrature.hpp"

namespace locint {

using ScalarField = std::function<double(Vec2)>;

// Mass matrix M_ij = ∫ φ_i φ_j over the mesh (exact per-triangle formula).
Eigen::SparseMatrix<double> mass_matrix(const TriangleMesh& mesh);

// Load vector (∫ f φ_i)_i by per-triangle quadrature. Throws NumericError
// naming the quadrature point when f evaluates non-finite.
Eigen::VectorXd integrate_basis(const TriangleMesh& mesh, const ScalarField& f,
                                const TriangleRule& rule);

// ∫ f over the mesh with the given rule.
double integrate(const TriangleMesh& mesh, const ScalarField& f, const TriangleRule& rule);

}  // namespace locint
