#pragma once

#include <Eigen/Dense>
#include <vector>

#include "polymg/mesh.hpp"
#include "polymg/quadrature.hpp"

namespace polymg {

/// Discontinuous modal space of total degree p on a polygonal mesh. Each
/// element carries monomials scaled by its centroid and half-diameter,
/// orthonormalized in L2(element), so the local mass matrix is the identity
/// and the L2-adjoint of any embedding is the plain transpose.
class DGSpace {
 public:
  DGSpace(const PolyMesh& mesh, int degree);

  const PolyMesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int n_local() const { return n_local_; }
  int dimension() const { return mesh_->n_elements() * n_local_; }
  int dof_offset(int elem) const { return elem * n_local_; }

  /// Values of the n_local basis functions of `elem` at x.
  void eval(int elem, Point2 x, double* vals) const;
  /// Gradients, layed out as (d/dx, d/dy) per function.
  void eval_grad(int elem, Point2 x, double* gx, double* gy) const;

  /// Pointwise value of a coefficient vector inside `elem`.
  double value(int elem, Point2 x, const double* coeffs) const;

  /// Default volume rule (order 2p+2) for this space on `elem`.
  QuadratureRule volume_rule(int elem) const { return element_rule(*mesh_, elem, 2 * degree_ + 2); }

  static int local_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

 private:
  const PolyMesh* mesh_;
  int degree_;
  int n_local_;
  std::vector<std::array<int, 2>> powers_;     // monomial exponents, fixed order
  std::vector<Eigen::MatrixXd> coef_;          // per element, lower-triangular change of basis
};

DGSpace build_space(const PolyMesh& mesh, int degree);

}  // namespace polymg
