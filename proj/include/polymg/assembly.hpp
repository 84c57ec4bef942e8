#pragma once

#include <functional>

#include "polymg/dg_space.hpp"
#include "polymg/sparse.hpp"

namespace polymg {

struct PenaltyParams {
  double c_sigma = 10.0;
  int degree = 1;
};

/// Face penalty C_sigma * p^2 * max over the adjacent elements of 1/h.
double penalty_sigma(const PolyMesh& mesh, const Face& face, const PenaltyParams& params);

/// Stiffness matrix of the symmetric interior penalty form: broken gradients,
/// symmetrized consistency terms on faces and the sigma-weighted jump
/// penalty.
SparseOperator assemble_sipg(const DGSpace& space, const PenaltyParams& params);

/// Gram matrix of the DG norm: broken gradients plus the jump penalty
/// (no consistency terms). SPD.
SparseOperator dg_norm_gram(const DGSpace& space, const PenaltyParams& params);

/// Load vector b_i = integral of f * phi_i, element rules of order 2p+2.
std::vector<double> assemble_load(const DGSpace& space,
                                  const std::function<double(Point2)>& f);

}  // namespace polymg
