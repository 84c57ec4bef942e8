#pragma once

#include "polymg/dg_space.hpp"
#include "polymg/hierarchy.hpp"
#include "polymg/sparse.hpp"

namespace polymg {

/// Embedding of a coarse DG space into a fine one and its L2 adjoint.
/// With orthonormal element bases the adjoint is the entrywise transpose.
struct TransferPair {
  SparseOperator prolongation;  // fine_dim x coarse_dim
  SparseOperator restriction;   // coarse_dim x fine_dim, = P^T
};

/// Transfer between two nested meshes (same degree). `map` sends each fine
/// element to its coarse parent. Entries are L2 inner products over the fine
/// element, exact for the polynomial integrands.
TransferPair prolongation_matrix(const DGSpace& coarse, const DGSpace& fine,
                                 const Agglomeration& map);

/// Transfer between two degrees on the same mesh (p_low <= p_high).
TransferPair p_embedding(const DGSpace& low, const DGSpace& high);

}  // namespace polymg
