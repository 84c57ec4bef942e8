#include "polymg/transfer.hpp"

namespace polymg {

namespace {

TransferPair pair_from_prolongation(SparseOperator p) {
  TransferPair t;
  t.restriction = p.transposed();
  t.prolongation = std::move(p);
  return t;
}

}  // namespace

TransferPair prolongation_matrix(const DGSpace& coarse, const DGSpace& fine,
                                 const Agglomeration& map) {
  const PolyMesh& fmesh = fine.mesh();
  if (int(map.fine_to_coarse.size()) != fmesh.n_elements() ||
      map.coarse_count != coarse.mesh().n_elements())
    throw std::invalid_argument("prolongation_matrix: map does not link the two spaces");
  if (coarse.degree() != fine.degree())
    throw std::invalid_argument("prolongation_matrix: spaces must share the degree");

  const int nl = fine.n_local();
  const int order = 2 * fine.degree() + 2;
  std::vector<std::tuple<int, int, double>> triplets;
  triplets.reserve(std::size_t(fmesh.n_elements() * nl * nl));
  std::vector<double> vf(static_cast<std::size_t>(nl)), vc(static_cast<std::size_t>(nl));
  std::vector<double> block(std::size_t(nl * nl));

  for (int e = 0; e < fmesh.n_elements(); ++e) {
    const int g = map.fine_to_coarse[std::size_t(e)];
    const QuadratureRule rule = element_rule(fmesh, e, order);
    std::fill(block.begin(), block.end(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      fine.eval(e, rule.points[q], vf.data());
      coarse.eval(g, rule.points[q], vc.data());
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j)
          block[std::size_t(i * nl + j)] += rule.weights[q] * vf[std::size_t(i)] * vc[std::size_t(j)];
    }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        triplets.emplace_back(fine.dof_offset(e) + i, coarse.dof_offset(g) + j,
                              block[std::size_t(i * nl + j)]);
  }
  return pair_from_prolongation(
      from_triplets(fine.dimension(), coarse.dimension(), std::move(triplets)));
}

TransferPair p_embedding(const DGSpace& low, const DGSpace& high) {
  if (&low.mesh() != &high.mesh())
    throw std::invalid_argument("p_embedding: spaces must share the mesh");
  if (low.degree() > high.degree())
    throw std::invalid_argument("p_embedding: low degree exceeds high degree");

  const PolyMesh& mesh = low.mesh();
  const int nh = high.n_local();
  const int nlo = low.n_local();
  const int order = 2 * high.degree() + 2;
  std::vector<std::tuple<int, int, double>> triplets;
  std::vector<double> vh(static_cast<std::size_t>(nh)), vl(static_cast<std::size_t>(nlo));
  std::vector<double> block(std::size_t(nh * nlo));

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadratureRule rule = element_rule(mesh, e, order);
    std::fill(block.begin(), block.end(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      high.eval(e, rule.points[q], vh.data());
      low.eval(e, rule.points[q], vl.data());
      for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nlo; ++j)
          block[std::size_t(i * nlo + j)] += rule.weights[q] * vh[std::size_t(i)] * vl[std::size_t(j)];
    }
    for (int i = 0; i < nh; ++i)
      for (int j = 0; j < nlo; ++j)
        triplets.emplace_back(high.dof_offset(e) + i, low.dof_offset(e) + j,
                              block[std::size_t(i * nlo + j)]);
  }
  return pair_from_prolongation(
      from_triplets(high.dimension(), low.dimension(), std::move(triplets)));
}

}  // namespace polymg
