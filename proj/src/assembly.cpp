#include "polymg/assembly.hpp"

#include <cmath>

namespace polymg {

double penalty_sigma(const PolyMesh& mesh, const Face& face, const PenaltyParams& params) {
  const double p2 = double(params.degree) * double(params.degree);
  double inv_h = 1.0 / mesh.elements[std::size_t(face.element_plus)].diameter;
  if (!face.is_boundary())
    inv_h = std::max(inv_h, 1.0 / mesh.elements[std::size_t(face.element_minus)].diameter);
  return params.c_sigma * p2 * inv_h;
}

namespace {

// Shared assembler for the stiffness matrix and the DG-norm Gram matrix;
// they differ only in the symmetrized consistency terms.
SparseOperator assemble_bilinear(const DGSpace& space, const PenaltyParams& params,
                                 bool with_consistency) {
  const PolyMesh& mesh = space.mesh();
  if (params.degree != space.degree())
    throw std::invalid_argument("assembly: penalty degree does not match the space");
  const int nl = space.n_local();
  const int quad_order = 2 * space.degree() + 2;

  BlockMatrixBuilder builder(element_adjacency(mesh), nl);
  std::vector<double> local(std::size_t(nl * nl));
  std::vector<double> gx(static_cast<std::size_t>(nl)), gy(static_cast<std::size_t>(nl));

  // volume term
  for (int e = 0; e < mesh.n_elements(); ++e) {
    std::fill(local.begin(), local.end(), 0.0);
    const QuadratureRule rule = element_rule(mesh, e, quad_order);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval_grad(e, rule.points[q], gx.data(), gy.data());
      const double w = rule.weights[q];
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j)
          local[std::size_t(i * nl + j)] +=
              w * (gx[std::size_t(i)] * gx[std::size_t(j)] + gy[std::size_t(i)] * gy[std::size_t(j)]);
    }
    builder.add_block(e, e, local);
  }

  // face terms
  std::vector<double> vp(static_cast<std::size_t>(nl)), vm(static_cast<std::size_t>(nl));
  std::vector<double> dnp(static_cast<std::size_t>(nl)), dnm(static_cast<std::size_t>(nl));
  std::vector<double> bpp(std::size_t(nl * nl)), bpm(std::size_t(nl * nl)),
      bmp(std::size_t(nl * nl)), bmm(std::size_t(nl * nl));
  for (int fi = 0; fi < int(mesh.faces.size()); ++fi) {
    const Face& face = mesh.faces[std::size_t(fi)];
    const double sigma = penalty_sigma(mesh, face, params);
    const QuadratureRule rule = face_rule(mesh, fi, quad_order);
    const int ep = face.element_plus;

    if (face.is_boundary()) {
      std::fill(bpp.begin(), bpp.end(), 0.0);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q];
        space.eval(ep, rule.points[q], vp.data());
        space.eval_grad(ep, rule.points[q], gx.data(), gy.data());
        for (int i = 0; i < nl; ++i)
          dnp[std::size_t(i)] =
              face.normal.x * gx[std::size_t(i)] + face.normal.y * gy[std::size_t(i)];
        for (int i = 0; i < nl; ++i)
          for (int j = 0; j < nl; ++j) {
            double v = sigma * vp[std::size_t(i)] * vp[std::size_t(j)];
            if (with_consistency)
              v -= dnp[std::size_t(j)] * vp[std::size_t(i)] + dnp[std::size_t(i)] * vp[std::size_t(j)];
            bpp[std::size_t(i * nl + j)] += w * v;
          }
      }
      builder.add_block(ep, ep, bpp);
      continue;
    }

    const int em = face.element_minus;
    std::fill(bpp.begin(), bpp.end(), 0.0);
    std::fill(bpm.begin(), bpm.end(), 0.0);
    std::fill(bmp.begin(), bmp.end(), 0.0);
    std::fill(bmm.begin(), bmm.end(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q];
      space.eval(ep, rule.points[q], vp.data());
      space.eval(em, rule.points[q], vm.data());
      space.eval_grad(ep, rule.points[q], gx.data(), gy.data());
      for (int i = 0; i < nl; ++i)
        dnp[std::size_t(i)] =
            face.normal.x * gx[std::size_t(i)] + face.normal.y * gy[std::size_t(i)];
      space.eval_grad(em, rule.points[q], gx.data(), gy.data());
      for (int i = 0; i < nl; ++i)
        dnm[std::size_t(i)] =
            face.normal.x * gx[std::size_t(i)] + face.normal.y * gy[std::size_t(i)];

      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) {
          double pp = sigma * vp[std::size_t(i)] * vp[std::size_t(j)];
          double pm = -sigma * vp[std::size_t(i)] * vm[std::size_t(j)];
          double mp = -sigma * vm[std::size_t(i)] * vp[std::size_t(j)];
          double mm = sigma * vm[std::size_t(i)] * vm[std::size_t(j)];
          if (with_consistency) {
            pp += -0.5 * dnp[std::size_t(j)] * vp[std::size_t(i)] -
                  0.5 * dnp[std::size_t(i)] * vp[std::size_t(j)];
            pm += -0.5 * dnm[std::size_t(j)] * vp[std::size_t(i)] +
                  0.5 * dnp[std::size_t(i)] * vm[std::size_t(j)];
            mp += 0.5 * dnp[std::size_t(j)] * vm[std::size_t(i)] -
                  0.5 * dnm[std::size_t(i)] * vp[std::size_t(j)];
            mm += 0.5 * dnm[std::size_t(j)] * vm[std::size_t(i)] +
                  0.5 * dnm[std::size_t(i)] * vm[std::size_t(j)];
          }
          bpp[std::size_t(i * nl + j)] += w * pp;
          bpm[std::size_t(i * nl + j)] += w * pm;
          bmp[std::size_t(i * nl + j)] += w * mp;
          bmm[std::size_t(i * nl + j)] += w * mm;
        }
    }
    builder.add_block(ep, ep, bpp);
    builder.add_block(ep, em, bpm);
    builder.add_block(em, ep, bmp);
    builder.add_block(em, em, bmm);
  }
  return builder.take(true);
}

}  // namespace

SparseOperator assemble_sipg(const DGSpace& space, const PenaltyParams& params) {
  return assemble_bilinear(space, params, true);
}

SparseOperator dg_norm_gram(const DGSpace& space, const PenaltyParams& params) {
  return assemble_bilinear(space, params, false);
}

std::vector<double> assemble_load(const DGSpace& space, const std::function<double(Point2)>& f) {
  const PolyMesh& mesh = space.mesh();
  const int nl = space.n_local();
  std::vector<double> b(std::size_t(space.dimension()), 0.0);
  std::vector<double> vals(static_cast<std::size_t>(nl));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadratureRule rule = space.volume_rule(e);
    double* be = b.data() + space.dof_offset(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wf = rule.weights[q] * f(rule.points[q]);
      space.eval(e, rule.points[q], vals.data());
      for (int i = 0; i < nl; ++i) be[i] += wf * vals[std::size_t(i)];
    }
  }
  return b;
}

}  // namespace polymg
