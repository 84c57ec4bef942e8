#pragma once

#include <vector>

#include "polymg/geometry.hpp"

namespace polymg {

struct PolyMesh;

/// Point set with positive weights; weights sum to the measure of the
/// integration domain.
struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre nodes/weights on [-1,1], exact for degree 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule on the reference triangle (0,0),(1,0),(0,1), exact for total degree
/// <= order. Weights sum to 1/2.
QuadratureRule reference_triangle_rule(int order);

/// Rule over element `elem` of `mesh`, assembled from its sub-triangulation.
/// Exact for bivariate polynomials of total degree <= order. Orders above 20
/// are rejected.
QuadratureRule element_rule(const PolyMesh& mesh, int elem, int order);

/// Rule over the segment a-b, exact for univariate polynomials of degree
/// <= order along the segment. Weights sum to |b-a|.
QuadratureRule segment_rule(Point2 a, Point2 b, int order);

/// Rule over face `face` of `mesh`.
QuadratureRule face_rule(const PolyMesh& mesh, int face, int order);

}  // namespace polymg
