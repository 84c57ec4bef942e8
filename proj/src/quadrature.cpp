#include "polymg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "polymg/mesh.hpp"

namespace polymg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(std::size_t(n), 0.0);
  weights.assign(std::size_t(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[std::size_t(i)] = -x;
    nodes[std::size_t(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[std::size_t(i)] = w;
    weights[std::size_t(n - 1 - i)] = w;
  }
}

QuadratureRule reference_triangle_rule(int order) {
  // Duffy map of [0,1]^2: (u,v) -> (u(1-v), v), Jacobian (1-v). A monomial
  // x^a y^b with a+b <= order becomes degree <= order in u and <= order+1
  // in v, so the tensor Gauss rule below is exact.
  const int nu = (order + 2) / 2;
  const int nv = (order + 3) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);

  QuadratureRule rule;
  rule.points.reserve(std::size_t(nu * nv));
  rule.weights.reserve(std::size_t(nu * nv));
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (xu[std::size_t(i)] + 1.0);
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (xv[std::size_t(j)] + 1.0);
      const double w = 0.25 * wu[std::size_t(i)] * wv[std::size_t(j)] * (1.0 - v);
      rule.points.push_back({u * (1.0 - v), v});
      rule.weights.push_back(w);
    }
  }
  return rule;
}

QuadratureRule element_rule(const PolyMesh& mesh, int elem, int order) {
  if (order < 1) throw std::invalid_argument("element_rule: order must be >= 1");
  if (order > 20) throw std::invalid_argument("element_rule: order > 20 unsupported");
  const QuadratureRule ref = reference_triangle_rule(order);
  QuadratureRule rule;
  const auto& tris = mesh.sub_tri[std::size_t(elem)];
  rule.points.reserve(ref.size() * tris.size());
  rule.weights.reserve(ref.size() * tris.size());
  for (const Tri& t : tris) {
    const Point2 p0 = mesh.vertex(t[0]);
    const Point2 p1 = mesh.vertex(t[1]);
    const Point2 p2 = mesh.vertex(t[2]);
    const double jac = cross(p1 - p0, p2 - p0);  // 2*|T|, positive for CCW
    for (std::size_t q = 0; q < ref.size(); ++q) {
      const Point2 r = ref.points[q];
      rule.points.push_back(p0 + r.x * (p1 - p0) + r.y * (p2 - p0));
      rule.weights.push_back(ref.weights[q] * jac);
    }
  }
  return rule;
}

QuadratureRule segment_rule(Point2 a, Point2 b, int order) {
  if (order < 1) throw std::invalid_argument("segment_rule: order must be >= 1");
  const int n = (order + 2) / 2;  // ceil((order+1)/2)
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double len = dist(a, b);
  QuadratureRule rule;
  rule.points.reserve(static_cast<std::size_t>(n));
  rule.weights.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (x[std::size_t(i)] + 1.0);
    rule.points.push_back(a + s * (b - a));
    rule.weights.push_back(0.5 * len * w[std::size_t(i)]);
  }
  return rule;
}

QuadratureRule face_rule(const PolyMesh& mesh, int face, int order) {
  const Face& f = mesh.faces[std::size_t(face)];
  return segment_rule(mesh.vertex(f.endpoint_ids[0]), mesh.vertex(f.endpoint_ids[1]), order);
}

}  // namespace polymg
