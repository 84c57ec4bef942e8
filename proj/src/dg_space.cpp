#include "polymg/dg_space.hpp"

#include <cmath>
#include <cstdio>

namespace polymg {

DGSpace::DGSpace(const PolyMesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
  if (degree < 1 || degree > 8)
    throw std::invalid_argument("DGSpace: degree must be between 1 and 8");
  n_local_ = local_dim(degree);
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) powers_.push_back({a, d - a});

  coef_.reserve(std::size_t(mesh.n_elements()));
  std::vector<double> mono(static_cast<std::size_t>(n_local_));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadratureRule rule = element_rule(mesh, e, 2 * degree + 2);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n_local_, n_local_);
    const Point2 c = mesh.elements[std::size_t(e)].centroid;
    const double hd = 0.5 * mesh.elements[std::size_t(e)].diameter;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double X = (rule.points[q].x - c.x) / hd;
      const double Y = (rule.points[q].y - c.y) / hd;
      for (int k = 0; k < n_local_; ++k)
        mono[std::size_t(k)] =
            std::pow(X, powers_[std::size_t(k)][0]) * std::pow(Y, powers_[std::size_t(k)][1]);
      for (int i = 0; i < n_local_; ++i)
        for (int j = 0; j <= i; ++j)
          mass(i, j) += rule.weights[q] * mono[std::size_t(i)] * mono[std::size_t(j)];
    }
    mass = mass.selfadjointView<Eigen::Lower>();

    // Diagonal scaling before the Cholesky factorization keeps stretched
    // agglomerates well behaved.
    Eigen::VectorXd scale = mass.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd scaled = scale.asDiagonal() * mass * scale.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(scaled);
    if (llt.info() != Eigen::Success)
      throw MeshError("DGSpace: singular local mass matrix on element " + std::to_string(e));
    const Eigen::MatrixXd L = llt.matrixL();
    const double dmax = L.diagonal().maxCoeff();
    const double dmin = L.diagonal().minCoeff();
    if (dmin <= 0.0)
      throw MeshError("DGSpace: singular local mass matrix on element " + std::to_string(e));
    if ((dmax / dmin) * (dmax / dmin) > 1e12)
      std::fprintf(stderr, "DGSpace: warning, ill-conditioned basis on element %d (cond ~ %.1e)\n",
                   e, (dmax / dmin) * (dmax / dmin));
    // phi = L^{-1} S m  with S the diagonal scaling
    Eigen::MatrixXd cob =
        L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(scale.asDiagonal()));
    coef_.push_back(std::move(cob));
  }
}

void DGSpace::eval(int elem, Point2 x, double* vals) const {
  const Point2 c = mesh_->elements[std::size_t(elem)].centroid;
  const double hd = 0.5 * mesh_->elements[std::size_t(elem)].diameter;
  const double X = (x.x - c.x) / hd;
  const double Y = (x.y - c.y) / hd;

  double xp[9], yp[9];
  xp[0] = yp[0] = 1.0;
  for (int k = 1; k <= degree_; ++k) {
    xp[k] = xp[k - 1] * X;
    yp[k] = yp[k - 1] * Y;
  }
  double mono[45];
  for (int k = 0; k < n_local_; ++k)
    mono[k] = xp[powers_[std::size_t(k)][0]] * yp[powers_[std::size_t(k)][1]];

  const Eigen::MatrixXd& cob = coef_[std::size_t(elem)];
  for (int i = 0; i < n_local_; ++i) {
    double s = 0.0;
    for (int k = 0; k <= i; ++k) s += cob(i, k) * mono[k];
    vals[i] = s;
  }
}

void DGSpace::eval_grad(int elem, Point2 x, double* gx, double* gy) const {
  const Point2 c = mesh_->elements[std::size_t(elem)].centroid;
  const double hd = 0.5 * mesh_->elements[std::size_t(elem)].diameter;
  const double X = (x.x - c.x) / hd;
  const double Y = (x.y - c.y) / hd;

  double xp[9], yp[9];
  xp[0] = yp[0] = 1.0;
  for (int k = 1; k <= degree_; ++k) {
    xp[k] = xp[k - 1] * X;
    yp[k] = yp[k - 1] * Y;
  }
  double mx[45], my[45];
  for (int k = 0; k < n_local_; ++k) {
    const int a = powers_[std::size_t(k)][0];
    const int b = powers_[std::size_t(k)][1];
    mx[k] = a > 0 ? double(a) * xp[a - 1] * yp[b] / hd : 0.0;
    my[k] = b > 0 ? double(b) * xp[a] * yp[b - 1] / hd : 0.0;
  }
  const Eigen::MatrixXd& cob = coef_[std::size_t(elem)];
  for (int i = 0; i < n_local_; ++i) {
    double sx = 0.0, sy = 0.0;
    for (int k = 0; k <= i; ++k) {
      sx += cob(i, k) * mx[k];
      sy += cob(i, k) * my[k];
    }
    gx[i] = sx;
    gy[i] = sy;
  }
}

double DGSpace::value(int elem, Point2 x, const double* coeffs) const {
  double vals[45];
  eval(elem, x, vals);
  double s = 0.0;
  for (int i = 0; i < n_local_; ++i) s += coeffs[i] * vals[i];
  return s;
}

DGSpace build_space(const PolyMesh& mesh, int degree) { return DGSpace(mesh, degree); }

}  // namespace polymg
