#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polymg/dg_space.hpp"
#include "polymg/hierarchy.hpp"
#include "polymg/rng.hpp"

using namespace polymg;

namespace {

// Local mass matrix recomputed from scratch; should be the identity.
double mass_identity_defect(const DGSpace& space, int elem) {
  const int nl = space.n_local();
  const QuadratureRule rule = element_rule(space.mesh(), elem, 2 * space.degree() + 2);
  std::vector<double> vals(static_cast<std::size_t>(nl));
  std::vector<double> mass(std::size_t(nl * nl), 0.0);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    space.eval(elem, rule.points[q], vals.data());
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        mass[std::size_t(i * nl + j)] += rule.weights[q] * vals[std::size_t(i)] * vals[std::size_t(j)];
  }
  double defect = 0.0;
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      defect = std::max(defect,
                        std::abs(mass[std::size_t(i * nl + j)] - (i == j ? 1.0 : 0.0)));
  return defect;
}

}  // namespace

TEST_SUITE("dgspace") {

TEST_CASE("dimensions") {
  const PolyMesh m = generate_structured_triangular(16);  // 512 elements
  const DGSpace s1(m, 1);
  CHECK(s1.dimension() == 1536);
  CHECK(DGSpace::local_dim(3) == 10);
  CHECK_THROWS(DGSpace(m, 0));
  CHECK_THROWS(DGSpace(m, 9));
}

TEST_CASE("orthonormal basis on convex and agglomerated elements") {
  const PolyMesh fine = generate_voronoi_lloyd(64, 10, 5);
  for (int p : {1, 2, 4}) {
    const DGSpace space(fine, p);
    for (int e = 0; e < fine.n_elements(); e += 7)
      CHECK(mass_identity_defect(space, e) <= 1e-10);
  }

  // non-convex agglomerates
  Agglomeration map = agglomerate(fine, 4.0, 0);
  const PolyMesh coarse = coarsen_mesh(fine, map);
  const DGSpace cspace(coarse, 3);
  for (int e = 0; e < coarse.n_elements(); ++e) CHECK(mass_identity_defect(cspace, e) <= 1e-10);
}

TEST_CASE("analytic gradients match central differences") {
  const PolyMesh m = generate_voronoi_lloyd(32, 10, 9);
  const DGSpace space(m, 3);
  const int nl = space.n_local();
  std::vector<double> gx(static_cast<std::size_t>(nl)), gy(static_cast<std::size_t>(nl));
  std::vector<double> vp(static_cast<std::size_t>(nl)), vm(static_cast<std::size_t>(nl));

  std::mt19937_64 gen(17);
  for (int e = 0; e < m.n_elements(); e += 3) {
    const Point2 c = m.elements[std::size_t(e)].centroid;
    const double step = 1e-6 * m.elements[std::size_t(e)].diameter;
    // points near the centroid stay inside the element
    for (int trial = 0; trial < 3; ++trial) {
      const Point2 x{c.x + 0.05 * (uniform01(gen) - 0.5), c.y + 0.05 * (uniform01(gen) - 0.5)};
      space.eval_grad(e, x, gx.data(), gy.data());
      space.eval(e, {x.x + step, x.y}, vp.data());
      space.eval(e, {x.x - step, x.y}, vm.data());
      for (int i = 0; i < nl; ++i) {
        const double fd = (vp[std::size_t(i)] - vm[std::size_t(i)]) / (2 * step);
        const double scale = std::max(1.0, std::abs(gx[std::size_t(i)]));
        CHECK(std::abs(fd - gx[std::size_t(i)]) <= 1e-5 * scale);
      }
      space.eval(e, {x.x, x.y + step}, vp.data());
      space.eval(e, {x.x, x.y - step}, vm.data());
      for (int i = 0; i < nl; ++i) {
        const double fd = (vp[std::size_t(i)] - vm[std::size_t(i)]) / (2 * step);
        const double scale = std::max(1.0, std::abs(gy[std::size_t(i)]));
        CHECK(std::abs(fd - gy[std::size_t(i)]) <= 1e-5 * scale);
      }
    }
  }
}

TEST_CASE("face trace products against a higher-order rule") {
  const PolyMesh m = generate_voronoi_lloyd(24, 8, 13);
  const int p = 3;
  const DGSpace space(m, p);
  const int nl = space.n_local();
  std::vector<double> va(static_cast<std::size_t>(nl)), vb(static_cast<std::size_t>(nl));

  for (int fi = 0; fi < int(m.faces.size()); fi += 5) {
    const Face& face = m.faces[std::size_t(fi)];
    const int e = face.element_plus;
    const QuadratureRule work = face_rule(m, fi, 2 * p);
    const QuadratureRule ref = face_rule(m, fi, 2 * p + 6);
    double got = 0.0, want = 0.0;
    for (std::size_t q = 0; q < work.size(); ++q) {
      space.eval(e, work.points[q], va.data());
      got += work.weights[q] * va[2] * va[std::size_t(nl - 1)];
    }
    for (std::size_t q = 0; q < ref.size(); ++q) {
      space.eval(e, ref.points[q], vb.data());
      want += ref.weights[q] * vb[2] * vb[std::size_t(nl - 1)];
    }
    CHECK(std::abs(got - want) <= 1e-13 * std::max(1.0, std::abs(want)));
  }
}

}  // TEST_SUITE
