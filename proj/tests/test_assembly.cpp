#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "polymg/analysis.hpp"
#include "polymg/assembly.hpp"
#include "polymg/rng.hpp"

using namespace polymg;

namespace {

// L2 projection of a callable onto the space (exact for polynomials of
// degree <= p).
std::vector<double> project(const DGSpace& space, double (*f)(Point2)) {
  std::vector<double> c(static_cast<std::size_t>(space.dimension()), 0.0);
  const int nl = space.n_local();
  std::vector<double> vals(static_cast<std::size_t>(nl));
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    const QuadratureRule rule = space.volume_rule(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.eval(e, rule.points[q], vals.data());
      const double w = rule.weights[q] * f(rule.points[q]);
      for (int i = 0; i < nl; ++i) c[std::size_t(space.dof_offset(e) + i)] += w * vals[std::size_t(i)];
    }
  }
  return c;
}

double max_abs(const SparseOperator& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("penalty function values") {
  PolyMesh mesh;
  mesh.vertices = {{0, 0}, {1, 0}};
  mesh.elements.resize(2);
  mesh.elements[0].diameter = 0.1;
  mesh.elements[1].diameter = 0.2;
  Face interior;
  interior.element_plus = 0;
  interior.element_minus = 1;
  Face boundary;
  boundary.element_plus = 0;

  CHECK(penalty_sigma(mesh, interior, {10.0, 2}) == doctest::Approx(400.0));
  CHECK(penalty_sigma(mesh, boundary, {10.0, 1}) == doctest::Approx(100.0));

  // swap of the two sides
  Face swapped;
  swapped.element_plus = 1;
  swapped.element_minus = 0;
  CHECK(penalty_sigma(mesh, interior, {10.0, 3}) == penalty_sigma(mesh, swapped, {10.0, 3}));

  mesh.elements[1].diameter = 0.1;
  CHECK(penalty_sigma(mesh, interior, {10.0, 1}) == doctest::Approx(100.0));
}

TEST_CASE("single square element: penalty-only entry of the constant mode") {
  const PolyMesh sq = build_polymesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
  const DGSpace space(sq, 1);
  const PenaltyParams params{10.0, 1};

  // gradient of the constant mode vanishes: only sigma * perimeter remains,
  // with sigma = 10 / sqrt(2) from the diagonal h
  const double expected = 10.0 / std::sqrt(2.0) * 4.0;

  const SparseOperator a = assemble_sipg(space, params);
  CHECK(std::abs(a.entry(0, 0) - expected) <= 1e-10);

  const SparseOperator g = dg_norm_gram(space, params);
  CHECK(std::abs(g.entry(0, 0) - expected) <= 1e-10);
}

TEST_CASE("symmetry on polygonal meshes") {
  const PolyMesh m = generate_voronoi_lloyd(96, 10, 21);
  for (int p : {1, 2}) {
    const DGSpace space(m, p);
    const SparseOperator a = assemble_sipg(space, {10.0, p});
    CHECK(a.symmetry_defect() <= 1e-12 * max_abs(a));
  }
}

TEST_CASE("continuous linear function: no interior jump energy") {
  const PolyMesh m = generate_voronoi_lloyd(48, 10, 23);
  const int p = 2;
  const DGSpace space(m, p);
  const PenaltyParams params{10.0, p};
  const SparseOperator a = assemble_sipg(space, params);

  const std::vector<double> v = project(space, [](Point2 x) { return x.x + x.y; });

  // direct trace sampling of the jumps
  for (int fi = 0; fi < int(m.faces.size()); ++fi) {
    const Face& f = m.faces[std::size_t(fi)];
    if (f.is_boundary()) continue;
    const QuadratureRule rule = face_rule(m, fi, 4);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double jump =
          space.value(f.element_plus, rule.points[q], v.data() + space.dof_offset(f.element_plus)) -
          space.value(f.element_minus, rule.points[q],
                      v.data() + space.dof_offset(f.element_minus));
      CHECK(std::abs(jump) <= 1e-11);
    }
  }

  // a(v,v) equals the gradient energy plus boundary-face terms
  const std::vector<double> av = a.apply(v);
  const double quadratic = dot(v, av);
  double expected = 2.0;  // integral of |grad(x+y)|^2 over the unit square
  for (int fi = 0; fi < int(m.faces.size()); ++fi) {
    const Face& f = m.faces[std::size_t(fi)];
    if (!f.is_boundary()) continue;
    const double sigma = penalty_sigma(m, f, params);
    const QuadratureRule rule = face_rule(m, fi, 4);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double val = rule.points[q].x + rule.points[q].y;
      const double dn = f.normal.x + f.normal.y;  // n . grad(x+y)
      expected += rule.weights[q] * (sigma * val * val - 2.0 * val * dn);
    }
  }
  CHECK(std::abs(quadratic - expected) <= 1e-11 * std::abs(expected));
}

TEST_CASE("load vector") {
  const PolyMesh m = generate_voronoi_lloyd(32, 10, 29);
  const int p = 2;
  const DGSpace space(m, p);

  SUBCASE("zero field") {
    const std::vector<double> b = assemble_load(space, [](Point2) { return 0.0; });
    for (double x : b) CHECK(x == 0.0);
  }

  SUBCASE("unit field pairs to one against itself") {
    const std::vector<double> b = assemble_load(space, [](Point2) { return 1.0; });
    CHECK(std::abs(dot(b, b) - 1.0) <= 1e-12);
  }

  SUBCASE("manufactured right-hand side against a high-order rule") {
    // at this degree and resolution the 2p+2 rule resolves the sine load
    // to well below 1e-9 relative
    const PolyMesh fine = generate_structured_triangular(16);
    const DGSpace fspace(fine, 3);
    const std::vector<double> b = assemble_load(fspace, manufactured_f);
    std::vector<double> oracle(static_cast<std::size_t>(fspace.dimension()), 0.0);
    const int nl = fspace.n_local();
    std::vector<double> vals(static_cast<std::size_t>(nl));
    for (int e = 0; e < fine.n_elements(); ++e) {
      const QuadratureRule rule = element_rule(fine, e, std::min(2 * fspace.degree() + 8, 20));
      for (std::size_t q = 0; q < rule.size(); ++q) {
        fspace.eval(e, rule.points[q], vals.data());
        const double w = rule.weights[q] * manufactured_f(rule.points[q]);
        for (int i = 0; i < nl; ++i)
          oracle[std::size_t(fspace.dof_offset(e) + i)] += w * vals[std::size_t(i)];
      }
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) diff += (b[i] - oracle[i]) * (b[i] - oracle[i]);
    CHECK(std::sqrt(diff) <= 1e-9 * norm2(oracle));
  }
}

TEST_CASE("dg norm gram matrix") {
  const PolyMesh m = generate_voronoi_lloyd(48, 10, 31);
  const int p = 4;
  const DGSpace space(m, p);
  const PenaltyParams params{10.0, p};
  const SparseOperator g = dg_norm_gram(space, params);

  SUBCASE("SPD rayleigh quotients") {
    CHECK(g.symmetry_defect() <= 1e-12 * max_abs(g));
    std::mt19937_64 gen(3);
    std::vector<double> v(static_cast<std::size_t>(g.rows));
    for (int trial = 0; trial < 100; ++trial) {
      for (double& x : v) x = uniform01(gen) - 0.5;
      const std::vector<double> gv = g.apply(v);
      CHECK(dot(v, gv) > 0.0);
    }
  }

  SUBCASE("gradient energy of a conforming bubble") {
    // v = x(1-x)y(1-y) is degree 4, continuous and zero on the boundary, so
    // only the broken gradient contributes; the exact energy is 1/45
    const std::vector<double> v =
        project(space, [](Point2 x) { return x.x * (1 - x.x) * x.y * (1 - x.y); });
    const std::vector<double> gv = g.apply(v);
    CHECK(std::abs(dot(v, gv) - 1.0 / 45.0) <= 1e-11);
  }
}

TEST_CASE("coercivity of the stiffness matrix at C_sigma = 10") {
  const PolyMesh m = generate_voronoi_lloyd(64, 10, 37);
  for (int p : {1, 2, 3, 4}) {
    const DGSpace space(m, p);
    const SparseOperator a = assemble_sipg(space, {10.0, p});
    const SparseOperator g = dg_norm_gram(space, {10.0, p});
    const double cmin = coercivity_constant(a, g);
    CHECK(cmin > 0.0);
    const double cmax = continuity_constant(a, g);
    CHECK(cmax <= 10.0);  // recorded loose continuity bound
  }
}

TEST_CASE("matrix market export") {
  namespace fs = std::filesystem;
  const PolyMesh m = generate_structured_triangular(2);
  const DGSpace space(m, 1);
  const SparseOperator a = assemble_sipg(space, {10.0, 1});
  const std::string path = (fs::temp_directory_path() / "polymg_a.mtx").string();
  write_matrix_market(a, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == a.rows);
  CHECK(cols == a.cols);
  CHECK(nnz == a.nnz());
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    CHECK(v == a.entry(i - 1, j - 1));
  }
}

}  // TEST_SUITE
