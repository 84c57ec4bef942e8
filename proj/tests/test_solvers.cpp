#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polymg/analysis.hpp"
#include "polymg/rng.hpp"
#include "polymg/solvers.hpp"

using namespace polymg;

namespace {

SparseOperator diagonal(std::vector<double> d) {
  std::vector<std::tuple<int, int, double>> trip;
  for (int i = 0; i < int(d.size()); ++i) trip.emplace_back(i, i, d[std::size_t(i)]);
  return from_triplets(int(d.size()), int(d.size()), std::move(trip), true);
}

MeshHierarchy identical_two_level(const PolyMesh& mesh) {
  MeshHierarchy h;
  h.levels = {mesh, mesh};
  Agglomeration id;
  id.coarse_count = mesh.n_elements();
  for (int e = 0; e < mesh.n_elements(); ++e) id.fine_to_coarse.push_back(e);
  h.maps = {id};
  h.p_per_level = {1, 1};
  return h;
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("spectral bound estimates") {
  CHECK(estimate_lambda(diagonal(std::vector<double>(8, 1.0)), 1.1) ==
        doctest::Approx(1.1).epsilon(1e-3));
  CHECK(estimate_lambda(diagonal({1.0, 2.0, 3.0}), 1.1) == doctest::Approx(3.3).epsilon(3e-3));

  // h-halving on structured triangles: the spectrum grows like 1/h^2
  const PolyMesh m8 = generate_structured_triangular(8);
  const PolyMesh m16 = generate_structured_triangular(16);
  const DGSpace s8(m8, 1), s16(m16, 1);
  const double l8 = estimate_lambda(assemble_sipg(s8, {10.0, 1}), 1.0);
  const double l16 = estimate_lambda(assemble_sipg(s16, {10.0, 1}), 1.0);
  CHECK(l16 / l8 >= 3.4);
  CHECK(l16 / l8 <= 4.6);
}

TEST_CASE("richardson smoothing") {
  SUBCASE("zero sweeps leave the iterate") {
    const SparseOperator a = diagonal({2.0, 3.0});
    std::vector<double> z = {0.5, -0.25};
    const std::vector<double> rhs = {1.0, 1.0};
    richardson_smooth(a, 3.3, rhs, z, 0);
    CHECK(z[0] == 0.5);
    CHECK(z[1] == -0.25);
  }

  SUBCASE("one sweep on a 1x1 system") {
    const SparseOperator a = diagonal({2.0});
    std::vector<double> z = {0.0};
    richardson_smooth(a, 2.2, {{1.0}}, z, 1);
    CHECK(z[0] == doctest::Approx(1.0 / 2.2).epsilon(1e-15));
  }

  SUBCASE("energy non-expansiveness on a DG operator") {
    const PolyMesh m = generate_voronoi_lloyd(48, 10, 51);
    const DGSpace space(m, 2);
    const SparseOperator a = assemble_sipg(space, {10.0, 2});
    const double lambda = estimate_lambda(a, 1.1);

    std::mt19937_64 gen(7);
    const std::vector<double> rhs(std::size_t(a.rows), 0.0);
    for (int m_steps : {1, 3, 8}) {
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> err(static_cast<std::size_t>(a.rows));
        for (double& x : err) x = uniform01(gen) - 0.5;
        const double before = std::sqrt(dot(err, a.apply(err)));
        richardson_smooth(a, lambda, rhs, err, m_steps);  // exact solution is zero
        const double after = std::sqrt(dot(err, a.apply(err)));
        CHECK(after <= before * (1.0 + 1e-10));
      }
    }
  }
}

TEST_CASE("two-level on identical spaces converges in one iteration") {
  const PolyMesh m = generate_voronoi_lloyd(32, 10, 53);
  const MeshHierarchy ident = identical_two_level(m);
  const MGHierarchy h = build_mg_hierarchy(ident, {10.0, 1}, 1.1);
  const DGSpace space(m, 1);
  const std::vector<double> b = assemble_load(space, manufactured_f);

  MultigridConfig cfg;
  cfg.m1 = cfg.m2 = 0;
  std::vector<double> z;
  const SolveReport rep = two_level_solve(h, b, z, cfg);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
}

TEST_CASE("w-cycle with two levels matches the two-level scheme bitwise") {
  const PolyMesh m = generate_voronoi_lloyd(96, 10, 57);
  const MeshHierarchy hier = build_hierarchy(m, 2, 1, 4.0, 0);
  const MGHierarchy h = build_mg_hierarchy(hier, {10.0, 1}, 1.1);
  const DGSpace space(m, 1);
  const std::vector<double> b = assemble_load(space, manufactured_f);

  MultigridConfig cfg;
  cfg.m1 = cfg.m2 = 3;
  std::vector<double> z1, z2;
  const SolveReport tl = two_level_solve(h, b, z1, cfg);
  const SolveReport wc = w_cycle_solve(h, b, z2, cfg);
  CHECK(tl.iterations == wc.iterations);
  REQUIRE(z1.size() == z2.size());
  bool identical = true;
  for (std::size_t i = 0; i < z1.size(); ++i) identical = identical && z1[i] == z2[i];
  CHECK(identical);
  REQUIRE(tl.residual_history.size() == wc.residual_history.size());
  for (std::size_t i = 0; i < tl.residual_history.size(); ++i)
    CHECK(tl.residual_history[i] == wc.residual_history[i]);
}

TEST_CASE("zero right-hand side converges at iteration zero") {
  const PolyMesh m = generate_voronoi_lloyd(32, 5, 59);
  const MeshHierarchy hier = build_hierarchy(m, 2, 1, 4.0, 0);
  const MGHierarchy h = build_mg_hierarchy(hier, {10.0, 1}, 1.1);
  const std::vector<double> b(std::size_t(h.fine().rows), 0.0);
  MultigridConfig cfg;
  std::vector<double> z;
  const SolveReport rep = w_cycle_solve(h, b, z, cfg);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  for (double x : z) CHECK(x == 0.0);
}

TEST_CASE("divergence guard") {
  const PolyMesh m = generate_voronoi_lloyd(32, 5, 61);
  const MeshHierarchy hier = build_hierarchy(m, 2, 1, 4.0, 0);
  MGHierarchy h = build_mg_hierarchy(hier, {10.0, 1}, 1.1);
  h.levels[1].lambda *= 1e-3;  // Richardson now amplifies high modes
  const DGSpace space(m, 1);
  const std::vector<double> b = assemble_load(space, manufactured_f);
  MultigridConfig cfg;
  cfg.m1 = cfg.m2 = 2;
  std::vector<double> z;
  const SolveReport rep = w_cycle_solve(h, b, z, cfg);
  CHECK(rep.diverged);
  CHECK_FALSE(rep.converged);
}

TEST_CASE("monotone iteration counts in the smoothing steps") {
  const PolyMesh m = generate_voronoi_lloyd(64, 15, 63);
  const MeshHierarchy hier = build_hierarchy(m, 2, 1, 4.0, 0);
  const MGHierarchy h = build_mg_hierarchy(hier, {10.0, 1}, 1.1);
  const DGSpace space(m, 1);
  const std::vector<double> b = assemble_load(space, manufactured_f);

  int prev = 1 << 30;
  for (int steps : {3, 8, 20}) {
    MultigridConfig cfg;
    cfg.m1 = cfg.m2 = steps;
    std::vector<double> z;
    const SolveReport rep = two_level_solve(h, b, z, cfg);
    REQUIRE(rep.converged);
    CHECK(rep.iterations <= prev);
    prev = rep.iterations;
  }
}

TEST_CASE("conjugate gradients") {
  SUBCASE("identity in one step") {
    std::vector<double> x;
    const SolveReport rep =
        cg_solve(diagonal(std::vector<double>(5, 1.0)), {{1, 2, 3, 4, 5}}, x, 1e-8, 100);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(x[3] == doctest::Approx(4.0));
  }
  SUBCASE("two distinct eigenvalues in two steps") {
    std::vector<double> x;
    const SolveReport rep = cg_solve(diagonal({1.0, 4.0}), {{1, 1}}, x, 1e-10, 100);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 2);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(0.25));
  }
}

TEST_CASE("block jacobi pcg") {
  SUBCASE("block-diagonal system in one iteration") {
    std::vector<std::tuple<int, int, double>> trip;
    for (int blockStart : {0, 2}) {
      trip.emplace_back(blockStart, blockStart, 4.0);
      trip.emplace_back(blockStart + 1, blockStart + 1, 3.0);
      trip.emplace_back(blockStart, blockStart + 1, 1.0);
      trip.emplace_back(blockStart + 1, blockStart, 1.0);
    }
    const SparseOperator a = from_triplets(4, 4, std::move(trip), true);
    std::vector<double> x;
    const SolveReport rep = pcg_block_jacobi(a, {{1, 2, 3, 4}}, x, 2, 1e-12, 50);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
  }
  SUBCASE("fewer iterations than cg on a DG system") {
    const PolyMesh m = generate_voronoi_lloyd(64, 10, 67);
    const DGSpace space(m, 2);
    const SparseOperator a = assemble_sipg(space, {10.0, 2});
    const std::vector<double> b = assemble_load(space, manufactured_f);
    std::vector<double> x1, x2;
    const SolveReport cg = cg_solve(a, b, x1, 1e-8, 20000);
    const SolveReport pcg = pcg_block_jacobi(a, b, x2, space.n_local(), 1e-8, 20000);
    REQUIRE(cg.converged);
    REQUIRE(pcg.converged);
    CHECK(pcg.iterations <= cg.iterations);
  }
}

TEST_CASE("direct solver") {
  SUBCASE("identity and diagonal") {
    const std::vector<double> x = direct_solve(diagonal({1.0, 1.0, 1.0}), {{3, 2, 1}});
    CHECK(x[0] == doctest::Approx(3.0));
    const std::vector<double> y = direct_solve(diagonal({2.0, 4.0}), {{2, 4}});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
  }

  SUBCASE("random SPD system against a dense factorization oracle") {
    std::mt19937_64 gen(29);
    const int n = 50;
    std::vector<std::vector<double>> dense(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        const double v = 0.3 * (uniform01(gen) - 0.5);
        dense[std::size_t(i)][std::size_t(j)] = v;
        dense[std::size_t(j)][std::size_t(i)] = v;
      }
      dense[std::size_t(i)][std::size_t(i)] = 8.0 + uniform01(gen);
    }
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (double& v : rhs) v = uniform01(gen) - 0.5;

    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (dense[std::size_t(i)][std::size_t(j)] != 0.0)
          trip.emplace_back(i, j, dense[std::size_t(i)][std::size_t(j)]);
    const SparseOperator a = from_triplets(n, n, std::move(trip), true);

    const std::vector<double> x = direct_solve(a, rhs);
    const std::vector<double> want = oracles::dense_cholesky_solve(dense, rhs);
    double diff = 0.0;
    for (int i = 0; i < n; ++i) diff += (x[std::size_t(i)] - want[std::size_t(i)]) *
                                        (x[std::size_t(i)] - want[std::size_t(i)]);
    CHECK(std::sqrt(diff) <= 1e-10 * norm2(want));

    const std::vector<double> ax = a.apply(x);
    double res = 0.0;
    for (int i = 0; i < n; ++i) res += (ax[std::size_t(i)] - rhs[std::size_t(i)]) *
                                       (ax[std::size_t(i)] - rhs[std::size_t(i)]);
    CHECK(std::sqrt(res) <= 1e-10 * norm2(rhs));
  }

  SUBCASE("indefinite matrix is rejected") {
    CHECK_THROWS((void)direct_solve(diagonal({1.0, -1.0}), {{1, 1}}));
  }
}

TEST_CASE("determinism of solve reports") {
  const PolyMesh m = generate_voronoi_lloyd(48, 10, 71);
  const MeshHierarchy hier = build_hierarchy(m, 2, 1, 4.0, 0);
  const MGHierarchy h = build_mg_hierarchy(hier, {10.0, 1}, 1.1);
  const DGSpace space(m, 1);
  const std::vector<double> b = assemble_load(space, manufactured_f);
  MultigridConfig cfg;
  cfg.m1 = cfg.m2 = 5;
  std::vector<double> z1, z2;
  const SolveReport r1 = two_level_solve(h, b, z1, cfg);
  const SolveReport r2 = two_level_solve(h, b, z2, cfg);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.rho == r2.rho);
  CHECK(r1.residual_history == r2.residual_history);
}

}  // TEST_SUITE
