#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "polymg/hierarchy.hpp"

using namespace polymg;

namespace {

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

TEST_SUITE("hierarchy") {

TEST_CASE("single element map") {
  const PolyMesh one = build_polymesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
  const Agglomeration agg = agglomerate(one, 4.0, 0);
  CHECK(agg.coarse_count == 1);
  REQUIRE(agg.fine_to_coarse.size() == 1);
  CHECK(agg.fine_to_coarse[0] == 0);
}

TEST_CASE("totality on the 8-triangle square") {
  const PolyMesh m = generate_structured_triangular(2);
  const Agglomeration agg = agglomerate(m, 4.0, 0);
  REQUIRE(int(agg.fine_to_coarse.size()) == 8);
  std::vector<int> sizes(std::size_t(agg.coarse_count), 0);
  for (int g : agg.fine_to_coarse) {
    REQUIRE(g >= 0);
    REQUIRE(g < agg.coarse_count);
    ++sizes[std::size_t(g)];
  }
  for (int s : sizes) CHECK(s > 0);
}

TEST_CASE("aggregate counts and connectivity on a 512-cell mesh") {
  const PolyMesh m = generate_voronoi_lloyd(512, 20, 1);
  const Agglomeration agg = agglomerate(m, 4.0, 0);
  CHECK(agg.coarse_count >= 64);
  CHECK(agg.coarse_count <= 256);

  std::vector<std::vector<int>> members(static_cast<std::size_t>(agg.coarse_count));
  for (int e = 0; e < m.n_elements(); ++e)
    members[std::size_t(agg.fine_to_coarse[std::size_t(e)])].push_back(e);
  for (const auto& group : members) CHECK(oracles::connected_in_mesh(m, group));
}

TEST_CASE("two-level hierarchy keeps the fine mesh") {
  const PolyMesh m = generate_voronoi_lloyd(64, 10, 2);
  const MeshHierarchy h = build_hierarchy(m, 2, 1, 4.0, 0);
  REQUIRE(h.n_levels() == 2);
  CHECK(h.finest().n_elements() == m.n_elements());
  CHECK(h.finest().h == m.h);
  CHECK(h.levels[0].n_elements() < m.n_elements());
}

TEST_CASE("nesting: children areas sum to aggregate areas") {
  const PolyMesh m = generate_voronoi_lloyd(256, 15, 4);
  const MeshHierarchy h = build_hierarchy(m, 3, 1, 4.0, 0);
  for (int k = 0; k + 1 < h.n_levels(); ++k) {
    const PolyMesh& coarse = h.levels[std::size_t(k)];
    const PolyMesh& fine = h.levels[std::size_t(k) + 1];
    const Agglomeration& map = h.maps[std::size_t(k)];
    std::vector<double> sums(static_cast<std::size_t>(coarse.n_elements()), 0.0);
    for (int e = 0; e < fine.n_elements(); ++e)
      sums[std::size_t(map.fine_to_coarse[std::size_t(e)])] += fine.elements[std::size_t(e)].area;
    for (int g = 0; g < coarse.n_elements(); ++g)
      CHECK(std::abs(sums[std::size_t(g)] - coarse.elements[std::size_t(g)].area) <=
            1e-10 * sums[std::size_t(g)]);
  }
}

TEST_CASE("monotone level counts and feasibility errors") {
  const PolyMesh m = generate_voronoi_lloyd(1024, 10, 3);
  const MeshHierarchy h = build_hierarchy(m, 4, 1, 4.0, 0);
  REQUIRE(h.n_levels() == 4);
  for (int k = 0; k + 1 < 4; ++k)
    CHECK(h.levels[std::size_t(k)].n_elements() < h.levels[std::size_t(k) + 1].n_elements());

  const PolyMesh small = generate_voronoi_lloyd(16, 5, 3);
  CHECK_THROWS_AS((void)build_hierarchy(small, 50, 1, 4.0, 0), MeshError);
}

TEST_CASE("determinism of repeated builds") {
  const PolyMesh m = generate_voronoi_lloyd(128, 10, 5);
  const Agglomeration a = agglomerate(m, 4.0, 42);
  const Agglomeration b = agglomerate(m, 4.0, 42);
  CHECK(a.coarse_count == b.coarse_count);
  CHECK(a.fine_to_coarse == b.fine_to_coarse);
}

TEST_CASE("quality report") {
  SUBCASE("identical levels skip strict coarsening") {
    const PolyMesh m = generate_voronoi_lloyd(32, 5, 6);
    const QualityReport q = quality_report(identical_two_level(m));
    CHECK(q.theta_max == doctest::Approx(1.0));
    CHECK(q.levels[0].theta == q.levels[1].theta);
  }

  SUBCASE("structured fine plus aggregation") {
    const PolyMesh m = generate_structured_triangular(8);
    const MeshHierarchy h = build_hierarchy(m, 2, 1, 4.0, 0);
    const QualityReport q = quality_report(h);
    CHECK(q.levels[0].theta >= q.levels[1].theta);
    CHECK(q.levels[1].theta >= 1.0);
    CHECK(q.theta_max > 1.0);
    CHECK(q.levels[0].coarsening_factor > 1.0);
  }

  SUBCASE("strip aggregates score worse than blocks") {
    const PolyMesh m = generate_structured_triangular(4);  // 32 triangles
    // strips: one aggregate per row of squares
    Agglomeration strips;
    strips.coarse_count = 4;
    // blocks: 2x2 squares
    Agglomeration blocks;
    blocks.coarse_count = 4;
    for (int iy = 0; iy < 4; ++iy)
      for (int ix = 0; ix < 4; ++ix)
        for (int t = 0; t < 2; ++t) {
          strips.fine_to_coarse.push_back(iy);
          blocks.fine_to_coarse.push_back((iy / 2) * 2 + ix / 2);
        }

    MeshHierarchy hs;
    Agglomeration strips_copy = strips;
    hs.levels = {coarsen_mesh(m, strips_copy), m};
    hs.maps = {strips_copy};
    hs.p_per_level = {1, 1};

    MeshHierarchy hb;
    Agglomeration blocks_copy = blocks;
    hb.levels = {coarsen_mesh(m, blocks_copy), m};
    hb.maps = {blocks_copy};
    hb.p_per_level = {1, 1};

    const QualityReport qs = quality_report(hs);
    const QualityReport qb = quality_report(hb);
    CHECK(qs.theta_max > qb.theta_max);
  }
}

TEST_CASE("algebraic MIS aggregation") {
  SUBCASE("diagonal matrix: every vertex is a root") {
    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < 6; ++i) trip.emplace_back(i, i, 1.0 + i);
    const SparseOperator d = from_triplets(6, 6, std::move(trip), true);
    const Agglomeration agg = aggregate_algebraic_mis(d);
    CHECK(agg.coarse_count == 6);
  }

  SUBCASE("path graph: independence of roots") {
    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < 5; ++i) trip.emplace_back(i, i, 2.0);
    for (int i = 0; i + 1 < 5; ++i) {
      trip.emplace_back(i, i + 1, -1.0);
      trip.emplace_back(i + 1, i, -1.0);
    }
    const SparseOperator path = from_triplets(5, 5, std::move(trip), true);
    const Agglomeration agg = aggregate_algebraic_mis(path);

    std::vector<int> rep(std::size_t(agg.coarse_count), -1);
    for (int i = 0; i < 5; ++i) {
      const int g = agg.fine_to_coarse[std::size_t(i)];
      if (rep[std::size_t(g)] < 0) rep[std::size_t(g)] = i;  // roots are chosen first
    }
    for (int a : rep)
      for (int b : rep)
        if (a != b) CHECK(std::abs(a - b) > 1);  // no two roots adjacent on the path
    CHECK_THROWS(aggregate_algebraic_mis(SparseOperator{}));
  }
}

TEST_CASE("hierarchy save and load") {
  namespace fs = std::filesystem;
  const PolyMesh m = generate_voronoi_lloyd(64, 5, 8);
  const MeshHierarchy h = build_hierarchy(m, 3, 2, 4.0, 0);
  const std::string dir = (fs::temp_directory_path() / "polymg_hier_io").string();
  save_hierarchy(h, dir);
  const MeshHierarchy r = load_hierarchy(dir);
  REQUIRE(r.n_levels() == 3);
  for (int k = 0; k < 3; ++k)
    CHECK(r.levels[std::size_t(k)].n_elements() == h.levels[std::size_t(k)].n_elements());
  CHECK(r.maps[0].fine_to_coarse == h.maps[0].fine_to_coarse);
  CHECK(r.p_per_level[0] == 2);
}

}  // TEST_SUITE
