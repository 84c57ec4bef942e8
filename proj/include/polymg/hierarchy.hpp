#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polymg/mesh.hpp"
#include "polymg/sparse.hpp"

namespace polymg {

/// Total map from fine elements to coarse (aggregate) indices.
struct Agglomeration {
  std::vector<int> fine_to_coarse;
  int coarse_count = 0;
};

/// Nested meshes ordered coarse (level 1) to fine (level J).
/// maps[k] links levels[k+1] down to levels[k].
struct MeshHierarchy {
  std::vector<PolyMesh> levels;
  std::vector<Agglomeration> maps;
  std::vector<int> p_per_level;

  int n_levels() const { return int(levels.size()); }
  const PolyMesh& finest() const { return levels.back(); }
};

struct LevelQuality {
  int level = 0;  // 1-based, 1 = coarsest
  int element_count = 0;
  double theta = 1.0;              // max/min element diameter on the level
  int max_faces_per_element = 0;
  double coarsening_factor = 0.0;  // elements(level+1)/elements(level); 0 on the finest
  double theta_interlevel = 1.0;   // max coarse/fine diameter ratio over shared faces
  double face_simplex_ratio = 0.0;     // max h_k |F| / (2 |T_F|)
  double min_area_over_diam2 = 0.0;    // min |k| / h_k^2
  double min_subtri_area_share = 0.0;  // min over k of m_k * min_i|s_i| / |k|
  bool assumption_flags[5] = {false, false, false, false, false};
};

struct QualityReport {
  std::vector<LevelQuality> levels;
  double theta_max = 1.0;  // max of theta_interlevel over level pairs
};

/// Greedy shape-aware aggregation: seeds are unassigned elements with the
/// fewest unassigned neighbors; aggregates absorb the neighbor minimizing
/// diameter^2/area until they reach target_factor members. Singletons are
/// merged into the best-shaped adjacent aggregate. The result is total,
/// connected and deterministic.
Agglomeration agglomerate(const PolyMesh& mesh, double target_factor, std::uint64_t rng_seed);

/// Merge each aggregate of `map` into one polygonal element; coarse element
/// boundaries keep every fine vertex, so nesting is exact and coarse faces
/// are unions of fine faces. `map` may be adjusted (aggregates merged) when
/// an aggregate union is not a simple polygon.
PolyMesh coarsen_mesh(const PolyMesh& fine, Agglomeration& map);

/// J nested levels built by repeated agglomeration of `fine`; constant
/// polynomial degree p on every level.
MeshHierarchy build_hierarchy(const PolyMesh& fine, int levels, int p, double target_factor,
                              std::uint64_t rng_seed);

QualityReport quality_report(const MeshHierarchy& hierarchy);

void write_quality_csv(const QualityReport& report, const std::string& path);

/// Aggregation on the matrix graph: a maximal independent set provides the
/// roots and every remaining vertex joins the root with the strongest
/// coupling |a_ij|.
Agglomeration aggregate_algebraic_mis(const SparseOperator& matrix);

void save_hierarchy(const MeshHierarchy& hierarchy, const std::string& dir);
MeshHierarchy load_hierarchy(const std::string& dir);

}  // namespace polymg
