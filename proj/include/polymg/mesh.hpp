#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymg/geometry.hpp"

namespace polymg {

/// Mesh construction, file parsing or conformity failure.
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Polygon {
  std::vector<int> vertex_ids;  // CCW loop
  double diameter = 0.0;        // max pairwise vertex distance
  double area = 0.0;
  Point2 centroid{};
};

struct Face {
  std::array<int, 2> endpoint_ids{};  // as traversed by element_plus
  int element_plus = -1;
  int element_minus = -1;  // -1: boundary face
  double length = 0.0;
  Point2 normal{};  // unit, outward from element_plus

  bool is_boundary() const { return element_minus < 0; }
};

using Tri = std::array<int, 3>;

/// 2-D polygonal mesh of the unit square. Immutable once built.
struct PolyMesh {
  std::vector<Point2> vertices;
  std::vector<Polygon> elements;
  std::vector<Face> faces;
  std::vector<std::vector<Tri>> sub_tri;  // per element, CCW triangles
  double h = 0.0;                         // max element diameter
  double theta = 1.0;                     // max/min element diameter

  int n_elements() const { return int(elements.size()); }

  Point2 vertex(int v) const { return vertices[std::size_t(v)]; }
};

/// n x n grid of squares, each split into two triangles along the same
/// diagonal; 2n^2 elements.
PolyMesh generate_structured_triangular(int n);

/// Clipped Voronoi diagram of the given seeds in (0,1)^2 after `lloyd_iters`
/// centroidal relaxation sweeps. One cell per seed.
PolyMesh voronoi_from_seeds(std::vector<Point2> seeds, int lloyd_iters);

/// Same, with seeds drawn uniformly from a deterministic generator.
PolyMesh generate_voronoi_lloyd(int n_seeds, int lloyd_iters, std::uint64_t rng_seed);

/// Triangulate one simple polygon: centroid fan if convex, ear clipping
/// otherwise.
std::vector<Tri> subtriangulate(const std::vector<Point2>& vertices,
                                const std::vector<int>& loop);

/// Build faces from conforming element loops; interior faces carry two
/// owners, boundary faces one. An edge with more than two owners is a
/// conformity error.
std::vector<Face> extract_faces(const std::vector<Point2>& vertices,
                                const std::vector<Polygon>& elements);

/// Assemble a full PolyMesh (faces, sub-triangulation, h, theta) from raw
/// connectivity. If `sub_tri` is empty it is generated per element.
PolyMesh build_polymesh(std::vector<Point2> vertices,
                        std::vector<std::vector<int>> element_loops,
                        std::vector<std::vector<Tri>> sub_tri = {});

/// Structural checks: area partition of unity, face/perimeter partition,
/// normal consistency, sub-triangle coverage. Throws MeshError.
void validate_mesh(const PolyMesh& mesh);

/// JSON round-trip with 17-significant-digit coordinates.
void save_mesh(const PolyMesh& mesh, const std::string& path);
PolyMesh load_mesh(const std::string& path);

/// Element adjacency across interior faces.
std::vector<std::vector<int>> element_adjacency(const PolyMesh& mesh);

}  // namespace polymg
