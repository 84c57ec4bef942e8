#include "polymg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "polymg/rng.hpp"

namespace polymg {

namespace {

std::vector<Point2> loop_points(const std::vector<Point2>& vertices,
                                const std::vector<int>& loop) {
  std::vector<Point2> pts;
  pts.reserve(loop.size());
  for (int v : loop) pts.push_back(vertices[std::size_t(v)]);
  return pts;
}

bool on_unit_square_boundary(Point2 a, Point2 b, double tol = 1e-9) {
  auto both = [&](double va, double vb, double target) {
    return std::abs(va - target) <= tol && std::abs(vb - target) <= tol;
  };
  return both(a.x, b.x, 0.0) || both(a.x, b.x, 1.0) || both(a.y, b.y, 0.0) ||
         both(a.y, b.y, 1.0);
}

// Interior point of `elem` next to the face (a, b): the centroid of the
// sub-triangle carrying that edge. Falls back to the element centroid, which
// is correct for convex elements.
Point2 anchor_near_face(const PolyMesh& mesh, int elem, int a, int b) {
  for (const Tri& t : mesh.sub_tri[std::size_t(elem)])
    for (int r = 0; r < 3; ++r) {
      const int u = t[std::size_t(r)];
      const int v = t[std::size_t((r + 1) % 3)];
      if ((u == a && v == b) || (u == b && v == a))
        return {(mesh.vertex(t[0]).x + mesh.vertex(t[1]).x + mesh.vertex(t[2]).x) / 3.0,
                (mesh.vertex(t[0]).y + mesh.vertex(t[1]).y + mesh.vertex(t[2]).y) / 3.0};
    }
  return mesh.elements[std::size_t(elem)].centroid;
}

}  // namespace

std::vector<Tri> subtriangulate(const std::vector<Point2>& vertices,
                                const std::vector<int>& loop) {
  if (loop.size() < 3) throw MeshError("subtriangulate: polygon with fewer than 3 vertices");
  if (loop.size() == 3) return {Tri{loop[0], loop[1], loop[2]}};

  const std::vector<Point2> pts = loop_points(vertices, loop);
  if (signed_area(pts) <= 0.0)
    throw MeshError("subtriangulate: polygon is not counter-clockwise or has zero area");

  // Ear clipping; tolerant of collinear boundary vertices, which appear on
  // agglomerated elements.
  std::vector<int> idx(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) idx[i] = int(i);
  const double scale2 = polygon_diameter(pts) * polygon_diameter(pts);

  std::vector<Tri> tris;
  std::size_t guard = 0;
  const std::size_t max_steps = loop.size() * loop.size() + 16;
  while (idx.size() > 3) {
    if (++guard > max_steps)
      throw MeshError("subtriangulate: ear clipping failed (self-intersecting polygon?)");
    bool clipped = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const int ip = idx[(k + idx.size() - 1) % idx.size()];
      const int ic = idx[k];
      const int in = idx[(k + 1) % idx.size()];
      const Point2 a = pts[std::size_t(ip)];
      const Point2 b = pts[std::size_t(ic)];
      const Point2 c = pts[std::size_t(in)];
      const double cr = cross(b - a, c - b);
      if (cr <= 1e-14 * scale2) {
        // Straight or reflex corner: drop exactly-collinear forward runs.
        if (std::abs(cr) <= 1e-14 * scale2 && dot(b - a, c - b) > 0.0) {
          idx.erase(idx.begin() + long(k));
          clipped = true;
          break;
        }
        continue;
      }
      bool contains_other = false;
      for (std::size_t m = 0; m < idx.size(); ++m) {
        const int iq = idx[m];
        if (iq == ip || iq == ic || iq == in) continue;
        const Point2 q = pts[std::size_t(iq)];
        if (cross(b - a, q - a) >= 0 && cross(c - b, q - b) >= 0 &&
            cross(a - c, q - c) >= 0) {
          contains_other = true;
          break;
        }
      }
      if (contains_other) continue;
      tris.push_back(Tri{loop[std::size_t(ip)], loop[std::size_t(ic)], loop[std::size_t(in)]});
      idx.erase(idx.begin() + long(k));
      clipped = true;
      break;
    }
    if (!clipped) throw MeshError("subtriangulate: no ear found (self-intersecting polygon?)");
  }
  tris.push_back(Tri{loop[std::size_t(idx[0])], loop[std::size_t(idx[1])], loop[std::size_t(idx[2])]});
  return tris;
}

std::vector<Face> extract_faces(const std::vector<Point2>& vertices,
                                const std::vector<Polygon>& elements) {
  struct EdgeUse {
    int element;
    int from, to;
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> edges;
  for (int e = 0; e < int(elements.size()); ++e) {
    const auto& loop = elements[std::size_t(e)].vertex_ids;
    const int n = int(loop.size());
    for (int k = 0; k < n; ++k) {
      const int a = loop[std::size_t(k)];
      const int b = loop[std::size_t((k + 1) % n)];
      if (a == b) throw MeshError("extract_faces: zero-length edge in element " + std::to_string(e));
      edges[{std::min(a, b), std::max(a, b)}].push_back({e, a, b});
    }
  }

  std::vector<Face> faces;
  faces.reserve(edges.size());
  for (const auto& [key, uses] : edges) {
    if (uses.size() > 2)
      throw MeshError("extract_faces: edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") shared by more than two elements");
    Face f;
    const EdgeUse& plus = uses[0];
    f.element_plus = plus.element;
    f.endpoint_ids = {plus.from, plus.to};
    if (uses.size() == 2) {
      const EdgeUse& minus = uses[1];
      if (minus.from != plus.to || minus.to != plus.from)
        throw MeshError("extract_faces: inconsistent edge orientation between elements " +
                        std::to_string(plus.element) + " and " + std::to_string(minus.element));
      f.element_minus = minus.element;
    }
    const Point2 a = vertices[std::size_t(f.endpoint_ids[0])];
    const Point2 b = vertices[std::size_t(f.endpoint_ids[1])];
    f.length = dist(a, b);
    const Point2 t = b - a;
    f.normal = {t.y / f.length, -t.x / f.length};
    faces.push_back(f);
  }
  return faces;
}

PolyMesh build_polymesh(std::vector<Point2> vertices,
                        std::vector<std::vector<int>> element_loops,
                        std::vector<std::vector<Tri>> sub_tri) {
  PolyMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.elements.reserve(element_loops.size());
  for (std::size_t e = 0; e < element_loops.size(); ++e) {
    Polygon poly;
    poly.vertex_ids = std::move(element_loops[e]);
    if (poly.vertex_ids.size() < 3)
      throw MeshError("element " + std::to_string(e) + " has fewer than 3 vertices");
    for (int v : poly.vertex_ids)
      if (v < 0 || v >= int(mesh.vertices.size()))
        throw MeshError("element " + std::to_string(e) + " references missing vertex " +
                        std::to_string(v));
    const std::vector<Point2> pts = loop_points(mesh.vertices, poly.vertex_ids);
    poly.area = signed_area(pts);
    if (poly.area <= 0.0)
      throw MeshError("element " + std::to_string(e) + " is not counter-clockwise");
    poly.centroid = polygon_centroid(pts);
    poly.diameter = polygon_diameter(pts);
    mesh.elements.push_back(std::move(poly));
  }

  const bool have_sub = !sub_tri.empty();
  if (have_sub && sub_tri.size() != mesh.elements.size())
    throw MeshError("sub_tri size does not match element count");
  mesh.sub_tri.resize(mesh.elements.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (have_sub && !sub_tri[e].empty()) {
      mesh.sub_tri[e] = std::move(sub_tri[e]);
      continue;
    }
    const Polygon& poly = mesh.elements[e];
    const std::vector<Point2> pts = loop_points(mesh.vertices, poly.vertex_ids);
    if (poly.vertex_ids.size() == 3) {
      mesh.sub_tri[e] = {Tri{poly.vertex_ids[0], poly.vertex_ids[1], poly.vertex_ids[2]}};
    } else if (polygon_is_convex(pts)) {
      const int c = int(mesh.vertices.size());
      mesh.vertices.push_back(poly.centroid);
      const int n = int(poly.vertex_ids.size());
      for (int k = 0; k < n; ++k)
        mesh.sub_tri[e].push_back(
            Tri{c, poly.vertex_ids[std::size_t(k)], poly.vertex_ids[std::size_t((k + 1) % n)]});
    } else {
      mesh.sub_tri[e] = subtriangulate(mesh.vertices, poly.vertex_ids);
    }
  }

  mesh.faces = extract_faces(mesh.vertices, mesh.elements);

  double hmin = 1e300;
  mesh.h = 0.0;
  for (const Polygon& p : mesh.elements) {
    mesh.h = std::max(mesh.h, p.diameter);
    hmin = std::min(hmin, p.diameter);
  }
  mesh.theta = mesh.h / hmin;
  return mesh;
}

void validate_mesh(const PolyMesh& mesh) {
  double total = 0.0;
  for (const Polygon& p : mesh.elements) total += p.area;
  if (std::abs(total - 1.0) > 1e-10)
    throw MeshError("element areas sum to " + std::to_string(total) + ", expected 1");

  for (const Point2& p : mesh.vertices)
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < -1e-12 || p.x > 1 + 1e-12 ||
        p.y < -1e-12 || p.y > 1 + 1e-12)
      throw MeshError("vertex outside the unit square");

  // Faces partition each element boundary.
  std::vector<double> owned_length(mesh.elements.size(), 0.0);
  for (const Face& f : mesh.faces) {
    owned_length[std::size_t(f.element_plus)] += f.length;
    if (!f.is_boundary()) {
      owned_length[std::size_t(f.element_minus)] += f.length;
      const Point2 cp =
          anchor_near_face(mesh, f.element_plus, f.endpoint_ids[0], f.endpoint_ids[1]);
      const Point2 cm =
          anchor_near_face(mesh, f.element_minus, f.endpoint_ids[0], f.endpoint_ids[1]);
      if (dot(f.normal, cm - cp) <= 0.0)
        throw MeshError("interior face normal points toward its own element");
    } else {
      const Point2 a = mesh.vertex(f.endpoint_ids[0]);
      const Point2 b = mesh.vertex(f.endpoint_ids[1]);
      if (!on_unit_square_boundary(a, b))
        throw MeshError("face with a single owner lies in the interior (non-conforming mesh)");
    }
  }
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& loop = mesh.elements[e].vertex_ids;
    double perim = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k)
      perim += dist(mesh.vertex(loop[k]), mesh.vertex(loop[(k + 1) % loop.size()]));
    if (std::abs(owned_length[e] - perim) > 1e-10 * perim)
      throw MeshError("faces of element " + std::to_string(e) + " do not cover its boundary");
  }

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    double tarea = 0.0;
    for (const Tri& t : mesh.sub_tri[e]) {
      const double a =
          0.5 * cross(mesh.vertex(t[1]) - mesh.vertex(t[0]), mesh.vertex(t[2]) - mesh.vertex(t[0]));
      if (a <= 0.0)
        throw MeshError("negatively oriented sub-triangle in element " + std::to_string(e));
      tarea += a;
    }
    if (std::abs(tarea - mesh.elements[e].area) > 1e-12 * mesh.elements[e].area)
      throw MeshError("sub-triangulation of element " + std::to_string(e) +
                      " does not cover its area");
  }
}

PolyMesh generate_structured_triangular(int n) {
  if (n < 1) throw std::invalid_argument("generate_structured_triangular: n must be >= 1");
  std::vector<Point2> vertices;
  vertices.reserve(std::size_t((n + 1) * (n + 1)));
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix <= n; ++ix)
      vertices.push_back({double(ix) / double(n), double(iy) / double(n)});

  auto vid = [n](int ix, int iy) { return iy * (n + 1) + ix; };
  std::vector<std::vector<int>> loops;
  loops.reserve(std::size_t(2 * n * n));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int a = vid(ix, iy), b = vid(ix + 1, iy), c = vid(ix + 1, iy + 1), d = vid(ix, iy + 1);
      loops.push_back({a, b, c});
      loops.push_back({a, c, d});
    }
  return build_polymesh(std::move(vertices), std::move(loops));
}

namespace {

// Sutherland-Hodgman clip of a convex CCW polygon against the half-plane
// dot(x - p, n) <= 0.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 p, Point2 n) {
  std::vector<Point2> out;
  out.reserve(poly.size() + 1);
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % m];
    const double da = dot(a - p, n);
    const double db = dot(b - p, n);
    if (da <= 0.0) {
      out.push_back(a);
      if (db > 0.0) out.push_back(a + (da / (da - db)) * (b - a));
    } else if (db <= 0.0) {
      out.push_back(a + (da / (da - db)) * (b - a));
    }
  }
  return out;
}

struct SeedGrid {
  int nb = 1;
  std::vector<std::vector<int>> buckets;

  explicit SeedGrid(const std::vector<Point2>& seeds) {
    nb = std::max(1, int(std::sqrt(double(seeds.size()))));
    buckets.assign(std::size_t(nb * nb), {});
    for (int i = 0; i < int(seeds.size()); ++i)
      buckets[index(seeds[std::size_t(i)])].push_back(i);
  }
  std::size_t index(Point2 p) const {
    const int bx = std::clamp(int(p.x * nb), 0, nb - 1);
    const int by = std::clamp(int(p.y * nb), 0, nb - 1);
    return std::size_t(by * nb + bx);
  }
};

// Voronoi cell of seed i clipped to the unit square. Visits candidate seeds
// by expanding grid rings; a ring farther than twice the current max vertex
// distance cannot cut the cell.
std::vector<Point2> voronoi_cell(const std::vector<Point2>& seeds, const SeedGrid& grid, int i) {
  const Point2 s = seeds[std::size_t(i)];
  std::vector<Point2> cell = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const int nb = grid.nb;
  const double bucket = 1.0 / nb;
  const int bx = std::clamp(int(s.x * nb), 0, nb - 1);
  const int by = std::clamp(int(s.y * nb), 0, nb - 1);

  auto max_vertex_dist = [&]() {
    double r = 0.0;
    for (const Point2& v : cell) r = std::max(r, dist(s, v));
    return r;
  };

  std::vector<std::pair<double, int>> ring;
  for (int r = 0; r < 2 * nb; ++r) {
    // Everything in ring r is at least (r-1)*bucket away from s.
    if (r > 1 && double(r - 1) * bucket > 2.0 * max_vertex_dist()) break;
    ring.clear();
    for (int dy = -r; dy <= r; ++dy) {
      const int y = by + dy;
      if (y < 0 || y >= nb) continue;
      for (int dx = -r; dx <= r; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
        const int x = bx + dx;
        if (x < 0 || x >= nb) continue;
        for (int j : grid.buckets[std::size_t(y * nb + x)]) {
          if (j == i) continue;
          ring.emplace_back(dist(s, seeds[std::size_t(j)]), j);
        }
      }
    }
    std::sort(ring.begin(), ring.end());
    for (const auto& [d, j] : ring) {
      if (d > 2.0 * max_vertex_dist()) break;
      const Point2 t = seeds[std::size_t(j)];
      cell = clip_halfplane(cell, 0.5 * (s + t), t - s);
      if (cell.size() < 3) throw MeshError("voronoi: degenerate cell for seed " + std::to_string(i));
    }
  }
  return cell;
}

}  // namespace

PolyMesh voronoi_from_seeds(std::vector<Point2> seeds, int lloyd_iters) {
  const int n = int(seeds.size());
  if (n < 4) throw std::invalid_argument("voronoi_from_seeds: need at least 4 seeds");
  for (const Point2& s : seeds)
    if (!(s.x > 0 && s.x < 1 && s.y > 0 && s.y < 1))
      throw MeshError("voronoi: seed outside the open unit square");

  std::vector<std::vector<Point2>> cells(static_cast<std::size_t>(n));
  for (int sweep = 0; sweep <= lloyd_iters; ++sweep) {
    const SeedGrid grid(seeds);
    for (int i = 0; i < n; ++i) cells[std::size_t(i)] = voronoi_cell(seeds, grid, i);
    if (sweep == lloyd_iters) break;
    for (int i = 0; i < n; ++i) seeds[std::size_t(i)] = polygon_centroid(cells[std::size_t(i)]);
  }

  // Merge per-cell vertex copies into one conforming vertex set. The same
  // geometric vertex is computed independently by each incident cell, so
  // copies differ by rounding only; near-degenerate Voronoi vertices are
  // merged as well once they fall below the tolerance.
  for (double tol : {1e-12, 1e-9, 1e-7}) {
    std::vector<Point2> vertices;
    std::vector<std::vector<int>> loops(static_cast<std::size_t>(n));
    std::unordered_map<std::int64_t, std::vector<int>> lookup;
    const double cellsize = std::max(tol, 1e-13);
    auto key = [&](long qx, long qy) { return (std::int64_t(qx) << 32) ^ std::int64_t(qy); };
    auto find_or_add = [&](Point2 p) {
      const long qx = std::lround(p.x / cellsize);
      const long qy = std::lround(p.y / cellsize);
      for (long dx = -1; dx <= 1; ++dx)
        for (long dy = -1; dy <= 1; ++dy) {
          auto it = lookup.find(key(qx + dx, qy + dy));
          if (it == lookup.end()) continue;
          for (int v : it->second)
            if (dist(vertices[std::size_t(v)], p) <= tol) return v;
        }
      vertices.push_back(p);
      lookup[key(qx, qy)].push_back(int(vertices.size()) - 1);
      return int(vertices.size()) - 1;
    };

    bool degenerate = false;
    for (int i = 0; i < n && !degenerate; ++i) {
      std::vector<int>& loop = loops[std::size_t(i)];
      for (const Point2& p : cells[std::size_t(i)]) {
        const int v = find_or_add(p);
        if (loop.empty() || loop.back() != v) loop.push_back(v);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      if (loop.size() < 3) degenerate = true;
    }
    if (degenerate) continue;

    try {
      PolyMesh mesh = build_polymesh(std::move(vertices), std::move(loops));
      validate_mesh(mesh);
      return mesh;
    } catch (const MeshError&) {
      // retry with a coarser merge tolerance
    }
  }
  throw MeshError("voronoi: could not build a conforming mesh from the seed set");
}

PolyMesh generate_voronoi_lloyd(int n_seeds, int lloyd_iters, std::uint64_t rng_seed) {
  if (n_seeds < 4) throw std::invalid_argument("generate_voronoi_lloyd: n_seeds must be >= 4");
  std::mt19937_64 gen(rng_seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<Point2> seeds(static_cast<std::size_t>(n_seeds));
    for (Point2& s : seeds) {
      s.x = uniform01(gen);
      s.y = uniform01(gen);
      // keep strictly interior
      s.x = 1e-6 + (1.0 - 2e-6) * s.x;
      s.y = 1e-6 + (1.0 - 2e-6) * s.y;
    }
    std::vector<Point2> sorted = seeds;
    std::sort(sorted.begin(), sorted.end(),
              [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    bool dup = false;
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (dist(sorted[i - 1], sorted[i]) < 1e-14) dup = true;
    if (dup) continue;
    return voronoi_from_seeds(std::move(seeds), lloyd_iters);
  }
  throw MeshError("generate_voronoi_lloyd: duplicate seeds persisted after 10 retries");
}

void save_mesh(const PolyMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("save_mesh: cannot open " + path);
  char buf[64];
  out << "{\n\"vertices\": [";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "[%.17g,%.17g]", mesh.vertices[i].x, mesh.vertices[i].y);
    out << (i ? "," : "") << buf;
  }
  out << "],\n\"elements\": [";
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    out << (e ? "," : "") << "[";
    const auto& loop = mesh.elements[e].vertex_ids;
    for (std::size_t k = 0; k < loop.size(); ++k) out << (k ? "," : "") << loop[k];
    out << "]";
  }
  out << "],\n\"sub_tri\": [";
  for (std::size_t e = 0; e < mesh.sub_tri.size(); ++e) {
    out << (e ? "," : "") << "[";
    for (std::size_t k = 0; k < mesh.sub_tri[e].size(); ++k) {
      const Tri& t = mesh.sub_tri[e][k];
      out << (k ? "," : "") << "[" << t[0] << "," << t[1] << "," << t[2] << "]";
    }
    out << "]";
  }
  out << "]\n}\n";
  if (!out) throw MeshError("save_mesh: write failed for " + path);
}

PolyMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("load_mesh: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    const std::size_t pos = std::min(err.byte, text.size());
    const std::size_t line = 1 + std::size_t(std::count(text.begin(), text.begin() + long(pos), '\n'));
    throw MeshError("load_mesh: " + path + ":" + std::to_string(line) + ": " + err.what());
  }

  try {
    std::vector<Point2> vertices;
    for (const auto& v : doc.at("vertices"))
      vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    std::vector<std::vector<int>> loops;
    for (const auto& e : doc.at("elements")) loops.push_back(e.get<std::vector<int>>());
    std::vector<std::vector<Tri>> sub_tri;
    if (doc.contains("sub_tri")) {
      for (const auto& e : doc["sub_tri"]) {
        std::vector<Tri> tris;
        for (const auto& t : e) tris.push_back(Tri{t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
        sub_tri.push_back(std::move(tris));
      }
    }
    PolyMesh mesh = build_polymesh(std::move(vertices), std::move(loops), std::move(sub_tri));
    validate_mesh(mesh);
    return mesh;
  } catch (const nlohmann::json::exception& err) {
    throw MeshError("load_mesh: " + path + ": malformed mesh document: " + err.what());
  }
}

std::vector<std::vector<int>> element_adjacency(const PolyMesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.elements.size());
  for (const Face& f : mesh.faces) {
    if (f.is_boundary()) continue;
    adj[std::size_t(f.element_plus)].push_back(f.element_minus);
    adj[std::size_t(f.element_minus)].push_back(f.element_plus);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

}  // namespace polymg
