#include "polymg/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace polymg {

namespace {

std::vector<int> bfs_component(const std::vector<std::vector<int>>& adj, int start,
                               const std::vector<char>& eligible) {
  std::vector<int> comp;
  std::vector<char> seen(adj.size(), 0);
  std::deque<int> queue{start};
  seen[std::size_t(start)] = 1;
  while (!queue.empty()) {
    const int e = queue.front();
    queue.pop_front();
    comp.push_back(e);
    for (int f : adj[std::size_t(e)])
      if (eligible[std::size_t(f)] && !seen[std::size_t(f)]) {
        seen[std::size_t(f)] = 1;
        queue.push_back(f);
      }
  }
  return comp;
}

}  // namespace

Agglomeration agglomerate(const PolyMesh& mesh, double target_factor, std::uint64_t /*rng_seed*/) {
  const int n = mesh.n_elements();
  if (target_factor < 2.0 || target_factor > 16.0)
    throw std::invalid_argument("agglomerate: target_factor must be in [2,16]");
  const auto adj = element_adjacency(mesh);

  if (n > 1) {
    std::vector<char> all(std::size_t(n), 1);
    if (int(bfs_component(adj, 0, all).size()) != n)
      throw MeshError("agglomerate: mesh is disconnected");
  }

  std::vector<int> assign(std::size_t(n), -1);
  std::vector<std::vector<int>> aggregates;

  // Per-aggregate geometry for the shape score diameter^2/area.
  struct AggGeom {
    std::vector<Point2> pts;
    double area = 0.0;
    double diam = 0.0;
  };
  std::vector<AggGeom> geom;

  auto absorb = [&](int agg, int elem) {
    assign[std::size_t(elem)] = agg;
    aggregates[std::size_t(agg)].push_back(elem);
    AggGeom& g = geom[std::size_t(agg)];
    g.area += mesh.elements[std::size_t(elem)].area;
    for (int v : mesh.elements[std::size_t(elem)].vertex_ids) {
      const Point2 p = mesh.vertex(v);
      for (const Point2& q : g.pts) g.diam = std::max(g.diam, dist(p, q));
      g.pts.push_back(p);
    }
    g.diam = std::max(g.diam, mesh.elements[std::size_t(elem)].diameter);
  };

  auto grown_score = [&](int agg, int elem) {
    const AggGeom& g = geom[std::size_t(agg)];
    double diam = std::max(g.diam, mesh.elements[std::size_t(elem)].diameter);
    for (int v : mesh.elements[std::size_t(elem)].vertex_ids) {
      const Point2 p = mesh.vertex(v);
      for (const Point2& q : g.pts) diam = std::max(diam, dist(p, q));
    }
    return diam * diam / (g.area + mesh.elements[std::size_t(elem)].area);
  };

  double total_area = 0.0;
  for (const Polygon& poly : mesh.elements) total_area += poly.area;
  const double area_target = target_factor * total_area / double(n);

  std::vector<int> unassigned_nbrs(std::size_t(n), 0);
  for (int e = 0; e < n; ++e) unassigned_nbrs[std::size_t(e)] = int(adj[std::size_t(e)].size());

  int remaining = n;
  while (remaining > 0) {
    int seed = -1, best = 1 << 30;
    for (int e = 0; e < n; ++e)
      if (assign[std::size_t(e)] < 0 && unassigned_nbrs[std::size_t(e)] < best) {
        best = unassigned_nbrs[std::size_t(e)];
        seed = e;
      }

    const int agg = int(aggregates.size());
    aggregates.emplace_back();
    geom.emplace_back();
    absorb(agg, seed);
    --remaining;
    for (int f : adj[std::size_t(seed)]) --unassigned_nbrs[std::size_t(f)];

    while (geom[std::size_t(agg)].area < 0.95 * area_target &&
           double(aggregates[std::size_t(agg)].size()) < 4.0 * target_factor) {
      int pick = -1;
      double pick_score = 0.0;
      for (int e : aggregates[std::size_t(agg)])
        for (int f : adj[std::size_t(e)]) {
          if (assign[std::size_t(f)] >= 0) continue;
          const double s = grown_score(agg, f);
          if (pick < 0 || s < pick_score || (s == pick_score && f < pick)) {
            pick = f;
            pick_score = s;
          }
        }
      if (pick < 0) break;
      absorb(agg, pick);
      --remaining;
      for (int f : adj[std::size_t(pick)]) --unassigned_nbrs[std::size_t(f)];
    }
  }

  // Merge undersized aggregates (leftover pockets of the greedy sweep) into
  // the adjacent aggregate with the best resulting shape score. Singletons
  // always qualify; small aggregates drive theta and the inter-level size
  // ratio up.
  const double desired_area = area_target;
  for (int agg = 0; agg < int(aggregates.size()); ++agg) {
    if (aggregates[std::size_t(agg)].empty()) continue;
    double area = 0.0;
    for (int e : aggregates[std::size_t(agg)]) area += mesh.elements[std::size_t(e)].area;
    if (aggregates[std::size_t(agg)].size() > 1 && area >= 0.55 * desired_area) continue;
    int pick = -1;
    double pick_score = 0.0;
    for (int e : aggregates[std::size_t(agg)])
      for (int f : adj[std::size_t(e)]) {
        const int other = assign[std::size_t(f)];
        if (other == agg || aggregates[std::size_t(other)].empty()) continue;
        const double s = grown_score(other, e);
        if (pick < 0 || s < pick_score || (s == pick_score && other < pick)) {
          pick = other;
          pick_score = s;
        }
      }
    if (pick < 0) continue;  // isolated patch (single-element mesh)
    const std::vector<int> members = aggregates[std::size_t(agg)];
    aggregates[std::size_t(agg)].clear();
    for (int e : members) absorb(pick, e);
  }

  // Local refinement: move boundary elements between adjacent aggregates when
  // that lowers the worse of the two scores. The score penalizes stretched
  // shapes and size outliers; every aggregate stays connected and nonempty.
  auto set_score = [&](const std::vector<int>& members) {
    if (members.empty()) return 1e300;
    double area = 0.0, diam = 0.0;
    std::vector<Point2> pts;
    for (int e : members) {
      area += mesh.elements[std::size_t(e)].area;
      diam = std::max(diam, mesh.elements[std::size_t(e)].diameter);
      for (int v : mesh.elements[std::size_t(e)].vertex_ids) {
        const Point2 p = mesh.vertex(v);
        for (const Point2& q : pts) diam = std::max(diam, dist(p, q));
        pts.push_back(p);
      }
    }
    return diam * diam / area + std::abs(area - desired_area) / desired_area;
  };
  auto connected_without = [&](const std::vector<int>& members, int skip) {
    std::vector<int> rest;
    for (int e : members)
      if (e != skip) rest.push_back(e);
    if (rest.empty()) return false;
    std::vector<char> in_rest(static_cast<std::size_t>(n), 0);
    for (int e : rest) in_rest[std::size_t(e)] = 1;
    const std::vector<int> comp = bfs_component(adj, rest[0], in_rest);
    std::size_t hit = 0;
    for (int e : comp) hit += in_rest[std::size_t(e)];
    return hit == rest.size();
  };

  for (int sweep = 0; sweep < 5; ++sweep) {
    bool changed = false;
    for (int e = 0; e < n; ++e) {
      const int src = assign[std::size_t(e)];
      if (aggregates[std::size_t(src)].size() <= 1) continue;
      int best_dst = -1;
      double best_after = 1e300;
      double before = 0.0;
      for (int f : adj[std::size_t(e)]) {
        const int dst = assign[std::size_t(f)];
        if (dst == src) continue;
        const double b = std::max(set_score(aggregates[std::size_t(src)]),
                                  set_score(aggregates[std::size_t(dst)]));
        std::vector<int> src_after;
        for (int x : aggregates[std::size_t(src)])
          if (x != e) src_after.push_back(x);
        std::vector<int> dst_after = aggregates[std::size_t(dst)];
        dst_after.push_back(e);
        const double a = std::max(set_score(src_after), set_score(dst_after));
        if (a < b - 1e-12 && (best_dst < 0 || a < best_after)) {
          best_dst = dst;
          best_after = a;
          before = b;
        }
      }
      if (best_dst < 0) continue;
      if (!connected_without(aggregates[std::size_t(src)], e)) continue;
      (void)before;
      auto& sm = aggregates[std::size_t(src)];
      sm.erase(std::find(sm.begin(), sm.end(), e));
      aggregates[std::size_t(best_dst)].push_back(e);
      assign[std::size_t(e)] = best_dst;
      changed = true;
    }
    if (!changed) break;
  }

  Agglomeration result;
  result.fine_to_coarse.assign(std::size_t(n), -1);
  int next = 0;
  std::vector<int> rename(aggregates.size(), -1);
  for (std::size_t a = 0; a < aggregates.size(); ++a)
    if (!aggregates[a].empty()) rename[a] = next++;
  for (int e = 0; e < n; ++e)
    result.fine_to_coarse[std::size_t(e)] = rename[std::size_t(assign[std::size_t(e)])];
  result.coarse_count = next;
  return result;
}

namespace {

// Directed boundary loops of one aggregate: every fine face that separates
// the aggregate from another one (or from the domain boundary), oriented as
// its member element traverses it.
struct TraceResult {
  std::vector<std::vector<int>> loops;
  bool pinched = false;
  int pinch_vertex = -1;
};

TraceResult trace_aggregate(const PolyMesh& fine, const std::vector<int>& map, int agg) {
  std::map<int, std::vector<int>> next;  // from-vertex -> to-vertices
  for (const Face& f : fine.faces) {
    const int gp = map[std::size_t(f.element_plus)];
    const int gm = f.is_boundary() ? -1 : map[std::size_t(f.element_minus)];
    if (gp == agg && gm != agg)
      next[f.endpoint_ids[0]].push_back(f.endpoint_ids[1]);
    else if (gm == agg && gp != agg)
      next[f.endpoint_ids[1]].push_back(f.endpoint_ids[0]);
  }
  TraceResult tr;
  for (const auto& [v, outs] : next)
    if (outs.size() > 1) {
      tr.pinched = true;
      tr.pinch_vertex = v;
      return tr;
    }
  while (!next.empty()) {
    const int start = next.begin()->first;
    std::vector<int> loop;
    int v = start;
    do {
      loop.push_back(v);
      auto it = next.find(v);
      if (it == next.end() || it->second.empty())
        throw MeshError("coarsen_mesh: open boundary chain in aggregate " + std::to_string(agg));
      const int w = it->second.front();
      next.erase(it);
      v = w;
    } while (v != start);
    tr.loops.push_back(std::move(loop));
  }
  return tr;
}

void merge_aggregates(std::vector<int>& map, int& count, int into, int from) {
  for (int& g : map)
    if (g == from) g = into;
  for (int& g : map)
    if (g == count - 1) g = from;  // keep ids compact: recycle the last id
  --count;
}

}  // namespace

PolyMesh coarsen_mesh(const PolyMesh& fine, Agglomeration& map) {
  const int n = fine.n_elements();
  if (int(map.fine_to_coarse.size()) != n)
    throw MeshError("coarsen_mesh: map does not match the fine mesh");

  std::vector<std::vector<int>> vertex_elems(fine.vertices.size());
  for (int e = 0; e < n; ++e)
    for (int v : fine.elements[std::size_t(e)].vertex_ids)
      vertex_elems[std::size_t(v)].push_back(e);

  std::vector<int>& assign = map.fine_to_coarse;
  int count = map.coarse_count;

  // Aggregates must trace to a single simple loop; pinched or holed unions
  // are repaired by merging aggregates, which preserves totality and
  // connectivity.
  std::vector<std::vector<int>> outer(static_cast<std::size_t>(count));
  for (int repair = 0;; ++repair) {
    if (repair > 4 * count + 16) throw MeshError("coarsen_mesh: aggregate repair did not settle");
    bool ok = true;
    outer.assign(std::size_t(count), {});
    for (int g = 0; g < count && ok; ++g) {
      TraceResult tr = trace_aggregate(fine, assign, g);
      if (tr.pinched) {
        int other = -1;
        for (int e : vertex_elems[std::size_t(tr.pinch_vertex)])
          if (assign[std::size_t(e)] != g && (other < 0 || assign[std::size_t(e)] < other))
            other = assign[std::size_t(e)];
        if (other < 0) throw MeshError("coarsen_mesh: unrepairable pinched aggregate");
        merge_aggregates(assign, count, std::min(g, other), std::max(g, other));
        ok = false;
        break;
      }
      if (tr.loops.size() > 1) {
        // keep the loop with the largest positive area; everything inside
        // the remaining loops is swallowed by this aggregate
        std::size_t best = 0;
        double best_area = -1e300;
        std::vector<std::vector<Point2>> pts(tr.loops.size());
        for (std::size_t l = 0; l < tr.loops.size(); ++l) {
          for (int v : tr.loops[l]) pts[l].push_back(fine.vertex(v));
          const double a = signed_area(pts[l]);
          if (a > best_area) {
            best_area = a;
            best = l;
          }
        }
        int victim = -1;
        for (std::size_t l = 0; l < tr.loops.size() && victim < 0; ++l) {
          if (l == best) continue;
          for (int e = 0; e < n && victim < 0; ++e)
            if (assign[std::size_t(e)] != g &&
                point_in_polygon(fine.elements[std::size_t(e)].centroid, pts[l]))
              victim = assign[std::size_t(e)];
        }
        if (victim < 0) throw MeshError("coarsen_mesh: hole without elements");
        merge_aggregates(assign, count, std::min(g, victim), std::max(g, victim));
        ok = false;
        break;
      }
      outer[std::size_t(g)] = std::move(tr.loops[0]);
    }
    if (ok) break;
  }
  map.coarse_count = count;

  // Deterministic loop start.
  for (auto& loop : outer) {
    const auto it = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), it, loop.end());
  }

  std::vector<std::vector<Tri>> sub(static_cast<std::size_t>(count));
  for (int e = 0; e < n; ++e) {
    auto& dst = sub[std::size_t(assign[std::size_t(e)])];
    const auto& src = fine.sub_tri[std::size_t(e)];
    dst.insert(dst.end(), src.begin(), src.end());
  }

  PolyMesh coarse = build_polymesh(fine.vertices, std::move(outer), std::move(sub));

  // exact nesting check
  std::vector<double> child_area(std::size_t(count), 0.0);
  for (int e = 0; e < n; ++e)
    child_area[std::size_t(assign[std::size_t(e)])] += fine.elements[std::size_t(e)].area;
  for (int g = 0; g < count; ++g)
    if (std::abs(child_area[std::size_t(g)] - coarse.elements[std::size_t(g)].area) >
        1e-10 * child_area[std::size_t(g)])
      throw MeshError("coarsen_mesh: aggregate " + std::to_string(g) +
                      " area does not match its children");
  return coarse;
}

MeshHierarchy build_hierarchy(const PolyMesh& fine, int levels, int p, double target_factor,
                              std::uint64_t rng_seed) {
  if (levels < 2) throw std::invalid_argument("build_hierarchy: need at least 2 levels");
  if (double(fine.n_elements()) < std::pow(target_factor, levels - 1))
    throw MeshError("build_hierarchy: fine mesh too small for " + std::to_string(levels) +
                    " levels at factor " + std::to_string(target_factor));

  std::vector<PolyMesh> down{fine};  // fine to coarse while building
  std::vector<Agglomeration> maps;
  for (int j = levels; j >= 2; --j) {
    Agglomeration map = agglomerate(down.back(), target_factor, rng_seed);
    PolyMesh coarse = coarsen_mesh(down.back(), map);
    if (coarse.n_elements() < 4)
      throw MeshError("build_hierarchy: level " + std::to_string(j - 1) +
                      " would have fewer than 4 elements; use a smaller level count");
    maps.push_back(std::move(map));
    down.push_back(std::move(coarse));
  }

  MeshHierarchy h;
  h.levels.assign(std::make_move_iterator(down.rbegin()), std::make_move_iterator(down.rend()));
  h.maps.assign(std::make_move_iterator(maps.rbegin()), std::make_move_iterator(maps.rend()));
  h.p_per_level.assign(std::size_t(levels), p);
  return h;
}

QualityReport quality_report(const MeshHierarchy& hierarchy) {
  QualityReport report;
  const int J = hierarchy.n_levels();
  for (int k = 0; k < J; ++k) {
    const PolyMesh& mesh = hierarchy.levels[std::size_t(k)];
    LevelQuality q;
    q.level = k + 1;
    q.element_count = mesh.n_elements();
    q.theta = mesh.theta;

    std::vector<int> nfaces(std::size_t(mesh.n_elements()), 0);
    for (const Face& f : mesh.faces) {
      ++nfaces[std::size_t(f.element_plus)];
      if (!f.is_boundary()) ++nfaces[std::size_t(f.element_minus)];
    }
    q.max_faces_per_element = *std::max_element(nfaces.begin(), nfaces.end());
    if (k + 1 < J)
      q.coarsening_factor = double(hierarchy.levels[std::size_t(k) + 1].n_elements()) /
                            double(mesh.n_elements());

    // face-simplex bound: the sub-triangle carrying each face
    double worst_face = 0.0;
    for (const Face& f : mesh.faces) {
      for (int side = 0; side < (f.is_boundary() ? 1 : 2); ++side) {
        const int e = side == 0 ? f.element_plus : f.element_minus;
        double tri_area = 0.0;
        for (const Tri& t : mesh.sub_tri[std::size_t(e)])
          for (int r = 0; r < 3; ++r)
            if ((t[std::size_t(r)] == f.endpoint_ids[0] &&
                 t[std::size_t((r + 1) % 3)] == f.endpoint_ids[1]) ||
                (t[std::size_t(r)] == f.endpoint_ids[1] &&
                 t[std::size_t((r + 1) % 3)] == f.endpoint_ids[0])) {
              tri_area = 0.5 * std::abs(cross(mesh.vertex(t[1]) - mesh.vertex(t[0]),
                                              mesh.vertex(t[2]) - mesh.vertex(t[0])));
            }
        if (tri_area > 0.0)
          worst_face = std::max(
              worst_face, mesh.elements[std::size_t(e)].diameter * f.length / (2.0 * tri_area));
        else
          worst_face = 1e300;  // no sub-triangle carries this face
      }
    }
    q.face_simplex_ratio = worst_face;

    double min_shape = 1e300, min_share = 1e300;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const Polygon& poly = mesh.elements[std::size_t(e)];
      min_shape = std::min(min_shape, poly.area / (poly.diameter * poly.diameter));
      double smallest = 1e300;
      for (const Tri& t : mesh.sub_tri[std::size_t(e)])
        smallest = std::min(smallest, 0.5 * std::abs(cross(mesh.vertex(t[1]) - mesh.vertex(t[0]),
                                                           mesh.vertex(t[2]) - mesh.vertex(t[0]))));
      min_share =
          std::min(min_share, smallest * double(mesh.sub_tri[std::size_t(e)].size()) / poly.area);
    }
    q.min_area_over_diam2 = min_shape;
    q.min_subtri_area_share = min_share;

    // inter-level diameter ratio over faces shared with the next-coarser level
    if (k > 0) {
      const PolyMesh& finer = mesh;
      const Agglomeration& map = hierarchy.maps[std::size_t(k) - 1];
      const PolyMesh& coarser = hierarchy.levels[std::size_t(k) - 1];
      double theta_il = 1.0;
      for (const Face& f : finer.faces) {
        const int gp = map.fine_to_coarse[std::size_t(f.element_plus)];
        const int gm = f.is_boundary() ? -1 : map.fine_to_coarse[std::size_t(f.element_minus)];
        if (gp == gm) continue;  // interior to one aggregate
        theta_il = std::max(theta_il, coarser.elements[std::size_t(gp)].diameter /
                                          finer.elements[std::size_t(f.element_plus)].diameter);
        if (gm >= 0)
          theta_il = std::max(theta_il, coarser.elements[std::size_t(gm)].diameter /
                                            finer.elements[std::size_t(f.element_minus)].diameter);
      }
      q.theta_interlevel = theta_il;
      report.theta_max = std::max(report.theta_max, theta_il);
    }

    q.assumption_flags[0] = q.face_simplex_ratio <= 100.0;
    q.assumption_flags[1] = q.min_area_over_diam2 >= 0.01;
    q.assumption_flags[2] = q.min_subtri_area_share >= 0.01;
    q.assumption_flags[3] = q.theta <= 50.0;
    q.assumption_flags[4] = true;  // filled after theta_max is known
    report.levels.push_back(q);
  }
  for (LevelQuality& q : report.levels) q.assumption_flags[4] = report.theta_max <= 10.0;
  return report;
}

void write_quality_csv(const QualityReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_quality_csv: cannot open " + path);
  out << "level,theta_j,max_faces,element_count,coarsening_factor,theta_interlevel,"
         "a1,a2,a3,a4,a5\n";
  char buf[256];
  for (const LevelQuality& q : report.levels) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%d,%.17g,%.17g,%d,%d,%d,%d,%d\n", q.level, q.theta,
                  q.max_faces_per_element, q.element_count, q.coarsening_factor,
                  q.theta_interlevel, int(q.assumption_flags[0]), int(q.assumption_flags[1]),
                  int(q.assumption_flags[2]), int(q.assumption_flags[3]),
                  int(q.assumption_flags[4]));
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "Theta,%.17g\n", report.theta_max);
  out << buf;
}

Agglomeration aggregate_algebraic_mis(const SparseOperator& matrix) {
  const int n = matrix.rows;
  if (n == 0) throw std::invalid_argument("aggregate_algebraic_mis: empty matrix");

  std::vector<int> root_of(std::size_t(n), -1);
  std::vector<char> blocked(std::size_t(n), 0);
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (blocked[std::size_t(i)]) continue;
    root_of[std::size_t(i)] = int(roots.size());
    roots.push_back(i);
    for (int k = matrix.row_ptr[std::size_t(i)]; k < matrix.row_ptr[std::size_t(i) + 1]; ++k) {
      const int j = matrix.col_idx[std::size_t(k)];
      if (j != i && matrix.values[std::size_t(k)] != 0.0) blocked[std::size_t(j)] = 1;
    }
  }

  Agglomeration agg;
  agg.coarse_count = int(roots.size());
  agg.fine_to_coarse.assign(std::size_t(n), -1);
  for (int i = 0; i < n; ++i) {
    if (root_of[std::size_t(i)] >= 0) {
      agg.fine_to_coarse[std::size_t(i)] = root_of[std::size_t(i)];
      continue;
    }
    int pick = -1;
    double strength = -1.0;
    for (int k = matrix.row_ptr[std::size_t(i)]; k < matrix.row_ptr[std::size_t(i) + 1]; ++k) {
      const int j = matrix.col_idx[std::size_t(k)];
      if (j == i || root_of[std::size_t(j)] < 0) continue;
      const double s = std::abs(matrix.values[std::size_t(k)]);
      if (s > strength || (s == strength && root_of[std::size_t(j)] < pick)) {
        strength = s;
        pick = root_of[std::size_t(j)];
      }
    }
    if (pick < 0)
      throw std::logic_error("aggregate_algebraic_mis: vertex with no root neighbor");
    agg.fine_to_coarse[std::size_t(i)] = pick;
  }
  return agg;
}

void save_hierarchy(const MeshHierarchy& hierarchy, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (int k = 0; k < hierarchy.n_levels(); ++k)
    save_mesh(hierarchy.levels[std::size_t(k)],
              (fs::path(dir) / ("level_" + std::to_string(k + 1) + ".json")).string());
  for (int k = 0; k + 1 < hierarchy.n_levels(); ++k) {
    const std::string path =
        (fs::path(dir) / ("level_" + std::to_string(k + 2) + "_to_" + std::to_string(k + 1) +
                          ".json"))
            .string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_hierarchy: cannot open " + path);
    out << "[";
    const auto& m = hierarchy.maps[std::size_t(k)].fine_to_coarse;
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m[i];
    out << "]\n";
  }
  std::ofstream meta((fs::path(dir) / "hierarchy.json").string());
  meta << "{\"levels\": " << hierarchy.n_levels()
       << ", \"p\": " << (hierarchy.p_per_level.empty() ? 1 : hierarchy.p_per_level[0]) << "}\n";
}

MeshHierarchy load_hierarchy(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream meta((fs::path(dir) / "hierarchy.json").string());
  if (!meta) throw MeshError("load_hierarchy: missing hierarchy.json in " + dir);
  nlohmann::json doc = nlohmann::json::parse(meta);
  const int J = doc.at("levels").get<int>();
  const int p = doc.value("p", 1);

  MeshHierarchy h;
  for (int k = 0; k < J; ++k)
    h.levels.push_back(
        load_mesh((fs::path(dir) / ("level_" + std::to_string(k + 1) + ".json")).string()));
  for (int k = 0; k + 1 < J; ++k) {
    std::ifstream in((fs::path(dir) / ("level_" + std::to_string(k + 2) + "_to_" +
                                       std::to_string(k + 1) + ".json"))
                         .string());
    if (!in) throw MeshError("load_hierarchy: missing map file for level " + std::to_string(k + 2));
    nlohmann::json arr = nlohmann::json::parse(in);
    Agglomeration map;
    map.fine_to_coarse = arr.get<std::vector<int>>();
    map.coarse_count = h.levels[std::size_t(k)].n_elements();
    if (int(map.fine_to_coarse.size()) != h.levels[std::size_t(k) + 1].n_elements())
      throw MeshError("load_hierarchy: map size does not match level " + std::to_string(k + 2));
    h.maps.push_back(std::move(map));
  }
  h.p_per_level.assign(std::size_t(J), p);
  return h;
}

}  // namespace polymg
