#include "polymg/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "polymg/hierarchy.hpp"
#include "polymg/rng.hpp"

namespace polymg {

namespace {

std::vector<double> random_unit(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = uniform01(gen) - 0.5;
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
  return v;
}

}  // namespace

double coercivity_constant(const SparseOperator& a, const SparseOperator& g, double tol,
                           int max_iter) {
  if (a.rows != g.rows) throw std::invalid_argument("coercivity_constant: size mismatch");
  const DirectSolver solver(a);
  std::vector<double> v = random_unit(a.rows, 0x5eedc0ffee);
  std::vector<double> gv(static_cast<std::size_t>(a.rows)), av(static_cast<std::size_t>(a.rows));

  double lambda = 0.0, prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    g.apply(v, gv);
    std::vector<double> x = solver.solve(gv);
    g.apply(x, gv);
    const double gnorm = std::sqrt(dot(x, gv));
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] / gnorm;
    a.apply(v, av);
    lambda = dot(v, av);  // v is G-normalized
    if (it > 0 && std::abs(lambda - prev) <= tol * std::abs(lambda)) break;
    prev = lambda;
  }
  return lambda;
}

double continuity_constant(const SparseOperator& a, const SparseOperator& g, double tol,
                           int max_iter) {
  if (a.rows != g.rows) throw std::invalid_argument("continuity_constant: size mismatch");
  const DirectSolver solver(g);
  std::vector<double> v = random_unit(a.rows, 0x5eedc0ffee);
  std::vector<double> av(static_cast<std::size_t>(a.rows)), gv(static_cast<std::size_t>(a.rows));

  double lambda = 0.0, prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    a.apply(v, av);
    std::vector<double> x = solver.solve(av);
    g.apply(x, gv);
    const double gnorm = std::sqrt(dot(x, gv));
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] / gnorm;
    a.apply(v, av);
    lambda = dot(v, av);
    if (it > 0 && std::abs(lambda - prev) <= tol * std::abs(lambda)) break;
    prev = lambda;
  }
  return lambda;
}

ContractionEstimate contraction_estimate(const MGHierarchy& h, int degree, int m, int iters) {
  const SparseOperator& a = h.fine();
  ContractionEstimate est;
  est.levels = int(h.levels.size());
  est.p = degree;
  est.m = m;

  std::vector<double> e = random_unit(a.rows, 0xc0217ac7103);
  std::vector<double> ae(static_cast<std::size_t>(a.rows));
  a.apply(e, ae);
  double energy = std::sqrt(dot(e, ae));
  for (double& x : e) x /= energy;

  double sup_ratio = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> f = h.apply_error_propagation(e, m, m);
    a.apply(f, ae);
    const double fe = std::sqrt(std::max(0.0, dot(f, ae)));
    sup_ratio = std::max(sup_ratio, fe);  // |||e||| = 1
    if (fe < 1e-14) {
      est.value = 0.0;
      return est;
    }
    for (std::size_t i = 0; i < f.size(); ++i) e[i] = f[i] / fe;
  }
  est.value = sup_ratio;
  return est;
}

PolyMesh make_study_mesh(const std::string& generator, int size, int lloyd_iters,
                         std::uint64_t rng_seed) {
  if (generator == "voronoi") return generate_voronoi_lloyd(size, lloyd_iters, rng_seed);
  if (generator == "tri") return generate_structured_triangular(size);
  throw std::invalid_argument("unknown mesh generator: " + generator);
}

double manufactured_u(Point2 x) { return std::sin(M_PI * x.x) * std::sin(M_PI * x.y); }

double manufactured_f(Point2 x) {
  return 2.0 * M_PI * M_PI * std::sin(M_PI * x.x) * std::sin(M_PI * x.y);
}

ErrorPair manufactured_errors(const DGSpace& space, const PenaltyParams& params,
                              std::span<const double> coeffs) {
  const PolyMesh& mesh = space.mesh();
  const int nl = space.n_local();
  const int order = std::min(2 * space.degree() + 8, 20);
  ErrorPair err;

  std::vector<double> vals(static_cast<std::size_t>(nl)), gx(static_cast<std::size_t>(nl)), gy(static_cast<std::size_t>(nl));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const QuadratureRule rule = element_rule(mesh, e, order);
    const double* c = coeffs.data() + space.dof_offset(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = rule.points[q];
      space.eval(e, x, vals.data());
      space.eval_grad(e, x, gx.data(), gy.data());
      double uh = 0.0, dx = 0.0, dy = 0.0;
      for (int i = 0; i < nl; ++i) {
        uh += c[i] * vals[std::size_t(i)];
        dx += c[i] * gx[std::size_t(i)];
        dy += c[i] * gy[std::size_t(i)];
      }
      const double du = manufactured_u(x) - uh;
      const double ex = M_PI * std::cos(M_PI * x.x) * std::sin(M_PI * x.y) - dx;
      const double ey = M_PI * std::sin(M_PI * x.x) * std::cos(M_PI * x.y) - dy;
      err.l2 += rule.weights[q] * du * du;
      err.dg += rule.weights[q] * (ex * ex + ey * ey);
    }
  }
  // jump terms: the manufactured solution is continuous and vanishes on the
  // boundary, so only u_h contributes
  for (int fi = 0; fi < int(mesh.faces.size()); ++fi) {
    const Face& face = mesh.faces[std::size_t(fi)];
    const double sigma = penalty_sigma(mesh, face, params);
    const QuadratureRule rule = face_rule(mesh, fi, order);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = rule.points[q];
      double jump;
      if (face.is_boundary()) {
        jump = manufactured_u(x) -
               space.value(face.element_plus, x, coeffs.data() + space.dof_offset(face.element_plus));
      } else {
        jump = space.value(face.element_minus, x,
                           coeffs.data() + space.dof_offset(face.element_minus)) -
               space.value(face.element_plus, x,
                           coeffs.data() + space.dof_offset(face.element_plus));
      }
      err.dg += rule.weights[q] * sigma * jump * jump;
    }
  }
  err.l2 = std::sqrt(err.l2);
  err.dg = std::sqrt(err.dg);
  return err;
}

namespace {

double ls_slope(const std::vector<double>& logh, const std::vector<double>& logerr) {
  const double n = double(logh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logh.size(); ++i) {
    sx += logh[i];
    sy += logerr[i];
    sxx += logh[i] * logh[i];
    sxy += logh[i] * logerr[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<RateRow> manufactured_convergence(const std::vector<int>& degrees,
                                              const std::vector<int>& sizes, double c_sigma) {
  std::vector<RateRow> rows;
  for (int p : degrees) {
    RateRow row;
    row.p = p;
    std::vector<double> logh, logdg, logl2;
    for (int n : sizes) {
      const PolyMesh mesh = generate_structured_triangular(n);
      const DGSpace space(mesh, p);
      const PenaltyParams params = study_penalty(c_sigma, p);
      const SparseOperator a = assemble_sipg(space, params);
      const std::vector<double> b = assemble_load(space, manufactured_f);
      const std::vector<double> u = direct_solve(a, b);
      const ErrorPair err = manufactured_errors(space, params, u);
      row.points.push_back({n, mesh.h, err.dg, err.l2});
      logh.push_back(std::log(mesh.h));
      logdg.push_back(std::log(err.dg));
      logl2.push_back(std::log(err.l2));
    }
    row.dg_slope = ls_slope(logh, logdg);
    row.l2_slope = ls_slope(logh, logl2);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<EigPoint> eig_scaling_study(const std::vector<int>& degrees,
                                        const std::vector<int>& sizes, double c_sigma) {
  std::vector<EigPoint> points;
  for (int p : degrees)
    for (int n : sizes) {
      const PolyMesh mesh = generate_structured_triangular(n);
      const DGSpace space(mesh, p);
      const SparseOperator a = assemble_sipg(space, study_penalty(c_sigma, p));
      points.push_back({p, n, estimate_lambda(a, 1.0)});
    }
  return points;
}

MGHierarchy slice_top(const MGHierarchy& h, int use_levels) {
  const int total = int(h.levels.size());
  if (use_levels < 2 || use_levels > total)
    throw std::invalid_argument("slice_top: invalid level count");
  MGHierarchy out;
  out.levels.assign(h.levels.end() - use_levels, h.levels.end());
  out.levels.front().down = TransferPair{};
  out.levels.front().lambda = 0.0;
  out.coarse = DirectSolver(out.levels.front().a);
  return out;
}

std::vector<IterationRow> iteration_study(const StudyConfig& cfg) {
  std::vector<IterationRow> rows;
  const int max_levels =
      *std::max_element(cfg.level_counts.begin(), cfg.level_counts.end());

  for (int size : cfg.sizes) {
    const std::string set = cfg.generator + std::to_string(size);
    const PolyMesh mesh = make_study_mesh(cfg.generator, size, cfg.lloyd_iters, cfg.rng_seed);
    const MeshHierarchy hier =
        build_hierarchy(mesh, max_levels, 1, cfg.target_factor, cfg.rng_seed);

    for (int p : cfg.degrees) {
      const PenaltyParams params = study_penalty(cfg.c_sigma, p);
      const DGSpace fine_space(hier.finest(), p);
      // deterministic random load: a smooth right-hand side aligns with the
      // low end of the spectrum and makes the Krylov counts meaningless for
      // solver comparison
      const std::vector<double> b = random_unit(fine_space.dimension(), 0x10ad ^ cfg.rng_seed);
      const MGHierarchy full = build_mg_hierarchy(hier, params, 1.1);

      MultigridConfig mg;
      mg.tol_rel = cfg.tol_rel;
      mg.max_iter = cfg.max_iter;

      auto record = [&](const char* name, int levels, int m, const SolveReport& rep) {
        rows.push_back({set, p, m, name, levels, rep.iterations, rep.rho, rep.converged});
      };

      for (int levels : cfg.level_counts) {
        const MGHierarchy view = slice_top(full, levels);
        for (int m : cfg.smoothing_steps) {
          mg.m1 = mg.m2 = m;
          std::vector<double> z;
          const SolveReport rep = levels == 2 ? two_level_solve(view, b, z, mg)
                                              : w_cycle_solve(view, b, z, mg);
          const std::string name = levels == 2 ? "TL" : "W" + std::to_string(levels);
          record(name.c_str(), levels, m, rep);
        }
      }

      std::vector<double> x;
      record("CG", 1, 0, cg_solve(full.fine(), b, x, cfg.tol_rel, cfg.max_iter));
      record("PCG", 1, 0,
             pcg_block_jacobi(full.fine(), b, x, fine_space.n_local(), cfg.tol_rel, cfg.max_iter));
    }
  }
  return rows;
}

void write_iteration_csv(const std::vector<IterationRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_iteration_csv: cannot open " + path);
  out << "set,p,m,solver,levels,iterations,rho,converged\n";
  char buf[256];
  for (const IterationRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%d,%d,%.17g,%d\n", r.set.c_str(), r.p, r.m,
                  r.solver.c_str(), r.levels, r.iterations, r.rho, int(r.converged));
    out << buf;
  }
}

std::vector<CoercivityRow> coercivity_study(const StudyConfig& cfg, int levels) {
  std::vector<CoercivityRow> rows;
  for (int size : cfg.sizes) {
    const std::string set = cfg.generator + std::to_string(size);
    const PolyMesh mesh = make_study_mesh(cfg.generator, size, cfg.lloyd_iters, cfg.rng_seed);
    const MeshHierarchy hier = build_hierarchy(mesh, levels, 1, cfg.target_factor, cfg.rng_seed);
    for (int p : cfg.degrees) {
      const PenaltyParams params = study_penalty(cfg.c_sigma, p);
      for (int k = 0; k < hier.n_levels(); ++k) {
        // level index 1 = finest grid (the paper counts coarsening steps up)
        const DGSpace space(hier.levels[std::size_t(hier.n_levels() - 1 - k)], p);
        const SparseOperator a = assemble_sipg(space, params);
        const SparseOperator g = dg_norm_gram(space, params);
        rows.push_back({set, k + 1, p, coercivity_constant(a, g)});
      }
    }
  }
  return rows;
}

void write_coercivity_csv(const std::vector<CoercivityRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_coercivity_csv: cannot open " + path);
  out << "set,level,p,c_coer\n";
  char buf[128];
  for (const CoercivityRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g\n", r.set.c_str(), r.level, r.p, r.value);
    out << buf;
  }
}

AmgDemoResult amg_failure_demo(const MeshHierarchy& hierarchy, int degree, double c_sigma, int m,
                               int max_iter) {
  const PenaltyParams params = study_penalty(c_sigma, degree);
  const DGSpace fine_space(hierarchy.finest(), degree);
  SparseOperator a = assemble_sipg(fine_space, params);
  const std::vector<double> b = assemble_load(fine_space, manufactured_f);

  // Unsmoothed aggregation: indicator prolongation, Galerkin coarse matrix.
  std::vector<MGLevel> down;  // fine to coarse while building
  down.push_back({std::move(a), 0.0, {}});
  while (down.back().a.rows > 200 && int(down.size()) < 10) {
    const SparseOperator& cur = down.back().a;
    const Agglomeration agg = aggregate_algebraic_mis(cur);
    if (agg.coarse_count >= cur.rows) break;

    std::vector<std::tuple<int, int, double>> ptrip;
    ptrip.reserve(static_cast<std::size_t>(cur.rows));
    for (int i = 0; i < cur.rows; ++i)
      ptrip.emplace_back(i, agg.fine_to_coarse[std::size_t(i)], 1.0);
    TransferPair transfer;
    transfer.prolongation = from_triplets(cur.rows, agg.coarse_count, std::move(ptrip));
    transfer.restriction = transfer.prolongation.transposed();

    std::vector<std::tuple<int, int, double>> ctrip;
    ctrip.reserve(std::size_t(cur.nnz()));
    for (int i = 0; i < cur.rows; ++i)
      for (int k = cur.row_ptr[std::size_t(i)]; k < cur.row_ptr[std::size_t(i) + 1]; ++k)
        ctrip.emplace_back(agg.fine_to_coarse[std::size_t(i)],
                           agg.fine_to_coarse[std::size_t(cur.col_idx[std::size_t(k)])],
                           cur.values[std::size_t(k)]);
    SparseOperator coarse =
        from_triplets(agg.coarse_count, agg.coarse_count, std::move(ctrip), true);

    down.back().down = std::move(transfer);
    down.push_back({std::move(coarse), 0.0, {}});
  }

  MGHierarchy alg;
  alg.levels.assign(std::make_move_iterator(down.rbegin()), std::make_move_iterator(down.rend()));
  for (int k = 1; k < int(alg.levels.size()); ++k)
    alg.levels[std::size_t(k)].lambda = estimate_lambda(alg.levels[std::size_t(k)].a, 1.1);
  alg.coarse = DirectSolver(alg.levels[0].a);

  MultigridConfig cfg;
  cfg.m1 = cfg.m2 = m;
  cfg.max_iter = max_iter;

  AmgDemoResult result;
  result.amg_levels = int(alg.levels.size());
  std::vector<double> z;
  result.amg = w_cycle_solve(alg, b, z, cfg);

  const int geo_levels = std::min(3, hierarchy.n_levels());
  const MGHierarchy geo = build_mg_hierarchy(hierarchy, params, 1.1, geo_levels);
  std::vector<double> zg;
  result.geometric = w_cycle_solve(geo, b, zg, cfg);
  return result;
}

}  // namespace polymg
