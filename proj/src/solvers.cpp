#include "polymg/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "polymg/dg_space.hpp"
#include "polymg/rng.hpp"

namespace polymg {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseOperator& a) {
  Eigen::SparseMatrix<double> m(a.rows, a.cols);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(a.nnz()));
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[std::size_t(i)]; k < a.row_ptr[std::size_t(i) + 1]; ++k)
      trip.emplace_back(i, a.col_idx[std::size_t(k)], a.values[std::size_t(k)]);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

std::vector<double> residual(const SparseOperator& a, std::span<const double> rhs,
                             std::span<const double> z) {
  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> az(static_cast<std::size_t>(a.rows));
  a.apply(z, az);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= az[i];
  return r;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void finish_report(SolveReport& rep) {
  const double r0 = rep.residual_history.front();
  const double rn = rep.residual_history.back();
  rep.rho = (rep.iterations > 0 && r0 > 0.0 && rn > 0.0)
                ? std::exp(std::log(rn / r0) / double(rep.iterations))
                : 0.0;
}

}  // namespace

double estimate_lambda(const SparseOperator& a, double safety, double tol, int max_iter) {
  const int n = a.rows;
  if (n == 0) return 0.0;
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = uniform01(gen) - 0.5;
  const double nv = norm2(v);
  for (double& x : v) x /= nv;

  std::vector<double> w(static_cast<std::size_t>(n));
  double rq = 0.0, rq_prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    a.apply(v, w);
    rq = dot(v, w);
    const double nw = norm2(w);
    if (nw == 0.0) {
      std::fprintf(stderr, "estimate_lambda: warning, zero operator\n");
      return 0.0;
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
    if (it > 0 && std::abs(rq - rq_prev) <= tol * std::abs(rq)) break;
    rq_prev = rq;
  }
  return safety * rq;
}

void richardson_smooth(const SparseOperator& a, double lambda, std::span<const double> rhs,
                       std::vector<double>& z, int m) {
  const double inv = 1.0 / lambda;
  std::vector<double> az(static_cast<std::size_t>(a.rows));
  for (int s = 0; s < m; ++s) {
    a.apply(z, az);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += inv * (rhs[i] - az[i]);
  }
}

DirectSolver::DirectSolver(const SparseOperator& a) : n_(a.rows) {
  if (a.rows != a.cols) throw std::invalid_argument("DirectSolver: matrix must be square");
  if (a.rows > 200000) throw std::invalid_argument("DirectSolver: dimension above 2e5");
  llt_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  llt_->compute(to_eigen(a));
  if (llt_->info() != Eigen::Success)
    throw std::runtime_error("DirectSolver: factorization failed (matrix not positive definite?)");
}

void DirectSolver::solve(std::span<const double> rhs, std::vector<double>& x) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
  Eigen::VectorXd sol = llt_->solve(b);
  x.assign(sol.data(), sol.data() + n_);
}

std::vector<double> DirectSolver::solve(std::span<const double> rhs) const {
  std::vector<double> x;
  solve(rhs, x);
  return x;
}

std::vector<double> direct_solve(const SparseOperator& a, std::span<const double> rhs) {
  return DirectSolver(a).solve(rhs);
}

void MGHierarchy::cycle(int lvl, std::span<const double> rhs, std::vector<double>& z, int m1,
                        int m2) const {
  if (lvl == 0) {
    coarse.solve(rhs, z);
    return;
  }
  const MGLevel& level = levels[std::size_t(lvl)];
  richardson_smooth(level.a, level.lambda, rhs, z, m1);

  const std::vector<double> r = residual(level.a, rhs, z);
  std::vector<double> rc(static_cast<std::size_t>(level.down.restriction.rows));
  level.down.restriction.apply(r, rc);

  std::vector<double> ec(rc.size(), 0.0);
  cycle(lvl - 1, rc, ec, m1, m2);
  if (lvl - 1 > 0) cycle(lvl - 1, rc, ec, m1, m2);  // second recursion of the W-cycle

  std::vector<double> corr(z.size());
  level.down.prolongation.apply(ec, corr);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += corr[i];

  richardson_smooth(level.a, level.lambda, rhs, z, m2);
}

std::vector<double> MGHierarchy::apply_error_propagation(std::span<const double> e, int m1,
                                                         int m2) const {
  // One cycle on A x = 0 with initial guess e maps the iterate e to E e.
  std::vector<double> z(e.begin(), e.end());
  const std::vector<double> zero(e.size(), 0.0);
  cycle(top(), zero, z, m1, m2);
  return z;
}

MGHierarchy build_mg_hierarchy(const MeshHierarchy& hierarchy, const PenaltyParams& params,
                               double lambda_safety, int use_levels) {
  const int total = hierarchy.n_levels();
  const int J = use_levels > 0 ? use_levels : total;
  if (J < 2 || J > total)
    throw std::invalid_argument("build_mg_hierarchy: invalid level count");
  const int base = total - J;  // coarsest mesh level used

  MGHierarchy h;
  h.levels.resize(static_cast<std::size_t>(J));
  std::vector<DGSpace> spaces;
  spaces.reserve(static_cast<std::size_t>(J));
  for (int k = 0; k < J; ++k) {
    spaces.emplace_back(hierarchy.levels[std::size_t(base + k)], params.degree);
    h.levels[std::size_t(k)].a = assemble_sipg(spaces.back(), params);
  }
  for (int k = 1; k < J; ++k) {
    h.levels[std::size_t(k)].lambda = estimate_lambda(h.levels[std::size_t(k)].a, lambda_safety);
    h.levels[std::size_t(k)].down = prolongation_matrix(
        spaces[std::size_t(k) - 1], spaces[std::size_t(k)], hierarchy.maps[std::size_t(base + k - 1)]);
  }
  h.coarse = DirectSolver(h.levels[0].a);
  return h;
}

namespace {

SolveReport run_multigrid(const MGHierarchy& h, std::span<const double> rhs,
                          std::vector<double>& z, const MultigridConfig& cfg,
                          const char* label) {
  Stopwatch clock;
  SolveReport rep;
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s levels=%d m1=%d m2=%d tol=%.2e", label,
                  int(h.levels.size()), cfg.m1, cfg.m2, cfg.tol_rel);
    rep.config = buf;
  }
  const SparseOperator& a = h.fine();
  if (z.empty()) z.assign(std::size_t(a.rows), 0.0);

  const double nr0 = norm2(residual(a, rhs, z));
  rep.residual_history.push_back(nr0);
  if (nr0 == 0.0) {
    rep.converged = true;
    rep.wall_time_s = clock.seconds();
    return rep;
  }
  for (int k = 1; k <= cfg.max_iter; ++k) {
    h.cycle(h.top(), rhs, z, cfg.m1, cfg.m2);
    const double nr = norm2(residual(a, rhs, z));
    rep.residual_history.push_back(nr);
    rep.iterations = k;
    if (nr <= cfg.tol_rel * nr0) {
      rep.converged = true;
      break;
    }
    if (nr >= 1e6 * nr0) {
      rep.diverged = true;
      break;
    }
  }
  finish_report(rep);
  rep.wall_time_s = clock.seconds();
  return rep;
}

}  // namespace

SolveReport two_level_solve(const MGHierarchy& h, std::span<const double> rhs,
                            std::vector<double>& z, const MultigridConfig& cfg) {
  if (h.levels.size() != 2)
    throw std::invalid_argument("two_level_solve: hierarchy must have exactly 2 levels");
  return run_multigrid(h, rhs, z, cfg, "two_level");
}

SolveReport w_cycle_solve(const MGHierarchy& h, std::span<const double> rhs,
                          std::vector<double>& z, const MultigridConfig& cfg) {
  if (h.levels.size() < 2)
    throw std::invalid_argument("w_cycle_solve: hierarchy must have at least 2 levels");
  return run_multigrid(h, rhs, z, cfg, "w_cycle");
}

SolveReport cg_solve(const SparseOperator& a, std::span<const double> rhs, std::vector<double>& x,
                     double tol_rel, int max_iter) {
  Stopwatch clock;
  SolveReport rep;
  rep.config = "cg tol=" + std::to_string(tol_rel);
  const int n = a.rows;
  x.assign(std::size_t(n), 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  const double nr0 = norm2(r);
  rep.residual_history.push_back(nr0);
  if (nr0 == 0.0) {
    rep.converged = true;
    rep.wall_time_s = clock.seconds();
    return rep;
  }
  std::vector<double> p = r, ap(static_cast<std::size_t>(n));
  double rs = dot(r, r);
  for (int k = 1; k <= max_iter; ++k) {
    a.apply(p, ap);
    const double alpha = rs / dot(p, ap);
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double nr = norm2(r);
    rep.residual_history.push_back(nr);
    rep.iterations = k;
    if (nr <= tol_rel * nr0) {
      rep.converged = true;
      break;
    }
    const double rs_next = nr * nr;
    const double beta = rs_next / rs;
    rs = rs_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  finish_report(rep);
  rep.wall_time_s = clock.seconds();
  return rep;
}

SolveReport pcg_block_jacobi(const SparseOperator& a, std::span<const double> rhs,
                             std::vector<double>& x, int block, double tol_rel, int max_iter) {
  Stopwatch clock;
  SolveReport rep;
  rep.config = "pcg_block_jacobi block=" + std::to_string(block);
  const int n = a.rows;
  if (n % block != 0)
    throw std::invalid_argument("pcg_block_jacobi: dimension not a multiple of the block size");
  const int nb = n / block;

  std::vector<Eigen::LLT<Eigen::MatrixXd>> blocks;
  blocks.reserve(static_cast<std::size_t>(nb));
  for (int e = 0; e < nb; ++e) {
    Eigen::MatrixXd d(block, block);
    for (int i = 0; i < block; ++i)
      for (int j = 0; j < block; ++j) d(i, j) = a.entry(e * block + i, e * block + j);
    blocks.emplace_back(d);
    if (blocks.back().info() != Eigen::Success)
      throw std::runtime_error("pcg_block_jacobi: singular diagonal block for element " +
                               std::to_string(e));
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    for (int e = 0; e < nb; ++e) {
      Eigen::Map<const Eigen::VectorXd> re(r.data() + e * block, block);
      Eigen::Map<Eigen::VectorXd> ze(z.data() + e * block, block);
      ze = blocks[std::size_t(e)].solve(re);
    }
  };

  x.assign(std::size_t(n), 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  const double nr0 = norm2(r);
  rep.residual_history.push_back(nr0);
  if (nr0 == 0.0) {
    rep.converged = true;
    rep.wall_time_s = clock.seconds();
    return rep;
  }
  std::vector<double> z(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n)), ap(static_cast<std::size_t>(n));
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (int k = 1; k <= max_iter; ++k) {
    a.apply(p, ap);
    const double alpha = rz / dot(p, ap);
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double nr = norm2(r);
    rep.residual_history.push_back(nr);
    rep.iterations = k;
    if (nr <= tol_rel * nr0) {
      rep.converged = true;
      break;
    }
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  finish_report(rep);
  rep.wall_time_s = clock.seconds();
  return rep;
}

void write_report_csv(const SolveReport& report, const std::string& set_label, int p, int m,
                      const std::string& solver, int levels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "set,p,m,solver,levels,iterations,rho,converged\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%d,%d,%.17g,%d\n", set_label.c_str(), p, m,
                solver.c_str(), levels, report.iterations, report.rho, int(report.converged));
  out << buf;
}

void write_residual_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_residual_csv: cannot open " + path);
  out << "iteration,residual\n";
  char buf[64];
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, report.residual_history[k]);
    out << buf;
  }
}

}  // namespace polymg
