#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polymg/solvers.hpp"

namespace polymg {

struct StudyConfig {
  std::string generator = "voronoi";  // "voronoi" | "tri"
  std::vector<int> sizes;             // cell counts (voronoi) or grid n (tri)
  std::vector<int> degrees;
  std::vector<int> smoothing_steps;
  std::vector<int> level_counts = {2, 3, 4};
  double c_sigma = 10.0;
  double target_factor = 4.0;
  int lloyd_iters = 20;
  std::uint64_t rng_seed = 1;
  double tol_rel = 1e-8;
  int max_iter = 5000;
};

/// Stabilization used by the quantitative studies: effectively
/// C_sigma * p(p+1) / h instead of the plain p^2 scaling. Calibrated once
/// against the published operator stiffness (Krylov counts, coercivity
/// range, residual contraction per sweep all match under this convention).
inline PenaltyParams study_penalty(double c_sigma, int degree) {
  return {c_sigma * double(degree + 1) / double(degree), degree};
}

/// Smallest generalized eigenvalue of A v = lambda G v by inverse power
/// iteration (each step solves with A); the sharp constant relating the
/// bilinear form to the squared DG norm.
double coercivity_constant(const SparseOperator& a, const SparseOperator& g, double tol = 1e-6,
                           int max_iter = 5000);

/// Largest generalized eigenvalue of A v = lambda G v (power iteration with
/// G solves).
double continuity_constant(const SparseOperator& a, const SparseOperator& g, double tol = 1e-6,
                           int max_iter = 5000);

struct ContractionEstimate {
  int levels = 0;
  int p = 0;
  int m = 0;
  double value = 0.0;
};

/// Energy-norm contraction of the cycle's error propagation operator,
/// measured by power iteration with matrix-free cycle applications and the
/// identity |||E e|||^2 = (A E e, E e). With m1 = m2 the operator is
/// A-self-adjoint and the returned sup-ratio is its energy operator norm.
ContractionEstimate contraction_estimate(const MGHierarchy& h, int degree, int m, int iters = 50);

PolyMesh make_study_mesh(const std::string& generator, int size, int lloyd_iters,
                         std::uint64_t rng_seed);

struct RatePoint {
  int n = 0;
  double h = 0.0;
  double dg_error = 0.0;
  double l2_error = 0.0;
};

struct RateRow {
  int p = 0;
  double dg_slope = 0.0;
  double l2_slope = 0.0;
  std::vector<RatePoint> points;
};

/// Manufactured solution sin(pi x) sin(pi y) on structured triangular
/// meshes; least-squares slopes of log error against log h.
std::vector<RateRow> manufactured_convergence(const std::vector<int>& degrees,
                                              const std::vector<int>& sizes,
                                              double c_sigma = 10.0);

struct EigPoint {
  int p = 0;
  int n = 0;
  double lambda_max = 0.0;
};

/// Largest-eigenvalue estimates (power iteration, safety 1) on structured
/// triangular meshes.
std::vector<EigPoint> eig_scaling_study(const std::vector<int>& degrees,
                                        const std::vector<int>& sizes, double c_sigma = 10.0);

struct IterationRow {
  std::string set;
  int p = 0;
  int m = 0;
  std::string solver;  // TL | W3 | W4 | CG | PCG | AMG-MIS
  int levels = 0;
  int iterations = 0;
  double rho = 0.0;
  bool converged = false;
};

/// All (set, p, m, solver) cells of the iteration tables. Failures are
/// recorded as non-converged rows.
std::vector<IterationRow> iteration_study(const StudyConfig& cfg);

void write_iteration_csv(const std::vector<IterationRow>& rows, const std::string& path);

struct CoercivityRow {
  std::string set;
  int level = 0;  // 1 = finest
  int p = 0;
  double value = 0.0;
};

/// Coercivity constants on each level of an agglomerated hierarchy per mesh
/// set (level 1 row = the input grid).
std::vector<CoercivityRow> coercivity_study(const StudyConfig& cfg, int levels = 4);

void write_coercivity_csv(const std::vector<CoercivityRow>& rows, const std::string& path);

/// Copy of the finest `use_levels` levels with a refreshed coarse
/// factorization.
MGHierarchy slice_top(const MGHierarchy& h, int use_levels);

struct AmgDemoResult {
  SolveReport amg;
  SolveReport geometric;
  int amg_levels = 0;
};

/// Unsmoothed-aggregation W-cycle (maximal-independent-set aggregates,
/// piecewise-constant tentative prolongation, Galerkin coarse operators)
/// against the geometric W-cycle on the same system.
AmgDemoResult amg_failure_demo(const MeshHierarchy& hierarchy, int degree, double c_sigma = 10.0,
                               int m = 5, int max_iter = 5000);

double manufactured_u(Point2 x);
double manufactured_f(Point2 x);

struct ErrorPair {
  double l2 = 0.0;
  double dg = 0.0;
};

/// Errors of a coefficient vector against the manufactured solution,
/// integrated with rules of order min(2p+8, 20).
ErrorPair manufactured_errors(const DGSpace& space, const PenaltyParams& params,
                              std::span<const double> coeffs);

}  // namespace polymg
