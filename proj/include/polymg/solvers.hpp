#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <optional>
#include <string>

#include "polymg/assembly.hpp"
#include "polymg/transfer.hpp"

namespace polymg {

struct MultigridConfig {
  int m1 = 3;
  int m2 = 3;
  double lambda_safety = 1.1;
  double tol_rel = 1e-8;
  int max_iter = 5000;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // [0] = ||r0||_2
  double rho = 0.0;                      // exp(ln(||r_N||/||r_0||)/N)
  bool converged = false;
  bool diverged = false;
  double wall_time_s = 0.0;
  std::string config;
};

/// Power iteration upper bound for the largest eigenvalue of symmetric A;
/// returns safety * (final Rayleigh quotient).
double estimate_lambda(const SparseOperator& a, double safety, double tol = 1e-4,
                       int max_iter = 200);

/// m Richardson sweeps z <- z + (1/lambda) (rhs - A z).
void richardson_smooth(const SparseOperator& a, double lambda, std::span<const double> rhs,
                       std::vector<double>& z, int m);

/// Sparse symmetric factorization, kept for repeated solves.
class DirectSolver {
 public:
  DirectSolver() = default;
  explicit DirectSolver(const SparseOperator& a);
  std::vector<double> solve(std::span<const double> rhs) const;
  void solve(std::span<const double> rhs, std::vector<double>& x) const;

 private:
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
  int n_ = 0;
};

std::vector<double> direct_solve(const SparseOperator& a, std::span<const double> rhs);

/// Operator, smoother scale and down-transfer of one level.
struct MGLevel {
  SparseOperator a;
  double lambda = 0.0;   // >= largest eigenvalue of a; unset on the coarsest level
  TransferPair down;     // to the next coarser level; unset on the coarsest level
};

/// Assembled data of a multilevel scheme; level 0 is the coarsest and is
/// solved directly.
struct MGHierarchy {
  std::vector<MGLevel> levels;
  DirectSolver coarse;

  int top() const { return int(levels.size()) - 1; }
  const SparseOperator& fine() const { return levels.back().a; }

  /// One cycle of the recursive scheme at `lvl`: m1 Richardson sweeps, the
  /// restricted residual solved by two recursive calls (one direct solve at
  /// the bottom), prolongated correction, m2 sweeps. z is the initial guess
  /// and is updated in place.
  void cycle(int lvl, std::span<const double> rhs, std::vector<double>& z, int m1, int m2) const;

  /// Error propagation of one cycle: returns the new error for initial error e.
  std::vector<double> apply_error_propagation(std::span<const double> e, int m1, int m2) const;
};

/// Assemble operators, smoother scales and transfers for the finest
/// `use_levels` levels of the mesh hierarchy (all of them when 0).
MGHierarchy build_mg_hierarchy(const MeshHierarchy& hierarchy, const PenaltyParams& params,
                               double lambda_safety, int use_levels = 0);

/// Iterates cycles until the relative Euclidean residual falls under
/// cfg.tol_rel. z carries the initial guess in and the solution out.
SolveReport two_level_solve(const MGHierarchy& h, std::span<const double> rhs,
                            std::vector<double>& z, const MultigridConfig& cfg);
SolveReport w_cycle_solve(const MGHierarchy& h, std::span<const double> rhs,
                          std::vector<double>& z, const MultigridConfig& cfg);

SolveReport cg_solve(const SparseOperator& a, std::span<const double> rhs, std::vector<double>& x,
                     double tol_rel, int max_iter);

/// PCG with the inverse of the per-element diagonal blocks (block size =
/// local space dimension).
SolveReport pcg_block_jacobi(const SparseOperator& a, std::span<const double> rhs,
                             std::vector<double>& x, int block, double tol_rel, int max_iter);

void write_report_csv(const SolveReport& report, const std::string& set_label, int p, int m,
                      const std::string& solver, int levels, const std::string& path);
void write_residual_csv(const SolveReport& report, const std::string& path);

}  // namespace polymg
