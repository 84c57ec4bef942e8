#pragma once

#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace polymg {

/// Compressed-sparse-row matrix. Column indices are sorted within each row.
struct SparseOperator {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;
  bool symmetric = false;

  int nnz() const { return int(col_idx.size()); }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  /// Stored entry or 0.
  double entry(int i, int j) const;

  /// max_ij |A_ij - A_ji| over the stored pattern.
  double symmetry_defect() const;

  SparseOperator transposed() const;
};

/// Builds a CSR matrix from (row, col, value) triplets; duplicate positions
/// are summed in a canonical order, so the result does not depend on the
/// insertion order.
SparseOperator from_triplets(int rows, int cols,
                             std::vector<std::tuple<int, int, double>> triplets,
                             bool symmetric = false);

/// CSR assembly for block-structured DG operators: square blocks of size
/// `block` and one block row/column per element. The sparsity skeleton is
/// fixed up front from the element adjacency, and add_block accumulates into
/// it, so the value layout is deterministic.
class BlockMatrixBuilder {
 public:
  BlockMatrixBuilder(std::vector<std::vector<int>> neighbors, int block);

  /// C += local, where C is the (be, bf) block. bf must be be or one of its
  /// registered neighbors. `local` is row-major block x block.
  void add_block(int be, int bf, std::span<const double> local);

  SparseOperator take(bool symmetric);

 private:
  int block_ = 0;
  std::vector<std::vector<int>> nbr_;  // sorted, includes self
  SparseOperator mat_;
};

/// Matrix Market coordinate format, real. When `lower_symmetric` is set the
/// header says `symmetric` and only the lower triangle is written.
void write_matrix_market(const SparseOperator& a, const std::string& path,
                         bool lower_symmetric = false);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha x

}  // namespace polymg
