#include "polymg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace polymg {

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int k = row_ptr[std::size_t(i)]; k < row_ptr[std::size_t(i) + 1]; ++k)
      s += values[std::size_t(k)] * x[std::size_t(col_idx[std::size_t(k)])];
    y[std::size_t(i)] = s;
  }
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows));
  apply(x, y);
  return y;
}

double SparseOperator::entry(int i, int j) const {
  const auto b = col_idx.begin() + row_ptr[std::size_t(i)];
  const auto e = col_idx.begin() + row_ptr[std::size_t(i) + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return values[std::size_t(it - col_idx.begin())];
}

double SparseOperator::symmetry_defect() const {
  double d = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[std::size_t(i)]; k < row_ptr[std::size_t(i) + 1]; ++k)
      d = std::max(d, std::abs(values[std::size_t(k)] - entry(col_idx[std::size_t(k)], i)));
  return d;
}

SparseOperator SparseOperator::transposed() const {
  SparseOperator t;
  t.rows = cols;
  t.cols = rows;
  t.symmetric = symmetric;
  t.row_ptr.assign(std::size_t(cols) + 1, 0);
  for (int j : col_idx) ++t.row_ptr[std::size_t(j) + 1];
  for (int i = 0; i < cols; ++i) t.row_ptr[std::size_t(i) + 1] += t.row_ptr[std::size_t(i)];
  t.col_idx.resize(col_idx.size());
  t.values.resize(values.size());
  std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[std::size_t(i)]; k < row_ptr[std::size_t(i) + 1]; ++k) {
      const int j = col_idx[std::size_t(k)];
      const int slot = next[std::size_t(j)]++;
      t.col_idx[std::size_t(slot)] = i;
      t.values[std::size_t(slot)] = values[std::size_t(k)];
    }
  return t;
}

SparseOperator from_triplets(int rows, int cols,
                             std::vector<std::tuple<int, int, double>> triplets,
                             bool symmetric) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) < std::get<0>(b) ||
           (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) < std::get<1>(b));
  });
  SparseOperator m;
  m.rows = rows;
  m.cols = cols;
  m.symmetric = symmetric;
  m.row_ptr.assign(std::size_t(rows) + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const int i = std::get<0>(triplets[k]);
    const int j = std::get<1>(triplets[k]);
    double v = 0.0;
    while (k < triplets.size() && std::get<0>(triplets[k]) == i && std::get<1>(triplets[k]) == j)
      v += std::get<2>(triplets[k++]);
    m.col_idx.push_back(j);
    m.values.push_back(v);
    ++m.row_ptr[std::size_t(i) + 1];
  }
  for (int i = 0; i < rows; ++i) m.row_ptr[std::size_t(i) + 1] += m.row_ptr[std::size_t(i)];
  return m;
}

BlockMatrixBuilder::BlockMatrixBuilder(std::vector<std::vector<int>> neighbors, int block)
    : block_(block), nbr_(std::move(neighbors)) {
  const int nb = int(nbr_.size());
  for (int e = 0; e < nb; ++e) {
    auto& list = nbr_[std::size_t(e)];
    list.push_back(e);
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  mat_.rows = mat_.cols = nb * block_;
  mat_.row_ptr.assign(std::size_t(mat_.rows) + 1, 0);
  std::size_t nnz = 0;
  for (int e = 0; e < nb; ++e) nnz += nbr_[std::size_t(e)].size() * std::size_t(block_ * block_);
  mat_.col_idx.reserve(nnz);
  mat_.values.assign(nnz, 0.0);
  for (int e = 0; e < nb; ++e)
    for (int a = 0; a < block_; ++a) {
      for (int f : nbr_[std::size_t(e)])
        for (int b = 0; b < block_; ++b) mat_.col_idx.push_back(f * block_ + b);
      mat_.row_ptr[std::size_t(e * block_ + a) + 1] =
          mat_.row_ptr[std::size_t(e * block_ + a)] + int(nbr_[std::size_t(e)].size()) * block_;
    }
}

void BlockMatrixBuilder::add_block(int be, int bf, std::span<const double> local) {
  const auto& list = nbr_[std::size_t(be)];
  const auto it = std::lower_bound(list.begin(), list.end(), bf);
  if (it == list.end() || *it != bf)
    throw std::logic_error("BlockMatrixBuilder: block outside the registered pattern");
  const int slot = int(it - list.begin());
  for (int a = 0; a < block_; ++a) {
    const int base = mat_.row_ptr[std::size_t(be * block_ + a)] + slot * block_;
    for (int b = 0; b < block_; ++b)
      mat_.values[std::size_t(base + b)] += local[std::size_t(a * block_ + b)];
  }
}

SparseOperator BlockMatrixBuilder::take(bool symmetric) {
  mat_.symmetric = symmetric;
  return std::move(mat_);
}

void write_matrix_market(const SparseOperator& a, const std::string& path, bool lower_symmetric) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real "
      << (lower_symmetric ? "symmetric" : "general") << "\n";
  int count = 0;
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[std::size_t(i)]; k < a.row_ptr[std::size_t(i) + 1]; ++k)
      if (!lower_symmetric || a.col_idx[std::size_t(k)] <= i) ++count;
  out << a.rows << " " << a.cols << " " << count << "\n";
  char buf[64];
  for (int i = 0; i < a.rows; ++i)
    for (int k = a.row_ptr[std::size_t(i)]; k < a.row_ptr[std::size_t(i) + 1]; ++k) {
      const int j = a.col_idx[std::size_t(k)];
      if (lower_symmetric && j > i) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, j + 1, a.values[std::size_t(k)]);
      out << buf;
    }
  if (!out) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace polymg
