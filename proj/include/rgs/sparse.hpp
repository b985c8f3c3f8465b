#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rgs/errors.hpp"
#include "rgs/precision.hpp"

namespace rgs {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Square matrix in compressed sparse row form. Column indices are sorted
/// within each row and unique.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Duplicate (row, col) entries are summed. Explicit zeros are kept.
  static SparseMatrix from_triplets(Index n, std::vector<Triplet> entries,
                                    bool symmetric_expansion_applied = false);
  static SparseMatrix from_dense(const Eigen::MatrixXd& A);

  Index n() const { return n_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  bool symmetric_expansion_applied() const { return symmetric_; }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// y = A x in binary64, each row accumulated left to right.
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x.
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd to_dense() const;
  std::vector<Triplet> triplets() const;
  double frobenius_norm() const;
  /// Position of (row, col) in values(), or -1.
  Index find(Index row, Index col) const;

  bool operator==(const SparseMatrix& o) const;

 private:
  Index n_ = 0;
  bool symmetric_ = false;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Incomplete LU factorization with zero fill: L unit lower and U upper
/// triangular on the sparsity pattern of A, stored together.
class Ilu0 {
 public:
  /// Throws PivotError when a pivot has magnitude below 1e-30 or a diagonal
  /// entry is missing from the pattern.
  explicit Ilu0(const SparseMatrix& A);

  /// x = (LU)^{-1} b.
  void solve(std::span<const double> b, std::span<double> x) const;
  /// x = (LU)^{-T} b.
  void solve_transpose(std::span<const double> b, std::span<double> x) const;

  /// Factors as separate dense matrices, for testing.
  Eigen::MatrixXd lower() const;
  Eigen::MatrixXd upper() const;
  const SparseMatrix& factors() const { return lu_; }

 private:
  SparseMatrix lu_;
  std::vector<Index> diag_;
};

}  // namespace rgs
