#include "rgs/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace rgs {

SparseMatrix SparseMatrix::from_triplets(Index n, std::vector<Triplet> entries,
                                         bool symmetric_expansion_applied) {
  if (n < 0) throw InvalidArgument("sparse matrix dimension must be >= 0");
  for (const auto& t : entries)
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw DimensionError("sparse entry (" + std::to_string(t.row) + "," +
                           std::to_string(t.col) + ") out of bounds");
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix A;
  A.n_ = n;
  A.symmetric_ = symmetric_expansion_applied;
  A.row_ptr_.assign(static_cast<std::size_t>(n + 1), 0);
  A.col_idx_.reserve(entries.size());
  A.values_.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Triplet& t = entries[e];
    if (e > 0 && entries[e - 1].row == t.row && entries[e - 1].col == t.col) {
      A.values_.back() += t.value;
      continue;
    }
    A.col_idx_.push_back(t.col);
    A.values_.push_back(t.value);
    ++A.row_ptr_[static_cast<std::size_t>(t.row + 1)];
  }
  for (Index r = 0; r < n; ++r) A.row_ptr_[r + 1] += A.row_ptr_[r];
  return A;
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DimensionError("from_dense: matrix must be square");
  std::vector<Triplet> t;
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) t.push_back({i, j, A(i, j)});
  return from_triplets(A.rows(), std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != n_ || static_cast<Index>(y.size()) != n_)
    throw DimensionError("spmv: dimension mismatch");
  for (Index r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += values_[p] * x[col_idx_[p]];
    y[r] = acc;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != n_ || static_cast<Index>(y.size()) != n_)
    throw DimensionError("spmv: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (Index r = 0; r < n_; ++r) {
    const double xr = x[r];
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) y[col_idx_[p]] += values_[p] * xr;
  }
}

Eigen::VectorXd SparseMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(n_);
  multiply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), n_));
  return y;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_, n_);
  for (Index r = 0; r < n_; ++r)
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) D(r, col_idx_[p]) += values_[p];
  return D;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index r = 0; r < n_; ++r)
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({r, col_idx_[p], values_[p]});
  return t;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

Index SparseMatrix::find(Index row, Index col) const {
  const auto b = col_idx_.begin() + row_ptr_[row];
  const auto e = col_idx_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(b, e, col);
  return it != e && *it == col ? static_cast<Index>(it - col_idx_.begin()) : -1;
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
  return n_ == o.n_ && row_ptr_ == o.row_ptr_ && col_idx_ == o.col_idx_ && values_ == o.values_;
}

Ilu0::Ilu0(const SparseMatrix& A) : lu_(A) {
  const Index n = A.n();
  const auto& rp = lu_.row_ptr();
  const auto& ci = lu_.col_idx();
  auto& v = lu_.values();
  diag_.resize(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    diag_[r] = lu_.find(r, r);
    if (diag_[r] < 0) throw PivotError(r, 0.0);
  }
  // IKJ variant restricted to the pattern.
  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    for (Index p = rp[i]; p < rp[i + 1]; ++p) pos[ci[p]] = p;
    for (Index p = rp[i]; p < rp[i + 1] && ci[p] < i; ++p) {
      const Index k = ci[p];
      const double piv = v[diag_[k]];
      v[p] /= piv;
      const double lik = v[p];
      for (Index q = diag_[k] + 1; q < rp[k + 1]; ++q) {
        const Index at = pos[ci[q]];
        if (at >= 0) v[at] -= lik * v[q];
      }
    }
    for (Index p = rp[i]; p < rp[i + 1]; ++p) pos[ci[p]] = -1;
    const double d = v[diag_[i]];
    if (!(std::abs(d) >= 1e-30)) throw PivotError(i, d);
  }
}

void Ilu0::solve(std::span<const double> b, std::span<double> x) const {
  const Index n = lu_.n();
  if (static_cast<Index>(b.size()) != n || static_cast<Index>(x.size()) != n)
    throw DimensionError("ilu0 solve: dimension mismatch");
  const auto& rp = lu_.row_ptr();
  const auto& ci = lu_.col_idx();
  const auto& v = lu_.values();
  for (Index i = 0; i < n; ++i) {
    double acc = b[i];
    for (Index p = rp[i]; p < diag_[i]; ++p) acc -= v[p] * x[ci[p]];
    x[i] = acc;
  }
  for (Index i = n - 1; i >= 0; --i) {
    double acc = x[i];
    for (Index p = diag_[i] + 1; p < rp[i + 1]; ++p) acc -= v[p] * x[ci[p]];
    x[i] = acc / v[diag_[i]];
  }
}

void Ilu0::solve_transpose(std::span<const double> b, std::span<double> x) const {
  const Index n = lu_.n();
  if (static_cast<Index>(b.size()) != n || static_cast<Index>(x.size()) != n)
    throw DimensionError("ilu0 solve: dimension mismatch");
  const auto& rp = lu_.row_ptr();
  const auto& ci = lu_.col_idx();
  const auto& v = lu_.values();
  // U^T z = b (forward), then L^T x = z (backward), column-oriented.
  std::copy(b.begin(), b.end(), x.begin());
  for (Index i = 0; i < n; ++i) {
    x[i] /= v[diag_[i]];
    const double xi = x[i];
    for (Index p = diag_[i] + 1; p < rp[i + 1]; ++p) x[ci[p]] -= v[p] * xi;
  }
  for (Index i = n - 1; i >= 0; --i) {
    const double xi = x[i];
    for (Index p = rp[i]; p < diag_[i]; ++p) x[ci[p]] -= v[p] * xi;
  }
}

Eigen::MatrixXd Ilu0::lower() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(lu_.n(), lu_.n());
  const auto& rp = lu_.row_ptr();
  for (Index i = 0; i < lu_.n(); ++i)
    for (Index p = rp[i]; p < diag_[i]; ++p) L(i, lu_.col_idx()[p]) = lu_.values()[p];
  return L;
}

Eigen::MatrixXd Ilu0::upper() const {
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(lu_.n(), lu_.n());
  const auto& rp = lu_.row_ptr();
  for (Index i = 0; i < lu_.n(); ++i)
    for (Index p = diag_[i]; p < rp[i + 1]; ++p) U(i, lu_.col_idx()[p]) = lu_.values()[p];
  return U;
}

}  // namespace rgs
