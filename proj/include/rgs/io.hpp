#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rgs/diagnostics.hpp"
#include "rgs/gram_schmidt.hpp"
#include "rgs/sparse.hpp"

namespace rgs {

// ------------------------------------------------------------- Matrix Market

/// Coordinate format, real (or integer) field, general or symmetric, square.
/// Symmetric storage is expanded, duplicates are summed.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes coordinate real general with 17 significant digits.
void write_matrix_market(const SparseMatrix& A, std::ostream& out);
void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path);

// ---------------------------------------------------------------- generators

/// f_mu(x) = sin(10(mu + x)) / (cos(100(mu - x)) + 1.1)
double synthetic_function(double mu, double x);
/// Entry (i, j), 0-based, of the n x m synthetic matrix on the inclusive grids
/// x_i = i/(n-1), mu_j = j/(m-1).
double synthetic_entry(Index n, Index m, Index i, Index j);
Eigen::MatrixXd synthetic_matrix(Index n, Index m);
ColumnSource synthetic_columns(Index n, Index m);

/// 5-point Laplacian on a grid x grid interior mesh (Dirichlet), unscaled.
SparseMatrix laplacian_2d(Index grid);

/// Nonsymmetric n x n matrix: unit diagonal plus nnz_per_row off-diagonal
/// entries per row at distinct random columns, uniform in
/// [-0.5, 0.5]/sqrt(nnz_per_row). Eigenvalues cluster in a disc around 1.
SparseMatrix random_sparse(Index n, Index nnz_per_row, std::uint64_t seed);

/// "laplacian:SIZE", "randsparse:N[,NNZ[,SEED]]" or a path to a .mtx file.
SparseMatrix load_sparse(std::string_view spec);

// -------------------------------------------------------------------- report

/// Per-iteration CSV columns, in file order.
inline constexpr const char* kReportColumns[] = {
    "iteration", "cond_Q",   "cond_S",    "cond_W",      "loss_of_orthogonality",
    "factorization_error", "omega", "omega_bar", "cert_margin", "residual_norm"};

struct ReportRow {
  Index iteration = 0;
  double cond_q = kMissing;
  double cond_s = kMissing;
  double cond_w = kMissing;
  double loss_of_orthogonality = kMissing;
  double factorization_error = kMissing;
  double omega = kMissing;
  double omega_bar = kMissing;
  double cert_margin = kMissing;
  double residual_norm = kMissing;

  static ReportRow from(const IterationRecord& r);
};

struct ExperimentReport {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ReportRow> rows;

  /// Replaces an existing key or appends a new one.
  void set(const std::string& key, const std::string& value);
  const std::string* get(const std::string& key) const;
};

/// Metadata as "# key=value" lines, then the header, then one line per row.
/// Missing values are empty fields; numbers use 17 significant digits.
void write_report(const ExperimentReport& r, std::ostream& out);
void write_report(const ExperimentReport& r, const std::filesystem::path& path);
ExperimentReport read_report(std::istream& in);
ExperimentReport read_report(const std::filesystem::path& path);

/// printf("%.17g"); NaN prints as an empty string.
std::string format_number(double v);

}  // namespace rgs
