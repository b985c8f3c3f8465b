#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rgs/diagnostics.hpp"
#include "rgs/gram_schmidt.hpp"
#include "rgs/sketch.hpp"
#include "rgs/sparse.hpp"

namespace rgs {

/// Square linear map given by its action and the action of its transpose.
struct LinearOperator {
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;
  Index n = 0;
  Apply apply;
  Apply apply_transpose;  ///< optional; required for norm estimation

  static LinearOperator from_sparse(const SparseMatrix& A);
  static LinearOperator from_dense(const Eigen::MatrixXd& A);
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
};

/// A preconditioner M applied as M^{-1}.
struct Preconditioner {
  LinearOperator::Apply solve;
  LinearOperator::Apply solve_transpose;

  static Preconditioner from_ilu(const Ilu0& ilu);
  static Preconditioner from_dense_lu(const Eigen::MatrixXd& M);
};

/// Two-norm estimate from power iterations on A^T A started at the
/// normalized all-ones vector.
double estimate_norm(const LinearOperator& A, int iterations = 20);

struct ArnoldiDecomposition {
  Eigen::MatrixXd q;  ///< n x m_eff basis in binary64
  Eigen::MatrixXd h;  ///< rows x (m_eff - 1) upper Hessenberg (square on breakdown)
  double r11 = 0.0;
  std::optional<Index> breakdown_at;  ///< 1-based column that broke down
  QrFactors factors;
};

/// Arnoldi: w_1 = b, w_i = A q_{i-1}, each orthogonalized by
/// the chosen variant. H holds columns 2..m of R. On a breakdown at column i
/// the decomposition stops there and H gets the final column from the
/// projection coefficients, making it square.
ArnoldiDecomposition arnoldi(const LinearOperator& A, std::span<const double> b, Index m,
                             GsVariant variant, const SketchOperator* theta,
                             const GsOptions& opts = {});

struct GmresOptions {
  Index m = 80;  ///< Krylov basis size, at most m - 1 iterations
  GsVariant variant = GsVariant::RGS;
  GsOptions gs;
  const SketchOperator* theta = nullptr;  ///< RGS only
  const Preconditioner* precond = nullptr;
  double tol = 0.0;        ///< stop when the residual estimate <= tol ||b||
  bool normalize = true;   ///< rescale to ||b|| = ||A|| = 1 internally
  bool diagnostics = false;
  MonitorOptions monitor;
};

struct GmresResult {
  Eigen::VectorXd x;
  std::vector<double> residual_history;  ///< Givens estimates, original scale
  double true_final_residual = 0.0;      ///< ||b - A x|| in binary64
  Index iterations = 0;
  bool breakdown = false;
  StabilityCertificate certificate;
  std::optional<double> tau;              ///< best attainable residual, scaled problem; unset when A Q lost rank
  std::vector<IterationRecord> records;   ///< per basis column when diagnostics are on
  double scale_b = 1.0;                   ///< ||b||
  double scale_a = 1.0;                   ///< ||A M^{-1}|| estimate
  Eigen::MatrixXd q;                      ///< Krylov basis of the scaled problem
  Eigen::MatrixXd h;                      ///< Hessenberg matrix of the scaled problem
};

/// GMRES without restarts. With a preconditioner the system is solved as
/// (A M^{-1}) u = b, x = M^{-1} u. The Hessenberg least squares problem is
/// reduced by progressive Givens rotations in binary64.
GmresResult gmres(const LinearOperator& A, std::span<const double> b, const GmresOptions& opts);

/// min over c of ||A Q c - b|| via binary64 dense least squares; ||b|| for an
/// empty basis. Throws RankDeficientError if A Q is numerically rank deficient.
double best_attainable_residual(const LinearOperator& A, const Eigen::MatrixXd& Q,
                                std::span<const double> b);

}  // namespace rgs
