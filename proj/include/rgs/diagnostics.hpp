#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rgs/gram_schmidt.hpp"
#include "rgs/lsq.hpp"
#include "rgs/sketch.hpp"

namespace rgs {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Per-iteration quantities of a growing basis; NaN marks "not computed".
struct IterationRecord {
  Index iteration = 0;  ///< 1-based column count
  double cond_q = kMissing;
  double cond_s = kMissing;
  double loss_of_orthogonality = kMissing;
  double factorization_error = kMissing;  ///< ||W_i - Q_i R_i||_F / ||W_i||_F
  double omega = kMissing;
  double omega_bar = kMissing;
  double cert_margin = kMissing;
};

struct MonitorOptions {
  bool omega = true;      ///< needs theta
  bool omega_bar = true;  ///< needs the process to carry certification sketches
  double eps_star = 0.05;
  /// Eigenvalue based quantities are evaluated every `stride` iterations and
  /// at the first and final ones.
  Index stride = 1;
};

/// Follows a Gram-Schmidt process column by column and evaluates, in
/// binary64, cond(Q_i) and ||I - Q_i^T Q_i||_F from the Gram matrix of the
/// stored basis, the factorization error, and for RGS cond(S_i), omega (from
/// the generalized eigenvalues of ((Theta Q)^T Theta Q, Q^T Q)) and omega_bar.
class BasisMonitor {
 public:
  BasisMonitor(Index n, Index capacity, const SketchOperator* theta, PrecisionPolicy policy,
               MonitorOptions opts = {});

  /// Call after every successful step; w is the column just appended.
  void observe(const GramSchmidtProcess& gs, std::span<const double> w, bool final = false);

  const std::vector<IterationRecord>& records() const { return records_; }
  /// Binary64 copy of the stored basis.
  Eigen::MatrixXd basis() const { return qd_.leftCols(cols_); }

 private:
  Index n_, cap_, cols_ = 0;
  const SketchOperator* theta_;
  PrecisionPolicy policy_;
  MonitorOptions opts_;
  Eigen::MatrixXd qd_, g_, tq_, tg_, s_, sg_;
  std::optional<IncrementalHouseholderLsq<double>> phi_qr_;
  bool phi_failed_ = false;
  double err2_ = 0.0, wn2_ = 0.0;
  std::vector<IterationRecord> records_;
};

/// cond(W_i) for i = 1..m from the R factor of one binary64 Householder QR.
/// Entries not on the stride (or the last) are NaN.
std::vector<double> leading_condition_numbers(const Eigen::MatrixXd& W, Index stride = 1);

}  // namespace rgs
