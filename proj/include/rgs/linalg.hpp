#pragma once

#include <Eigen/Dense>

#include "rgs/precision.hpp"

// Small binary64 dense helpers shared by the diagnostics. Nothing here runs on
// the factorizers' hot paths.
namespace rgs::linalg {

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& A);

/// sigma_max / sigma_min over min(rows, cols) singular values; +inf if singular.
double cond(const Eigen::MatrixXd& A);

/// Eigenvalues of a symmetric matrix, increasing.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& G);

/// Eigenvalues of B^{-1} A for symmetric A and symmetric positive definite B,
/// increasing. Returns an empty vector when B is not numerically SPD.
Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// sqrt(lambda_max / lambda_min) of a Gram matrix; +inf when not positive.
double cond_from_gram(const Eigen::MatrixXd& G);

/// ||I - G||_F.
double identity_defect(const Eigen::MatrixXd& G);

/// argmin_c ||A c - b|| via Householder QR.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace rgs::linalg
