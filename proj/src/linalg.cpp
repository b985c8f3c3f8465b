#include "rgs/linalg.hpp"

#include <limits>

namespace rgs::linalg {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return {};
  if (std::min(A.rows(), A.cols()) <= 64)
    return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
  return Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues();
}

double cond(const Eigen::MatrixXd& A) {
  const Eigen::VectorXd s = singular_values(A);
  if (s.size() == 0) return 1.0;
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& G) {
  if (G.size() == 0) return {};
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly).eigenvalues();
}

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.size() == 0) return {};
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) return {};
  // C = L^{-1} A L^{-T}
  Eigen::MatrixXd C = llt.matrixL().solve(A);
  C = llt.matrixL().solve(C.transpose()).transpose();
  C = 0.5 * (C + C.transpose());
  return sym_eigenvalues(C);
}

double cond_from_gram(const Eigen::MatrixXd& G) {
  if (G.size() == 0) return 1.0;
  const Eigen::VectorXd ev = sym_eigenvalues(G);
  const double lmin = ev[0], lmax = ev[ev.size() - 1];
  if (!(lmin > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(lmax / lmin);
}

double identity_defect(const Eigen::MatrixXd& G) {
  return (Eigen::MatrixXd::Identity(G.rows(), G.cols()) - G).norm();
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  return A.householderQr().solve(b);
}

}  // namespace rgs::linalg
