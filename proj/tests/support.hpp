#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "rgs/sketch.hpp"

namespace rgs::test {

inline Eigen::MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  Eigen::MatrixXd A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = standard_normal(eng);
  return A;
}

inline Eigen::VectorXd gaussian_vector(Index n, std::uint64_t seed) {
  return gaussian(n, 1, seed).col(0);
}

/// U diag(sigma) V^T with logarithmically spaced sigma from 1 to 1/cond.
inline Eigen::MatrixXd with_condition(Index rows, Index cols, double cond, std::uint64_t seed) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qu(gaussian(rows, cols, seed));
  const Eigen::HouseholderQR<Eigen::MatrixXd> qv(gaussian(cols, cols, seed ^ 0xABCDEFULL));
  const Eigen::MatrixXd U = qu.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd V = qv.householderQ() * Eigen::MatrixXd::Identity(cols, cols);
  Eigen::VectorXd s(cols);
  for (Index j = 0; j < cols; ++j)
    s[j] = cols == 1 ? 1.0 : std::pow(cond, -static_cast<double>(j) / static_cast<double>(cols - 1));
  return U * s.asDiagonal() * V.transpose();
}

inline Eigen::MatrixXd orthonormal(Index rows, Index cols, std::uint64_t seed) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> q(gaussian(rows, cols, seed));
  return q.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace rgs::test
