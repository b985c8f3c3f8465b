#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rgs/errors.hpp"

namespace rgs {

using Index = Eigen::Index;

/// Which arithmetic realizes the coarse and the fine unit roundoff.
enum class Precision {
  Unified32,   ///< everything in binary32
  Unified64,   ///< everything in binary64
  Mixed32_64,  ///< high-dimensional projection in binary32, the rest binary64
};

inline constexpr double kUnitRoundoff32 = 0x1p-24;
inline constexpr double kUnitRoundoff64 = 0x1p-53;

struct PrecisionPolicy {
  Precision mode = Precision::Mixed32_64;

  constexpr double u_crs() const {
    return mode == Precision::Unified64 ? kUnitRoundoff64 : kUnitRoundoff32;
  }
  constexpr double u_fine() const {
    return mode == Precision::Mixed32_64 || mode == Precision::Unified64
               ? kUnitRoundoff64
               : kUnitRoundoff32;
  }
  constexpr bool coarse_is_single() const { return mode != Precision::Unified64; }
  constexpr bool fine_is_single() const { return mode == Precision::Unified32; }

  static constexpr PrecisionPolicy unified32() { return {Precision::Unified32}; }
  static constexpr PrecisionPolicy unified64() { return {Precision::Unified64}; }
  static constexpr PrecisionPolicy mixed() { return {Precision::Mixed32_64}; }
};

/// "f32", "f64", "mixed"
PrecisionPolicy parse_policy(std::string_view name);
std::string_view policy_name(PrecisionPolicy p);

/// Round to nearest-even binary32 and return the value in binary64.
/// Throws OverflowError when a finite input rounds to infinity.
double round_coarse(double x);

/// beta*y + alpha*A*x with every operand, product, sum and stored
/// intermediate rounded to binary32. Row sums accumulate left to right over
/// the columns of A; the final combination is fl(fl(beta*y) + fl(alpha*Ax)).
Eigen::VectorXd gemv_coarse(const Eigen::MatrixXd& A, std::span<const double> x,
                            std::span<const double> y, double alpha, double beta);

namespace kernels {

/// out = w - Q(:, 0:cols) * coeffs, accumulated column by column in T.
/// CGS, CGS2 and RGS compute their projection here; MGS projects column by column.
template <class T>
void project_out(const T* q, Index ld, Index n, Index cols, const T* coeffs,
                 const T* w, T* out) {
  std::vector<T> acc(static_cast<std::size_t>(n), T(0));
  for (Index c = 0; c < cols; ++c) {
    const T* qc = q + c * ld;
    const T rc = coeffs[c];
    for (Index j = 0; j < n; ++j) acc[j] = acc[j] + qc[j] * rc;
  }
  for (Index j = 0; j < n; ++j) out[j] = w[j] - acc[j];
}

template <class T>
T dot(const T* a, const T* b, Index n) {
  T s(0);
  for (Index j = 0; j < n; ++j) s = s + a[j] * b[j];
  return s;
}

template <class T>
T norm2(const T* a, Index n) {
  return std::sqrt(dot(a, a, n));
}

template <class T>
bool all_finite(const T* a, Index n) {
  for (Index j = 0; j < n; ++j)
    if (!std::isfinite(a[j])) return false;
  return true;
}

}  // namespace kernels
}  // namespace rgs
