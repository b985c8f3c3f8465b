#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rgs/errors.hpp"
#include "rgs/precision.hpp"

namespace rgs {

/// Solver for the small sketched least-squares problem min_y ||S y - p||.
struct LsqSolver {
  enum class Kind { HouseholderQR, RichardsonNormalEq, SketchedMGS };
  Kind kind = Kind::HouseholderQR;
  int iterations = 0;  ///< Richardson only, >= 1

  static LsqSolver householder() { return {Kind::HouseholderQR, 0}; }
  static LsqSolver richardson(int iterations);
  static LsqSolver sketched_mgs() { return {Kind::SketchedMGS, 0}; }
};

/// "householder", "richardson:N", "smgs"
LsqSolver parse_lsq_solver(std::string_view text);
std::string lsq_solver_name(const LsqSolver& s);

/// Least-squares state that grows one column of S at a time. T is the
/// arithmetic of the fine unit roundoff.
template <class T>
class SketchedLeastSquares {
 public:
  virtual ~SketchedLeastSquares() = default;
  /// Appends a k-vector as the next column of S.
  virtual void append(std::span<const T> s) = 0;
  /// Writes argmin_y ||S y - p|| into y (size = number of appended columns).
  virtual void solve(std::span<const T> p, std::span<T> y) const = 0;
  virtual Index cols() const = 0;
};

/// Factory. `k` is the sketch length, `capacity` the maximal column count.
template <class T>
std::unique_ptr<SketchedLeastSquares<T>> make_sketched_lsq(const LsqSolver& solver, Index k,
                                                           Index capacity);

/// Householder QR of S updated by one reflector per appended column.
template <class T>
class IncrementalHouseholderLsq final : public SketchedLeastSquares<T> {
 public:
  IncrementalHouseholderLsq(Index k, Index capacity);
  void append(std::span<const T> s) override;
  void solve(std::span<const T> p, std::span<T> y) const override;
  Index cols() const override { return cols_; }

  /// Upper-triangular factor of the appended columns.
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> r() const;

 private:
  void apply_reflectors(T* x, Index count) const;

  Index k_, cap_, cols_ = 0;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> v_;  // reflectors, unit leading entry
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> r_;
  std::vector<T> tau_;
};

/// y <- y + S^T (p - S y) from y = 0, a fixed number of sweeps. Converges
/// when ||I - S^T S|| < 1, which holds for the sketch of an RGS basis.
template <class T>
class RichardsonLsq final : public SketchedLeastSquares<T> {
 public:
  RichardsonLsq(Index k, Index capacity, int iterations);
  void append(std::span<const T> s) override;
  void solve(std::span<const T> p, std::span<T> y) const override;
  Index cols() const override { return cols_; }

 private:
  Index k_, cols_ = 0;
  int iterations_;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> s_;
};

/// Modified Gram-Schmidt QR of S; p is swept against the orthonormal columns
/// and the triangular factor back-substituted.
template <class T>
class SketchedMgsLsq final : public SketchedLeastSquares<T> {
 public:
  SketchedMgsLsq(Index k, Index capacity);
  void append(std::span<const T> s) override;
  void solve(std::span<const T> p, std::span<T> y) const override;
  Index cols() const override { return cols_; }

 private:
  Index k_, cols_ = 0;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> u_;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> r_;
};

/// One-shot solve of argmin_y ||S y - p|| in binary64 with the chosen solver.
/// Throws RankDeficientError when sigma_min(S) < 1e-8 sigma_max(S).
Eigen::VectorXd sketched_lsq(const Eigen::MatrixXd& S, const Eigen::VectorXd& p,
                             const LsqSolver& solver);

}  // namespace rgs
