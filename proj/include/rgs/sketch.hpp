#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rgs/errors.hpp"
#include "rgs/precision.hpp"

namespace rgs {

enum class SketchKind { Rademacher, PSRHT };

SketchKind parse_sketch_kind(std::string_view name);
std::string_view sketch_kind_name(SketchKind kind);

/// Target accuracy of an oblivious l2-subspace embedding of dimension d.
struct EmbeddingParams {
  double epsilon;
  double delta;
  Index d;
};

/// Rows needed for a (epsilon, delta, d) oblivious embedding. Logarithms are
/// natural. `n` only matters for P-SRHT.
Index required_sketch_dim(SketchKind kind, const EmbeddingParams& p, Index n);

/// Rows of a Rademacher sketch that is a (eps_star, delta_star, 1) oblivious
/// embedding; sizes the certification operator.
Index vector_certificate_dim(double eps_star, double delta_star);

/// In-place unnormalized Walsh-Hadamard transform in Sylvester ordering.
template <class T>
void fwht(std::span<T> v);

/// Returns H_s v. Throws InvalidArgument unless v.size() is a power of two.
std::vector<double> fwht(std::vector<double> v);

/// Seeded k x n oblivious embedding applied matrix-free.
///
/// Rademacher entries are +-1/sqrt(k), regenerated on the fly from a
/// counter-based hash of (seed, column, 64-row block), so any column block can
/// be produced without storing the matrix. P-SRHT computes
/// x -> gather(H_s pad(D x / sqrt(k))) where s is the power of two with
/// n <= s < 2n, D a random sign diagonal and the k gathered rows distinct.
///
/// All randomness is a pure function of (kind, k, n, seed). Instances are
/// immutable and may be shared across threads.
class SketchOperator {
 public:
  SketchOperator(SketchKind kind, Index k, Index n, std::uint64_t seed);

  SketchKind kind() const { return kind_; }
  Index rows() const { return k_; }
  Index cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  /// Padded Hadamard size for P-SRHT, n for Rademacher.
  Index padded_size() const { return s_; }

  /// out = Theta x. Accumulates in T: binary64 normally, binary32 when the
  /// whole computation runs in unified single precision.
  template <class T>
  void apply(std::span<const T> x, std::span<T> out) const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Sketch of columns [first, first+count) of X. Column j of the result is
  /// bit-identical to apply() on column first+j.
  Eigen::MatrixXd apply_block(const Eigen::MatrixXd& X, Index first, Index count) const;
  Eigen::MatrixXd apply_block(const Eigen::MatrixXd& X) const {
    return apply_block(X, 0, X.cols());
  }

  /// Entry (row, col) of Theta.
  double entry(Index row, Index col) const;
  /// Dense k x n matrix; intended for small n.
  Eigen::MatrixXd materialize() const;

  /// P-SRHT only: sign diagonal and sampled Hadamard rows.
  const std::vector<std::int8_t>& signs() const { return signs_; }
  const std::vector<std::int64_t>& sample_indices() const { return rows_; }

 private:
  std::uint64_t rademacher_bits(Index col, Index block) const;

  SketchKind kind_;
  Index k_;
  Index n_;
  Index s_;
  std::uint64_t seed_;
  std::uint64_t key_;
  double scale_;
  std::vector<std::int8_t> signs_;
  std::vector<std::int64_t> rows_;
};

/// Minimal epsilon for which theta is an epsilon-embedding of range(V):
/// max(1 - sigma_min(Theta U)^2, sigma_max(Theta U)^2 - 1) with U an
/// orthonormal basis of range(V) from a binary64 Householder QR.
/// Throws RankDeficientError when sigma_min(V) < 1e-12 sigma_max(V).
double epsilon_of(const SketchOperator& theta, const Eigen::MatrixXd& V);

/// Applies a k-row linear map to an n-vector.
using SketchFn = std::function<void(std::span<const double>, std::span<double>)>;

struct RoundingTrialConfig {
  double epsilon = 0.5;
  Index trials = 1000;
  std::uint64_t seed = 0;
};

/// Monte-Carlo check of the sketched rounding-error bound: draws phi with
/// independent entries uniform in [-gamma_i, gamma_i] and returns the fraction
/// of trials with | ||phi||^2 - ||Theta phi||^2 | > epsilon ||gamma||^2.
double rounding_sketch_trial(const SketchOperator& theta, std::span<const double> gamma,
                             const RoundingTrialConfig& cfg);
double rounding_sketch_trial(const SketchFn& theta, Index k, std::span<const double> gamma,
                             const RoundingTrialConfig& cfg);

/// Stateless 64-bit mixer (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Unbiased integer in [0, bound) from a 64-bit engine; portable across
/// standard libraries unlike std::uniform_int_distribution.
template <class Engine>
std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
  std::uint64_t r;
  do {
    r = eng();
  } while (r >= limit);
  return r % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1p-53;
}

/// Standard normal via Box-Muller, reproducible across platforms given eng.
template <class Engine>
double standard_normal(Engine& eng) {
  double u1;
  do {
    u1 = uniform01(eng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace rgs
