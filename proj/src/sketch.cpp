#include "rgs/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "rgs/parallel.hpp"

namespace rgs {

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "rademacher") return SketchKind::Rademacher;
  if (name == "psrht" || name == "p-srht" || name == "srht") return SketchKind::PSRHT;
  throw InvalidArgument("unknown sketch kind '" + std::string(name) + "'");
}

std::string_view sketch_kind_name(SketchKind kind) {
  return kind == SketchKind::Rademacher ? "rademacher" : "psrht";
}

namespace {

void check_embedding(const EmbeddingParams& p) {
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
    throw InvalidArgument("embedding epsilon must lie in (0,1)");
  if (!(p.delta > 0.0 && p.delta < 1.0))
    throw InvalidArgument("embedding delta must lie in (0,1)");
  if (p.d < 1) throw InvalidArgument("embedding dimension must be positive");
}

Index ceil_to_index(double v) {
  return static_cast<Index>(std::ceil(v));
}

}  // namespace

Index required_sketch_dim(SketchKind kind, const EmbeddingParams& p, Index n) {
  check_embedding(p);
  const double eps = p.epsilon, delta = p.delta, d = static_cast<double>(p.d);
  if (kind == SketchKind::Rademacher)
    return ceil_to_index(7.87 / (eps * eps) * (6.9 * d + std::log(1.0 / delta)));
  if (n < 1) throw InvalidArgument("required_sketch_dim: n must be positive");
  const double root = std::sqrt(d) + std::sqrt(8.0 * std::log(6.0 * static_cast<double>(n) / delta));
  const double k = 2.0 / (eps * eps - eps * eps * eps / 3.0) * root * root *
                   std::log(3.0 * d / delta);
  return ceil_to_index(k);
}

Index vector_certificate_dim(double eps_star, double delta_star) {
  if (!(eps_star > 0.0 && eps_star < 1.0) || !(delta_star > 0.0 && delta_star < 1.0))
    throw InvalidArgument("vector_certificate_dim: parameters must lie in (0,1)");
  const double e = eps_star;
  const double k = 2.0 / (e * e / 2.0 - e * e * e / 3.0) * std::log(2.0 / delta_star);
  return std::max<Index>(1, ceil_to_index(k));
}

template <class T>
void fwht(std::span<T> v) {
  const std::size_t s = v.size();
  if (s == 0 || !std::has_single_bit(s))
    throw InvalidArgument("fwht: length must be a power of two");
  for (std::size_t h = 1; h < s; h <<= 1) {
    for (std::size_t i = 0; i < s; i += 2 * h) {
      T* a = v.data() + i;
      T* b = a + h;
      for (std::size_t j = 0; j < h; ++j) {
        const T x = a[j], y = b[j];
        a[j] = x + y;
        b[j] = x - y;
      }
    }
  }
}

template void fwht<float>(std::span<float>);
template void fwht<double>(std::span<double>);

std::vector<double> fwht(std::vector<double> v) {
  fwht(std::span<double>(v));
  return v;
}

SketchOperator::SketchOperator(SketchKind kind, Index k, Index n, std::uint64_t seed)
    : kind_(kind), k_(k), n_(n), s_(n), seed_(seed), key_(mix64(seed ^ 0x5EEDC0DEULL)) {
  if (k < 1 || n < 1) throw InvalidArgument("sketch dimensions must be positive");
  scale_ = 1.0 / std::sqrt(static_cast<double>(k));
  if (kind_ != SketchKind::PSRHT) return;

  const auto un = static_cast<std::uint64_t>(n);
  if (un > (std::uint64_t{1} << 62)) throw OverflowError("P-SRHT padded size overflows");
  s_ = static_cast<Index>(std::bit_ceil(un));
  if (k > s_) throw InvalidArgument("P-SRHT needs k <= padded size s");

  std::mt19937_64 sign_eng(mix64(seed ^ 0x51A7B0E5ULL));
  signs_.resize(static_cast<std::size_t>(n));
  for (auto& sg : signs_) sg = (sign_eng() >> 63) ? std::int8_t{-1} : std::int8_t{1};

  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  std::mt19937_64 row_eng(mix64(seed ^ 0x5A3B1E00ULL));
  std::vector<std::int64_t> perm(static_cast<std::size_t>(s_));
  std::iota(perm.begin(), perm.end(), std::int64_t{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(uniform_below(row_eng, static_cast<std::uint64_t>(s_ - i)));
    std::swap(perm[i], perm[j]);
  }
  rows_.assign(perm.begin(), perm.begin() + k);
}

std::uint64_t SketchOperator::rademacher_bits(Index col, Index block) const {
  const std::uint64_t h = mix64(key_ + static_cast<std::uint64_t>(col) * 0xD1B54A32D192ED03ULL);
  return mix64(h ^ (static_cast<std::uint64_t>(block) * 0x8CB92BA72F3D8DD7ULL));
}

template <class T>
void SketchOperator::apply(std::span<const T> x, std::span<T> out) const {
  if (static_cast<Index>(x.size()) != n_ || static_cast<Index>(out.size()) != k_)
    throw DimensionError("sketch apply: dimension mismatch");
  const T scale = static_cast<T>(scale_);

  if (kind_ == SketchKind::Rademacher) {
    std::fill(out.begin(), out.end(), T(0));
    const Index blocks = (k_ + 63) / 64;
    for (Index j = 0; j < n_; ++j) {
      const T xj = x[j];
      const T neg = -xj;
      for (Index b = 0; b < blocks; ++b) {
        std::uint64_t bits = rademacher_bits(j, b);
        const Index r0 = b * 64;
        const Index r1 = std::min<Index>(k_, r0 + 64);
        T* o = out.data() + r0;
        for (Index r = 0; r < r1 - r0; ++r, bits >>= 1) o[r] += (bits & 1u) ? neg : xj;
      }
    }
    for (auto& v : out) v *= scale;
    return;
  }

  std::vector<T> buf(static_cast<std::size_t>(s_), T(0));
  for (Index i = 0; i < n_; ++i) {
    const T v = x[i] * scale;
    buf[i] = signs_[i] < 0 ? -v : v;
  }
  fwht(std::span<T>(buf));
  for (Index r = 0; r < k_; ++r) out[r] = buf[static_cast<std::size_t>(rows_[r])];
}

template void SketchOperator::apply<float>(std::span<const float>, std::span<float>) const;
template void SketchOperator::apply<double>(std::span<const double>, std::span<double>) const;

Eigen::VectorXd SketchOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(k_);
  apply<double>(std::span<const double>(x.data(), x.size()), std::span<double>(out.data(), k_));
  return out;
}

Eigen::MatrixXd SketchOperator::apply_block(const Eigen::MatrixXd& X, Index first,
                                            Index count) const {
  if (X.rows() != n_) throw DimensionError("apply_block: row count must equal n");
  if (first < 0 || count < 0 || first + count > X.cols())
    throw DimensionError("apply_block: column range out of bounds");
  Eigen::MatrixXd out(k_, count);
  auto run = [&](Index c0, Index c1) {
    for (Index c = c0; c < c1; ++c)
      apply<double>(std::span<const double>(X.col(first + c).data(), n_),
                    std::span<double>(out.col(c).data(), k_));
  };
  const Index threads = std::min<Index>(num_threads(), count);
  if (threads <= 1) {
    run(0, count);
    return out;
  }
  std::vector<std::thread> pool;
  for (Index t = 0; t < threads; ++t)
    pool.emplace_back(run, count * t / threads, count * (t + 1) / threads);
  for (auto& th : pool) th.join();
  return out;
}

double SketchOperator::entry(Index row, Index col) const {
  if (row < 0 || row >= k_ || col < 0 || col >= n_) throw DimensionError("entry out of range");
  if (kind_ == SketchKind::Rademacher) {
    const std::uint64_t bits = rademacher_bits(col, row / 64);
    return ((bits >> (row % 64)) & 1u) ? -scale_ : scale_;
  }
  // Sylvester Hadamard: H[a][b] = (-1)^popcount(a & b).
  const auto h = static_cast<std::uint64_t>(rows_[row]) & static_cast<std::uint64_t>(col);
  const double hv = (std::popcount(h) & 1) ? -1.0 : 1.0;
  return hv * signs_[col] * scale_;
}

Eigen::MatrixXd SketchOperator::materialize() const {
  Eigen::MatrixXd out(k_, n_);
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < k_; ++i) out(i, j) = entry(i, j);
  return out;
}

double epsilon_of(const SketchOperator& theta, const Eigen::MatrixXd& V) {
  if (V.rows() != theta.cols()) throw DimensionError("epsilon_of: V must have n rows");
  const Index m = V.cols();
  if (m < 1) throw InvalidArgument("epsilon_of: V has no columns");
  if (m > V.rows()) throw RankDeficientError("epsilon_of: more columns than rows");

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
  if (!(sv[m - 1] >= 1e-12 * sv[0]))
    throw RankDeficientError("epsilon_of: V is numerically rank deficient");

  const Eigen::MatrixXd U = qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), m);
  const Eigen::MatrixXd TU = theta.apply_block(U);
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(TU).singularValues();
  const double smax = s[0];
  const double smin = theta.rows() < m ? 0.0 : s[m - 1];
  return std::max(1.0 - smin * smin, smax * smax - 1.0);
}

double rounding_sketch_trial(const SketchFn& theta, Index k, std::span<const double> gamma,
                             const RoundingTrialConfig& cfg) {
  if (cfg.trials < 1) throw InvalidArgument("rounding_sketch_trial: trials must be positive");
  double g2 = 0.0;
  for (double g : gamma) {
    if (!(g >= 0.0)) throw InvalidArgument("rounding_sketch_trial: gamma must be >= 0");
    g2 += g * g;
  }
  const std::size_t n = gamma.size();
  std::mt19937_64 eng(mix64(cfg.seed ^ 0x70D1ULL));
  std::vector<double> phi(n), out(static_cast<std::size_t>(k));
  Index failed = 0;
  for (Index t = 0; t < cfg.trials; ++t) {
    double p2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] = gamma[i] * (2.0 * uniform01(eng) - 1.0);
      p2 += phi[i] * phi[i];
    }
    theta(phi, out);
    double s2 = 0.0;
    for (double v : out) s2 += v * v;
    if (std::abs(p2 - s2) > cfg.epsilon * g2) ++failed;
  }
  return static_cast<double>(failed) / static_cast<double>(cfg.trials);
}

double rounding_sketch_trial(const SketchOperator& theta, std::span<const double> gamma,
                             const RoundingTrialConfig& cfg) {
  if (static_cast<Index>(gamma.size()) != theta.cols())
    throw DimensionError("rounding_sketch_trial: gamma must have n entries");
  SketchFn fn = [&theta](std::span<const double> x, std::span<double> y) {
    theta.apply<double>(x, y);
  };
  return rounding_sketch_trial(fn, theta.rows(), gamma, cfg);
}

}  // namespace rgs
