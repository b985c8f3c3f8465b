#include "rgs/lsq.hpp"

#include <charconv>
#include <cmath>

#include "rgs/linalg.hpp"

namespace rgs {

LsqSolver LsqSolver::richardson(int iterations) {
  if (iterations < 1) throw InvalidArgument("Richardson needs at least one iteration");
  return {Kind::RichardsonNormalEq, iterations};
}

LsqSolver parse_lsq_solver(std::string_view text) {
  if (text == "householder") return LsqSolver::householder();
  if (text == "smgs" || text == "mgs") return LsqSolver::sketched_mgs();
  constexpr std::string_view prefix = "richardson:";
  if (text.starts_with(prefix)) {
    int it = 0;
    const auto body = text.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), it);
    if (ec != std::errc{} || ptr != body.data() + body.size())
      throw InvalidArgument("bad Richardson iteration count in '" + std::string(text) + "'");
    return LsqSolver::richardson(it);
  }
  if (text == "richardson") return LsqSolver::richardson(4);
  throw InvalidArgument("unknown least-squares solver '" + std::string(text) + "'");
}

std::string lsq_solver_name(const LsqSolver& s) {
  switch (s.kind) {
    case LsqSolver::Kind::HouseholderQR: return "householder";
    case LsqSolver::Kind::SketchedMGS: return "smgs";
    case LsqSolver::Kind::RichardsonNormalEq: return "richardson:" + std::to_string(s.iterations);
  }
  return "?";
}

namespace {

template <class T>
T column_norm(std::span<const T> s) {
  T acc(0);
  for (T v : s) acc += v * v;
  return std::sqrt(acc);
}

template <class T, class R>
void back_substitute(const R& r, Index n, const T* rhs, T* y) {
  for (Index i = n - 1; i >= 0; --i) {
    T acc = rhs[i];
    for (Index j = i + 1; j < n; ++j) acc -= r(i, j) * y[j];
    y[i] = acc / r(i, i);
  }
}

}  // namespace

// ---------------------------------------------------------------- Householder

template <class T>
IncrementalHouseholderLsq<T>::IncrementalHouseholderLsq(Index k, Index capacity)
    : k_(k), cap_(capacity), v_(k, capacity), r_(capacity, capacity) {
  if (capacity > k) throw InvalidArgument("least squares needs k >= number of columns");
  v_.setZero();
  r_.setZero();
  tau_.reserve(static_cast<std::size_t>(capacity));
}

template <class T>
void IncrementalHouseholderLsq<T>::apply_reflectors(T* x, Index count) const {
  for (Index c = 0; c < count; ++c) {
    const T* v = v_.col(c).data();
    T w(0);
    for (Index i = c; i < k_; ++i) w += v[i] * x[i];
    w *= tau_[c];
    for (Index i = c; i < k_; ++i) x[i] -= w * v[i];
  }
}

template <class T>
void IncrementalHouseholderLsq<T>::append(std::span<const T> s) {
  if (static_cast<Index>(s.size()) != k_) throw DimensionError("lsq append: length must be k");
  if (cols_ >= cap_) throw InvalidArgument("lsq append: capacity exhausted");
  const Index j = cols_;
  std::vector<T> x(s.begin(), s.end());
  apply_reflectors(x.data(), j);

  const T alpha = x[j];
  T sigma(0);
  for (Index i = j + 1; i < k_; ++i) sigma += x[i] * x[i];
  T* v = v_.col(j).data();
  T beta, tau;
  if (sigma == T(0)) {
    beta = alpha;
    tau = T(0);
    v[j] = T(1);
  } else {
    const T nrm = std::sqrt(alpha * alpha + sigma);
    beta = alpha <= T(0) ? nrm : -nrm;
    const T denom = alpha - beta;
    v[j] = T(1);
    for (Index i = j + 1; i < k_; ++i) v[i] = x[i] / denom;
    tau = (beta - alpha) / beta;
  }
  const T snorm = column_norm(s);
  if (!(std::abs(beta) >= T(1e-8) * snorm) || snorm == T(0))
    throw RankDeficientError("sketched least squares: S is numerically rank deficient");

  for (Index i = 0; i < j; ++i) r_(i, j) = x[i];
  r_(j, j) = beta;
  tau_.push_back(tau);
  ++cols_;
}

template <class T>
void IncrementalHouseholderLsq<T>::solve(std::span<const T> p, std::span<T> y) const {
  if (static_cast<Index>(p.size()) != k_ || static_cast<Index>(y.size()) != cols_)
    throw DimensionError("lsq solve: dimension mismatch");
  std::vector<T> x(p.begin(), p.end());
  apply_reflectors(x.data(), cols_);
  back_substitute(r_, cols_, x.data(), y.data());
}

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> IncrementalHouseholderLsq<T>::r() const {
  return r_.topLeftCorner(cols_, cols_);
}

// ----------------------------------------------------------------- Richardson

template <class T>
RichardsonLsq<T>::RichardsonLsq(Index k, Index capacity, int iterations)
    : k_(k), iterations_(iterations), s_(k, capacity) {
  if (iterations < 1) throw InvalidArgument("Richardson needs at least one iteration");
}

template <class T>
void RichardsonLsq<T>::append(std::span<const T> s) {
  if (static_cast<Index>(s.size()) != k_) throw DimensionError("lsq append: length must be k");
  if (cols_ >= s_.cols()) throw InvalidArgument("lsq append: capacity exhausted");
  for (Index i = 0; i < k_; ++i) s_(i, cols_) = s[i];
  ++cols_;
}

template <class T>
void RichardsonLsq<T>::solve(std::span<const T> p, std::span<T> y) const {
  if (static_cast<Index>(p.size()) != k_ || static_cast<Index>(y.size()) != cols_)
    throw DimensionError("lsq solve: dimension mismatch");
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  const auto S = s_.leftCols(cols_);
  const Eigen::Map<const Vec> pv(p.data(), k_);
  Vec yv = Vec::Zero(cols_);
  for (int it = 0; it < iterations_; ++it) {
    const Vec res = pv - S * yv;
    yv += S.transpose() * res;
  }
  for (Index i = 0; i < cols_; ++i) y[i] = yv[i];
}

// ---------------------------------------------------------------- sketched MGS

template <class T>
SketchedMgsLsq<T>::SketchedMgsLsq(Index k, Index capacity)
    : k_(k), u_(k, capacity), r_(capacity, capacity) {
  if (capacity > k) throw InvalidArgument("least squares needs k >= number of columns");
  r_.setZero();
}

template <class T>
void SketchedMgsLsq<T>::append(std::span<const T> s) {
  if (static_cast<Index>(s.size()) != k_) throw DimensionError("lsq append: length must be k");
  if (cols_ >= u_.cols()) throw InvalidArgument("lsq append: capacity exhausted");
  const Index j = cols_;
  T* x = u_.col(j).data();
  std::copy(s.begin(), s.end(), x);
  for (Index c = 0; c < j; ++c) {
    const T* uc = u_.col(c).data();
    const T rc = kernels::dot(uc, x, k_);
    for (Index i = 0; i < k_; ++i) x[i] -= rc * uc[i];
    r_(c, j) = rc;
  }
  const T rjj = kernels::norm2(x, k_);
  const T snorm = column_norm(s);
  if (!(rjj >= T(1e-8) * snorm) || snorm == T(0))
    throw RankDeficientError("sketched least squares: S is numerically rank deficient");
  for (Index i = 0; i < k_; ++i) x[i] /= rjj;
  r_(j, j) = rjj;
  ++cols_;
}

template <class T>
void SketchedMgsLsq<T>::solve(std::span<const T> p, std::span<T> y) const {
  if (static_cast<Index>(p.size()) != k_ || static_cast<Index>(y.size()) != cols_)
    throw DimensionError("lsq solve: dimension mismatch");
  std::vector<T> x(p.begin(), p.end());
  std::vector<T> z(static_cast<std::size_t>(cols_));
  for (Index c = 0; c < cols_; ++c) {
    const T* uc = u_.col(c).data();
    z[c] = kernels::dot(uc, x.data(), k_);
    for (Index i = 0; i < k_; ++i) x[i] -= z[c] * uc[i];
  }
  back_substitute(r_, cols_, z.data(), y.data());
}

template <class T>
std::unique_ptr<SketchedLeastSquares<T>> make_sketched_lsq(const LsqSolver& solver, Index k,
                                                           Index capacity) {
  switch (solver.kind) {
    case LsqSolver::Kind::HouseholderQR:
      return std::make_unique<IncrementalHouseholderLsq<T>>(k, capacity);
    case LsqSolver::Kind::RichardsonNormalEq:
      return std::make_unique<RichardsonLsq<T>>(k, capacity, solver.iterations);
    case LsqSolver::Kind::SketchedMGS:
      return std::make_unique<SketchedMgsLsq<T>>(k, capacity);
  }
  throw InvalidArgument("unknown least-squares solver");
}

template class IncrementalHouseholderLsq<float>;
template class IncrementalHouseholderLsq<double>;
template class RichardsonLsq<float>;
template class RichardsonLsq<double>;
template class SketchedMgsLsq<float>;
template class SketchedMgsLsq<double>;
template std::unique_ptr<SketchedLeastSquares<float>> make_sketched_lsq<float>(const LsqSolver&, Index, Index);
template std::unique_ptr<SketchedLeastSquares<double>> make_sketched_lsq<double>(const LsqSolver&, Index, Index);

Eigen::VectorXd sketched_lsq(const Eigen::MatrixXd& S, const Eigen::VectorXd& p,
                             const LsqSolver& solver) {
  if (S.rows() != p.size()) throw DimensionError("sketched_lsq: S and p disagree in length");
  const Index m = S.cols();
  if (m == 0) return {};
  if (m > S.rows()) throw RankDeficientError("sketched_lsq: more columns than rows");
  const Eigen::VectorXd sv = linalg::singular_values(S);
  if (!(sv[m - 1] >= 1e-8 * sv[0]))
    throw RankDeficientError("sketched_lsq: S is numerically rank deficient");

  auto lsq = make_sketched_lsq<double>(solver, S.rows(), m);
  for (Index c = 0; c < m; ++c)
    lsq->append(std::span<const double>(S.col(c).data(), S.rows()));
  Eigen::VectorXd y(m);
  lsq->solve(std::span<const double>(p.data(), p.size()), std::span<double>(y.data(), m));
  return y;
}

}  // namespace rgs
