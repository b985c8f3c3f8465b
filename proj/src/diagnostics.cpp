#include "rgs/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "rgs/linalg.hpp"

namespace rgs {

BasisMonitor::BasisMonitor(Index n, Index capacity, const SketchOperator* theta,
                           PrecisionPolicy policy, MonitorOptions opts)
    : n_(n),
      cap_(capacity),
      theta_(theta),
      policy_(policy),
      opts_(opts),
      qd_(n, capacity),
      g_(Eigen::MatrixXd::Zero(capacity, capacity)) {
  if (opts_.stride < 1) throw InvalidArgument("monitor stride must be >= 1");
  if (theta_ && opts_.omega) {
    if (theta_->cols() != n) throw DimensionError("monitor: sketch width must equal n");
    tq_.resize(theta_->rows(), capacity);
    tg_ = Eigen::MatrixXd::Zero(capacity, capacity);
  }
  records_.reserve(static_cast<std::size_t>(capacity));
}

namespace {

void gram_update(Eigen::MatrixXd& g, const Eigen::MatrixXd& cols, Index j) {
  const Eigen::VectorXd v = cols.leftCols(j + 1).transpose() * cols.col(j);
  g.block(0, j, j + 1, 1) = v;
  g.block(j, 0, 1, j + 1) = v.transpose();
}

}  // namespace

void BasisMonitor::observe(const GramSchmidtProcess& gs, std::span<const double> w, bool final) {
  if (gs.cols() != cols_ + 1) throw InvalidArgument("monitor: observe after every step");
  if (static_cast<Index>(w.size()) != n_) throw DimensionError("monitor: w must have n entries");
  const Index j = cols_++;
  const Index i = cols_;
  gs.q_column(j, std::span<double>(qd_.col(j).data(), n_));
  gram_update(g_, qd_, j);

  IterationRecord rec;
  rec.iteration = i;
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), n_);
  Eigen::VectorXd rcol(i);
  for (Index t = 0; t < i; ++t) rcol[t] = gs.r_entry(t, j);
  err2_ += (wv - qd_.leftCols(i) * rcol).squaredNorm();
  wn2_ += wv.squaredNorm();
  rec.factorization_error = wn2_ > 0.0 ? std::sqrt(err2_ / wn2_) : 0.0;

  const auto G = g_.topLeftCorner(i, i);
  rec.loss_of_orthogonality = linalg::identity_defect(G);
  const bool full = final || i == 1 || i % opts_.stride == 0;

  if (gs.has_sketches()) {
    const Eigen::VectorXd s = gs.s_column(j);
    if (s_.cols() == 0) {
      s_.resize(s.size(), cap_);
      sg_ = Eigen::MatrixXd::Zero(cap_, cap_);
    }
    s_.col(j) = s;
    gram_update(sg_, s_, j);
  }
  if (theta_ && opts_.omega) {
    theta_->apply<double>(std::span<const double>(qd_.col(j).data(), n_),
                          std::span<double>(tq_.col(j).data(), theta_->rows()));
    gram_update(tg_, tq_, j);
  }
  const bool use_phi = opts_.omega_bar && gs.has_phi() && !phi_failed_ && s_.cols() > 0;
  if (use_phi) {
    const Eigen::VectorXd pq = gs.phi_q_column(j);
    if (!phi_qr_) phi_qr_.emplace(pq.size(), cap_);
    try {
      phi_qr_->append(std::span<const double>(pq.data(), pq.size()));
    } catch (const RankDeficientError&) {
      phi_failed_ = true;
    }
  }

  if (full) {
    rec.cond_q = linalg::cond_from_gram(G);
    if (s_.cols() > 0) rec.cond_s = linalg::cond_from_gram(sg_.topLeftCorner(i, i));
    if (theta_ && opts_.omega) {
      const Eigen::VectorXd lam = linalg::generalized_eigenvalues(tg_.topLeftCorner(i, i), G);
      if (lam.size() > 0) rec.omega = std::max(1.0 - lam[0], lam[lam.size() - 1] - 1.0);
    }
    if (use_phi && !phi_failed_) {
      const Eigen::MatrixXd R = phi_qr_->r();
      const auto tri = R.triangularView<Eigen::Upper>();
      // C = R^{-T} (S^T S) R^{-1}
      Eigen::MatrixXd C = tri.transpose().solve(sg_.topLeftCorner(i, i));
      C = tri.transpose().solve(C.transpose()).transpose();
      C = 0.5 * (C + C.transpose());
      const Eigen::VectorXd lam = linalg::sym_eigenvalues(C);
      const double e = opts_.eps_star;
      rec.omega_bar = std::max(1.0 - (1.0 - e) * lam[0], (1.0 + e) * lam[lam.size() - 1] - 1.0);
      rec.cert_margin = policy_.u_crs() * linalg::cond(R);
    }
  }
  records_.push_back(rec);
}

std::vector<double> leading_condition_numbers(const Eigen::MatrixXd& W, Index stride) {
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  const Index m = W.cols();
  std::vector<double> out(static_cast<std::size_t>(m), kMissing);
  if (m == 0) return out;
  if (W.rows() < m) throw DimensionError("leading_condition_numbers: needs rows >= cols");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  for (Index i = 1; i <= m; ++i) {
    if (!(i == 1 || i == m || i % stride == 0)) continue;
    out[static_cast<std::size_t>(i - 1)] = linalg::cond(R.topLeftCorner(i, i));
  }
  return out;
}

}  // namespace rgs
