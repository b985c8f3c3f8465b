#include "rgs/krylov.hpp"

#include <cmath>

#include "rgs/linalg.hpp"

namespace rgs {

LinearOperator LinearOperator::from_sparse(const SparseMatrix& A) {
  return {A.n(),
          [&A](std::span<const double> x, std::span<double> y) { A.multiply(x, y); },
          [&A](std::span<const double> x, std::span<double> y) { A.multiply_transpose(x, y); }};
}

LinearOperator LinearOperator::from_dense(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DimensionError("operator must be square");
  auto mat = std::make_shared<Eigen::MatrixXd>(A);
  return {A.rows(),
          [mat](std::span<const double> x, std::span<double> y) {
            Eigen::Map<Eigen::VectorXd>(y.data(), y.size()) =
                *mat * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
          },
          [mat](std::span<const double> x, std::span<double> y) {
            Eigen::Map<Eigen::VectorXd>(y.data(), y.size()) =
                mat->transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
          }};
}

Eigen::VectorXd LinearOperator::operator*(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw DimensionError("operator: dimension mismatch");
  Eigen::VectorXd y(n);
  apply(std::span<const double>(x.data(), n), std::span<double>(y.data(), n));
  return y;
}

Preconditioner Preconditioner::from_ilu(const Ilu0& ilu) {
  return {[&ilu](std::span<const double> b, std::span<double> x) { ilu.solve(b, x); },
          [&ilu](std::span<const double> b, std::span<double> x) { ilu.solve_transpose(b, x); }};
}

Preconditioner Preconditioner::from_dense_lu(const Eigen::MatrixXd& M) {
  auto lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(M);
  return {[lu](std::span<const double> b, std::span<double> x) {
            Eigen::Map<Eigen::VectorXd>(x.data(), x.size()) =
                lu->solve(Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
          },
          [lu](std::span<const double> b, std::span<double> x) {
            Eigen::Map<Eigen::VectorXd>(x.data(), x.size()) =
                lu->transpose().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
          }};
}

double estimate_norm(const LinearOperator& A, int iterations) {
  if (!A.apply_transpose) throw InvalidArgument("estimate_norm needs the transpose action");
  const Index n = A.n;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd u(n);
  for (int it = 0; it < iterations; ++it) {
    A.apply(std::span<const double>(v.data(), n), std::span<double>(u.data(), n));
    A.apply_transpose(std::span<const double>(u.data(), n), std::span<double>(v.data(), n));
    const double nv = v.norm();
    if (!(nv > 0.0)) return 0.0;
    v /= nv;
  }
  A.apply(std::span<const double>(v.data(), n), std::span<double>(u.data(), n));
  return u.norm();
}

ArnoldiDecomposition arnoldi(const LinearOperator& A, std::span<const double> b, Index m,
                             GsVariant variant, const SketchOperator* theta,
                             const GsOptions& opts) {
  const Index n = A.n;
  if (static_cast<Index>(b.size()) != n) throw DimensionError("arnoldi: b must have n entries");
  if (m < 2) throw InvalidArgument("arnoldi: m must be >= 2");
  double bn = 0.0;
  for (double v : b) bn += v * v;
  if (!(bn > 0.0)) throw InvalidArgument("arnoldi: b must be nonzero");

  auto gs = make_gram_schmidt(variant, n, m, theta, opts);
  gs->step(b);
  ArnoldiDecomposition out;
  out.r11 = gs->r_entry(0, 0);
  std::vector<double> q(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m - 1);
  Index hcols = 0;
  for (Index i = 1; i < m; ++i) {
    gs->q_column(i - 1, q);
    A.apply(q, w);
    const StepOutcome o = gs->try_step(w);
    const auto& c = gs->last_coefficients();
    for (Index t = 0; t < i; ++t) H(t, i - 1) = c[t];
    hcols = i;
    if (!o.ok) {
      out.breakdown_at = i + 1;
      break;
    }
    H(i, i - 1) = gs->r_entry(i, i);
  }
  const Index cols = gs->cols();
  out.factors = gs->factors();
  out.q = out.factors.q_double();
  out.h = H.topLeftCorner(cols, hcols);
  return out;
}

namespace {

struct Givens {
  double c = 1.0, s = 0.0;
  static Givens make(double a, double b) {
    if (b == 0.0) return {1.0, 0.0};
    const double r = std::hypot(a, b);
    return {a / r, b / r};
  }
  void apply(double& x, double& y) const {
    const double t = c * x + s * y;
    y = -s * x + c * y;
    x = t;
  }
};

}  // namespace

GmresResult gmres(const LinearOperator& A, std::span<const double> b, const GmresOptions& opts) {
  const Index n = A.n;
  const Index m = opts.m;
  if (static_cast<Index>(b.size()) != n) throw DimensionError("gmres: b must have n entries");
  if (m < 2) throw InvalidArgument("gmres: m must be >= 2");
  if (m > n + 1) throw InvalidArgument("gmres: m must be <= n + 1");

  GmresResult res;
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);
  const double bnorm = bv.norm();
  res.x = Eigen::VectorXd::Zero(n);
  if (!(bnorm > 0.0)) return res;

  // B = A M^{-1} / alpha
  std::vector<double> tmp(static_cast<std::size_t>(n));
  LinearOperator B{n, nullptr, nullptr};
  B.apply = [&](std::span<const double> x, std::span<double> y) {
    if (opts.precond) {
      opts.precond->solve(x, tmp);
      A.apply(tmp, y);
    } else {
      A.apply(x, y);
    }
  };
  if (A.apply_transpose && (!opts.precond || opts.precond->solve_transpose)) {
    B.apply_transpose = [&](std::span<const double> x, std::span<double> y) {
      if (opts.precond) {
        A.apply_transpose(x, tmp);
        opts.precond->solve_transpose(tmp, y);
      } else {
        A.apply_transpose(x, y);
      }
    };
  }
  const double alpha =
      opts.normalize && B.apply_transpose ? estimate_norm(B, 20) : 1.0;
  const double beta = opts.normalize ? bnorm : 1.0;
  if (!(alpha > 0.0)) throw InvalidArgument("gmres: operator is zero");
  res.scale_a = alpha;
  res.scale_b = beta;

  const Index kdim = std::min(m, n);
  auto gs = make_gram_schmidt(opts.variant, n, kdim, opts.theta, opts.gs);
  std::optional<BasisMonitor> monitor;
  if (opts.diagnostics)
    monitor.emplace(n, kdim, opts.variant == GsVariant::RGS ? opts.theta : nullptr,
                    opts.gs.policy, opts.monitor);

  Eigen::VectorXd w = bv / beta;
  gs->step(std::span<const double>(w.data(), n));
  if (monitor) monitor->observe(*gs, std::span<const double>(w.data(), n), kdim == 1);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(kdim, kdim);
  Eigen::MatrixXd Hr = H;
  std::vector<Givens> rot;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(kdim + 1);
  g[0] = gs->r_entry(0, 0);
  std::vector<double> q(static_cast<std::size_t>(n));
  Index it = 0;

  for (Index i = 1; i < m; ++i) {
    const Index j = i - 1;  // Hessenberg column
    gs->q_column(j, q);
    B.apply(q, std::span<double>(w.data(), n));
    w /= alpha;
    bool broke = false;
    if (i >= kdim) {
      broke = true;  // basis spans the whole space
      const Eigen::VectorXd c = linalg::least_squares(gs->factors().q_double(), w);
      for (Index t = 0; t < i; ++t) H(t, j) = c[t];
    } else {
      const StepOutcome o = gs->try_step(std::span<const double>(w.data(), n));
      const auto& c = gs->last_coefficients();
      for (Index t = 0; t < i; ++t) H(t, j) = c[t];
      if (o.ok) {
        H(i, j) = gs->r_entry(i, i);
      } else {
        broke = true;
      }
      if (o.ok && monitor) monitor->observe(*gs, std::span<const double>(w.data(), n), i == m - 1);
    }

    for (Index t = 0; t <= std::min(i, kdim - 1); ++t) Hr(t, j) = H(t, j);
    for (Index t = 0; t < j; ++t) rot[t].apply(Hr(t, j), Hr(t + 1, j));
    it = i;
    if (broke) {
      res.breakdown = true;
      res.residual_history.push_back(0.0);
      break;
    }
    const Givens gv = Givens::make(Hr(j, j), Hr(i, j));
    gv.apply(Hr(j, j), Hr(i, j));
    Hr(i, j) = 0.0;
    gv.apply(g[j], g[i]);
    rot.push_back(gv);
    const double est = std::abs(g[i]) * beta;
    res.residual_history.push_back(est);
    if (opts.tol > 0.0 && est <= opts.tol * bnorm) break;
  }
  res.iterations = it;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(it);
  if (it > 0) {
    const auto T = Hr.topLeftCorner(it, it).triangularView<Eigen::Upper>();
    y = T.solve(g.head(it));
  }
  Eigen::MatrixXd Q(n, std::max<Index>(it, 1));
  for (Index c = 0; c < it; ++c) gs->q_column(c, std::span<double>(Q.col(c).data(), n));
  Eigen::VectorXd u = it > 0 ? Eigen::VectorXd(Q.leftCols(it) * y) : Eigen::VectorXd::Zero(n);
  u *= beta / alpha;
  if (opts.precond) {
    opts.precond->solve(std::span<const double>(u.data(), n), std::span<double>(res.x.data(), n));
  } else {
    res.x = u;
  }
  Eigen::VectorXd ax(n);
  A.apply(std::span<const double>(res.x.data(), n), std::span<double>(ax.data(), n));
  res.true_final_residual = (bv - ax).norm();

  const QrFactors f = gs->factors();
  if (f.s && f.p) res.certificate = certificates(f);
  res.q = f.q_double();
  res.h = H.topLeftCorner(std::min(it + 1, kdim), it);
  if (opts.diagnostics) {
    res.records = monitor->records();
    LinearOperator Bs{n, [&](std::span<const double> x, std::span<double> yv) {
                        B.apply(x, yv);
                        for (auto& e : yv) e /= alpha;
                      },
                      nullptr};
    const Eigen::VectorXd bs = bv / beta;
    try {
      res.tau = best_attainable_residual(Bs, Q.leftCols(it), std::span<const double>(bs.data(), n));
    } catch (const RankDeficientError&) {
      // basis lost rank, no tau
    }
  }
  return res;
}

double best_attainable_residual(const LinearOperator& A, const Eigen::MatrixXd& Q,
                                std::span<const double> b) {
  const Index n = A.n;
  if (static_cast<Index>(b.size()) != n) throw DimensionError("tau: b must have n entries");
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);
  if (Q.cols() == 0) return bv.norm();
  if (Q.rows() != n) throw DimensionError("tau: basis must have n rows");
  Eigen::MatrixXd AQ(n, Q.cols());
  for (Index c = 0; c < Q.cols(); ++c)
    A.apply(std::span<const double>(Q.col(c).data(), n), std::span<double>(AQ.col(c).data(), n));
  const Eigen::VectorXd sv = linalg::singular_values(AQ);
  if (!(sv[sv.size() - 1] > 1e-14 * sv[0]))
    throw RankDeficientError("tau: A Q is numerically rank deficient");
  const Eigen::VectorXd c = linalg::least_squares(AQ, bv);
  return (AQ * c - bv).norm();
}

}  // namespace rgs
