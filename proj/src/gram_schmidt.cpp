#include "rgs/gram_schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgs/linalg.hpp"

namespace rgs {

GsVariant parse_variant(std::string_view name) {
  if (name == "cgs") return GsVariant::CGS;
  if (name == "mgs") return GsVariant::MGS;
  if (name == "cgs2") return GsVariant::CGS2;
  if (name == "rgs") return GsVariant::RGS;
  throw InvalidArgument("unknown Gram-Schmidt variant '" + std::string(name) + "'");
}

std::string_view variant_name(GsVariant v) {
  switch (v) {
    case GsVariant::CGS: return "cgs";
    case GsVariant::MGS: return "mgs";
    case GsVariant::CGS2: return "cgs2";
    case GsVariant::RGS: return "rgs";
  }
  return "?";
}

std::vector<GsVariant> parse_variant_list(std::string_view list) {
  std::vector<GsVariant> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (!item.empty()) out.push_back(parse_variant(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InvalidArgument("empty variant list");
  return out;
}

Index QrFactors::rows() const {
  return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, q);
}

Eigen::MatrixXd QrFactors::q_double() const {
  return std::visit([](const auto& m) -> Eigen::MatrixXd { return m.template cast<double>(); }, q);
}

std::size_t QrFactors::q_bytes() const {
  return std::visit(
      [](const auto& m) {
        using S = typename std::decay_t<decltype(m)>::Scalar;
        return static_cast<std::size_t>(m.size()) * sizeof(S);
      },
      q);
}

SigmaEnclosure sigma_enclosure(const StabilityCertificate& c, double eps, double u_crs) {
  return {std::pow(1.0 + eps, -0.5) * (1.0 - c.delta_m - 0.1 * u_crs),
          std::pow(1.0 - eps, -0.5) * (1.0 + c.delta_m + 0.1 * u_crs)};
}

GramSchmidtProcess::GramSchmidtProcess(Index n, Index capacity, const GsOptions& opts)
    : n_(n), cap_(capacity), opts_(opts), r_(Eigen::MatrixXd::Zero(capacity, capacity)) {
  if (n < 1 || capacity < 1) throw InvalidArgument("Gram-Schmidt needs n, m >= 1");
  if (capacity > n) throw InvalidArgument("Gram-Schmidt needs m <= n");
  if (!(opts.breakdown_factor >= 0.0)) throw InvalidArgument("breakdown factor must be >= 0");
  coeffs_.reserve(static_cast<std::size_t>(capacity));
}

void GramSchmidtProcess::step(std::span<const double> w) {
  const StepOutcome o = try_step(w);
  if (!o.ok) throw BreakdownError(cols_, o.r_ii, o.threshold);
}

namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// out = Q(:, 0:cols)^T w. Each entry accumulates left to right over the rows,
/// exactly like kernels::dot; four columns are interleaved for throughput.
template <class T>
void qt_times(const T* q, Index ld, Index n, Index cols, const T* w, T* out) {
  Index c = 0;
  for (; c + 4 <= cols; c += 4) {
    const T* q0 = q + c * ld;
    const T* q1 = q0 + ld;
    const T* q2 = q1 + ld;
    const T* q3 = q2 + ld;
    T a0(0), a1(0), a2(0), a3(0);
    for (Index j = 0; j < n; ++j) {
      const T wj = w[j];
      a0 = a0 + q0[j] * wj;
      a1 = a1 + q1[j] * wj;
      a2 = a2 + q2[j] * wj;
      a3 = a3 + q3[j] * wj;
    }
    out[c] = a0;
    out[c + 1] = a1;
    out[c + 2] = a2;
    out[c + 3] = a3;
  }
  for (; c < cols; ++c) out[c] = kernels::dot(q + c * ld, w, n);
}

template <class To, class From>
void convert(std::span<const From> in, std::vector<To>& out) {
  out.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<To>(in[i]);
}

template <class C>
void check_coarse(const std::vector<C>& v, const char* what) {
  if (!kernels::all_finite(v.data(), static_cast<Index>(v.size())))
    throw OverflowError(std::string(what) + " overflowed the coarse format");
}

// ------------------------------------------------------------------------ RGS

template <class C, class F>
class RgsProcess final : public GramSchmidtProcess {
 public:
  RgsProcess(Index n, Index capacity, const SketchOperator& theta, const GsOptions& opts)
      : GramSchmidtProcess(n, capacity, opts),
        theta_(theta),
        k_(theta.rows()),
        q_(n, capacity),
        s_(theta.rows(), capacity),
        p_(theta.rows(), capacity),
        lsq_(make_sketched_lsq<F>(opts.solver, theta.rows(), capacity)) {
    if (theta.cols() != n) throw DimensionError("RGS: sketch width must equal n");
    if (theta.rows() < capacity) throw InvalidArgument("RGS needs k >= m");
    if (opts.phi) {
      if (opts.phi->cols() != n) throw DimensionError("RGS: certification sketch width must equal n");
      phi_q_.resize(opts.phi->rows(), capacity);
      phi_w_.resize(opts.phi->rows(), capacity);
    }
  }

  GsVariant variant() const override { return GsVariant::RGS; }

  StepOutcome try_step(std::span<const double> w) override {
    if (static_cast<Index>(w.size()) != n_) throw DimensionError("RGS step: w must have n entries");
    if (cols_ >= cap_) throw InvalidArgument("RGS step: capacity exhausted");
    const Index i = cols_;

    // p = Theta w
    convert<F>(w, wf_);
    pv_.resize(static_cast<std::size_t>(k_));
    theta_.apply<F>(std::span<const F>(wf_), std::span<F>(pv_));

    // sketched least squares, projection, s' = Theta q'
    y_.assign(static_cast<std::size_t>(i), F(0));
    qp_.resize(static_cast<std::size_t>(n_));
    sp_.resize(static_cast<std::size_t>(k_));
    convert<C>(w, wc_);
    check_coarse(wc_, "w");
    if (i == 0) {
      qp_ = wc_;
      sp_ = pv_;
    } else {
      lsq_->solve(std::span<const F>(pv_), std::span<F>(y_));
      yc_.resize(static_cast<std::size_t>(i));
      for (Index c = 0; c < i; ++c) yc_[c] = static_cast<C>(y_[c]);
      kernels::project_out<C>(q_.data(), n_, n_, i, yc_.data(), wc_.data(), qp_.data());
      check_coarse(qp_, "projection");
      convert<F>(std::span<const C>(qp_), qpf_);
      theta_.apply<F>(std::span<const F>(qpf_), std::span<F>(sp_));
    }
    coeffs_.resize(static_cast<std::size_t>(i));
    for (Index c = 0; c < i; ++c) coeffs_[c] = static_cast<double>(y_[c]);

    // r_ii and breakdown
    const F rii = kernels::norm2(sp_.data(), k_);
    const double pnorm = static_cast<double>(kernels::norm2(pv_.data(), k_));
    const double thr = opts_.breakdown_factor * opts_.policy.u_crs() * pnorm;
    const double r = static_cast<double>(rii);
    if (!(r > thr) || !std::isfinite(r)) return {false, r, thr};

    // normalize, store
    for (Index j = 0; j < k_; ++j) {
      s_(j, i) = sp_[j] / rii;
      p_(j, i) = pv_[j];
    }
    C* qcol = q_.col(i).data();
    for (Index j = 0; j < n_; ++j) qcol[j] = static_cast<C>(static_cast<F>(qp_[j]) / rii);
    for (Index c = 0; c < i; ++c) r_(c, i) = coeffs_[c];
    r_(i, i) = r;
    lsq_->append(std::span<const F>(s_.col(i).data(), k_));

    if (opts_.phi) {
      const Index kp = opts_.phi->rows();
      std::vector<F> tmp(static_cast<std::size_t>(kp));
      opts_.phi->apply<F>(std::span<const F>(wf_), std::span<F>(tmp));
      for (Index j = 0; j < kp; ++j) phi_w_(j, i) = static_cast<double>(tmp[j]);
      if (i == 0) convert<F>(std::span<const C>(qp_), qpf_);
      opts_.phi->apply<F>(std::span<const F>(qpf_), std::span<F>(tmp));
      for (Index j = 0; j < kp; ++j) phi_q_(j, i) = static_cast<double>(tmp[j] / rii);
    }
    ++cols_;
    return {true, r, thr};
  }

  void q_column(Index j, std::span<double> out) const override {
    if (j < 0 || j >= cols_ || static_cast<Index>(out.size()) != n_)
      throw DimensionError("q_column out of range");
    const C* src = q_.col(j).data();
    for (Index t = 0; t < n_; ++t) out[t] = static_cast<double>(src[t]);
  }

  QrFactors factors() const override {
    QrFactors f;
    f.q = Mat<C>(q_.leftCols(cols_));
    f.r = r();
    f.s = s_.leftCols(cols_).template cast<double>();
    f.p = p_.leftCols(cols_).template cast<double>();
    if (opts_.phi) {
      f.phi_q = phi_q_.leftCols(cols_);
      f.phi_w = phi_w_.leftCols(cols_);
    }
    return f;
  }

  bool has_sketches() const override { return true; }
  Eigen::VectorXd s_column(Index j) const override { return s_.col(j).template cast<double>(); }
  bool has_phi() const override { return opts_.phi != nullptr; }
  Eigen::VectorXd phi_q_column(Index j) const override { return phi_q_.col(j); }

 private:
  const SketchOperator& theta_;
  Index k_;
  Mat<C> q_;
  Mat<F> s_, p_;
  Eigen::MatrixXd phi_q_, phi_w_;
  std::unique_ptr<SketchedLeastSquares<F>> lsq_;
  std::vector<F> wf_, pv_, y_, sp_, qpf_;
  std::vector<C> wc_, yc_, qp_;
};

// ------------------------------------------------------------ CGS, MGS, CGS2

template <class T>
class ClassicalProcess final : public GramSchmidtProcess {
 public:
  ClassicalProcess(GsVariant v, Index n, Index capacity, const GsOptions& opts)
      : GramSchmidtProcess(n, capacity, opts), variant_(v), q_(n, capacity) {}

  GsVariant variant() const override { return variant_; }

  StepOutcome try_step(std::span<const double> w) override {
    if (static_cast<Index>(w.size()) != n_) throw DimensionError("GS step: w must have n entries");
    if (cols_ >= cap_) throw InvalidArgument("GS step: capacity exhausted");
    const Index i = cols_;
    convert<T>(w, wt_);
    check_coarse(wt_, "w");
    v_.resize(static_cast<std::size_t>(n_));
    c1_.assign(static_cast<std::size_t>(i), T(0));
    coeffs_.assign(static_cast<std::size_t>(i), 0.0);
    const T* q = q_.data();

    switch (variant_) {
      case GsVariant::CGS:
        qt_times(q, n_, n_, i, wt_.data(), c1_.data());
        kernels::project_out<T>(q, n_, n_, i, c1_.data(), wt_.data(), v_.data());
        for (Index c = 0; c < i; ++c) coeffs_[c] = static_cast<double>(c1_[c]);
        break;
      case GsVariant::MGS:
        v_ = wt_;
        for (Index c = 0; c < i; ++c) {
          const T* qc = q + c * n_;
          const T rc = kernels::dot(qc, v_.data(), n_);
          for (Index j = 0; j < n_; ++j) v_[j] = v_[j] - rc * qc[j];
          coeffs_[c] = static_cast<double>(rc);
        }
        break;
      case GsVariant::CGS2: {
        qt_times(q, n_, n_, i, wt_.data(), c1_.data());
        kernels::project_out<T>(q, n_, n_, i, c1_.data(), wt_.data(), v_.data());
        c2_.assign(static_cast<std::size_t>(i), T(0));
        tmp_ = v_;
        qt_times(q, n_, n_, i, tmp_.data(), c2_.data());
        kernels::project_out<T>(q, n_, n_, i, c2_.data(), tmp_.data(), v_.data());
        for (Index c = 0; c < i; ++c)
          coeffs_[c] = static_cast<double>(c1_[c]) + static_cast<double>(c2_[c]);
        break;
      }
      case GsVariant::RGS:
        throw InvalidArgument("classical process cannot run RGS");
    }

    const T rii = kernels::norm2(v_.data(), n_);
    const double wnorm = static_cast<double>(kernels::norm2(wt_.data(), n_));
    const double thr = opts_.breakdown_factor * opts_.policy.u_crs() * wnorm;
    const double r = static_cast<double>(rii);
    if (!(r > thr) || !std::isfinite(r)) return {false, r, thr};

    T* qcol = q_.col(i).data();
    for (Index j = 0; j < n_; ++j) qcol[j] = v_[j] / rii;
    for (Index c = 0; c < i; ++c) r_(c, i) = coeffs_[c];
    r_(i, i) = r;
    ++cols_;
    return {true, r, thr};
  }

  void q_column(Index j, std::span<double> out) const override {
    if (j < 0 || j >= cols_ || static_cast<Index>(out.size()) != n_)
      throw DimensionError("q_column out of range");
    const T* src = q_.col(j).data();
    for (Index t = 0; t < n_; ++t) out[t] = static_cast<double>(src[t]);
  }

  QrFactors factors() const override {
    QrFactors f;
    f.q = Mat<T>(q_.leftCols(cols_));
    f.r = r();
    return f;
  }

 private:
  GsVariant variant_;
  Mat<T> q_;
  std::vector<T> wt_, v_, c1_, c2_, tmp_;
};

}  // namespace

std::unique_ptr<GramSchmidtProcess> make_gram_schmidt(GsVariant variant, Index n, Index capacity,
                                                      const SketchOperator* theta,
                                                      const GsOptions& opts) {
  if (variant == GsVariant::RGS) {
    if (!theta) throw InvalidArgument("RGS needs a sketch operator");
    switch (opts.policy.mode) {
      case Precision::Unified32:
        return std::make_unique<RgsProcess<float, float>>(n, capacity, *theta, opts);
      case Precision::Mixed32_64:
        return std::make_unique<RgsProcess<float, double>>(n, capacity, *theta, opts);
      case Precision::Unified64:
        return std::make_unique<RgsProcess<double, double>>(n, capacity, *theta, opts);
    }
  }
  if (opts.policy.coarse_is_single())
    return std::make_unique<ClassicalProcess<float>>(variant, n, capacity, opts);
  return std::make_unique<ClassicalProcess<double>>(variant, n, capacity, opts);
}

RgsResult rgs_factorize(const ColumnSource& columns, Index n, Index m,
                        const SketchOperator& theta, const GsOptions& opts,
                        bool with_certificate) {
  auto gs = make_gram_schmidt(GsVariant::RGS, n, m, &theta, opts);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (Index j = 0; j < m; ++j) {
    columns(j, w);
    gs->step(w);
  }
  RgsResult out{gs->factors(), {}};
  if (with_certificate) out.certificate = certificates(out.factors);
  return out;
}

RgsResult rgs_factorize(const Eigen::MatrixXd& W, const SketchOperator& theta,
                        const GsOptions& opts, bool with_certificate) {
  if (W.rows() != theta.cols()) throw DimensionError("rgs_factorize: W must have n rows");
  const ColumnSource src = [&W](Index j, std::span<double> out) {
    std::copy_n(W.col(j).data(), W.rows(), out.data());
  };
  return rgs_factorize(src, W.rows(), W.cols(), theta, opts, with_certificate);
}

QrFactors classical_factorize(const Eigen::MatrixXd& W, GsVariant variant, const GsOptions& opts) {
  if (variant == GsVariant::RGS) throw InvalidArgument("classical_factorize: use rgs_factorize");
  auto gs = make_gram_schmidt(variant, W.rows(), W.cols(), nullptr, opts);
  for (Index j = 0; j < W.cols(); ++j)
    gs->step(std::span<const double>(W.col(j).data(), W.rows()));
  return gs->factors();
}

StabilityCertificate certificates(const Eigen::MatrixXd& S, const Eigen::MatrixXd& P,
                                  const Eigen::MatrixXd& R) {
  if (S.cols() != R.rows() || P.cols() != R.cols() || S.rows() != P.rows())
    throw DimensionError("certificates: S, P, R do not conform");
  StabilityCertificate c;
  c.delta_m = linalg::identity_defect(S.transpose() * S);
  const double pn = P.norm();
  c.delta_tilde_m = pn > 0.0 ? (P - S * R).norm() / pn : 0.0;
  c.cond_s = linalg::cond(S);
  c.gate = c.delta_m <= 0.1 && c.delta_tilde_m <= 0.1;
  return c;
}

StabilityCertificate certificates(const QrFactors& f) {
  if (!f.s || !f.p) throw InvalidArgument("certificates: sketches S and P are required");
  return certificates(*f.s, *f.p, f.r);
}

double loss_of_orthogonality(const Eigen::MatrixXd& Q) {
  return linalg::identity_defect(Q.transpose() * Q);
}

double loss_of_orthogonality(const QrFactors& f) {
  return loss_of_orthogonality(f.q_double());
}

}  // namespace rgs
