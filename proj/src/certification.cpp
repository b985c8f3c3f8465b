#include "rgs/certification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgs/linalg.hpp"

namespace rgs {

void validate(const CertificationParams& p) {
  if (!(p.eps_star > 0.0 && p.eps_star < 1.0))
    throw InvalidArgument("eps_star must lie in (0,1)");
  if (!(p.delta_star > 0.0 && p.delta_star < 1.0))
    throw InvalidArgument("delta_star must lie in (0,1)");
  if (p.k_phi < 0) throw InvalidArgument("k_phi must be >= 0");
}

bool meets_certificate_size(const CertificationParams& p, Index k_phi) {
  validate(p);
  return k_phi >= vector_certificate_dim(p.eps_star, p.delta_star);
}

SketchOperator make_certification_sketch(const SketchOperator& theta,
                                         const CertificationParams& p) {
  const Index k = p.k_phi > 0 ? p.k_phi : theta.rows();
  validate(p);
  if (p.phi_seed == theta.seed())
    throw InvalidArgument("the certification sketch needs a seed different from Theta's");
  return SketchOperator(theta.kind(), k, theta.cols(), p.phi_seed);
}

namespace {

struct Reduced {
  Eigen::VectorXd sv;  // singular values of V_theta X
  double cond_phi;
};

Reduced reduce(const Eigen::MatrixXd& v_theta, const Eigen::MatrixXd& v_phi) {
  const Index m = v_phi.cols();
  if (v_theta.cols() != m) throw DimensionError("omega_bar: sketches have different widths");
  if (m < 1) throw InvalidArgument("omega_bar: no columns");
  if (v_phi.rows() < m) throw RankDeficientError("omega_bar: V_phi has fewer rows than columns");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v_phi);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const Eigen::VectorXd rs = linalg::singular_values(R);
  if (!(rs[m - 1] > 1e-14 * rs[0]))
    throw RankDeficientError("omega_bar: V_phi is numerically rank deficient");
  // (V_theta R^{-1})^T = R^{-T} V_theta^T
  const Eigen::MatrixXd yt =
      R.triangularView<Eigen::Upper>().transpose().solve(v_theta.transpose());
  Eigen::VectorXd sv = linalg::singular_values(yt.transpose());
  if (v_theta.rows() < m) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
    full.head(sv.size()) = sv;
    sv = full;
  }
  return {sv, rs[0] / rs[m - 1]};
}

double bar_from_sv(const Eigen::VectorXd& sv, double eps_star) {
  const double smax = sv[0], smin = sv[sv.size() - 1];
  return std::max(1.0 - (1.0 - eps_star) * smin * smin, (1.0 + eps_star) * smax * smax - 1.0);
}

}  // namespace

double omega_bar(const Eigen::MatrixXd& v_theta, const Eigen::MatrixXd& v_phi, double eps_star) {
  if (!(eps_star >= 0.0 && eps_star < 1.0)) throw InvalidArgument("eps_star must lie in [0,1)");
  return bar_from_sv(reduce(v_theta, v_phi).sv, eps_star);
}

double omega_bar_sharpness(double omega, double eps_star, double eps_prime) {
  if (!(eps_prime < 1.0)) throw InvalidArgument("eps_prime must be < 1");
  return (1.0 + eps_star) / (1.0 - eps_prime) * (1.0 + omega) - 1.0;
}

EmbeddingCertificate certify_embedding(const Eigen::MatrixXd& v_theta,
                                       const Eigen::MatrixXd& v_phi, double eps_star,
                                       double u_crs) {
  if (!(eps_star >= 0.0 && eps_star < 1.0)) throw InvalidArgument("eps_star must lie in [0,1)");
  const Reduced red = reduce(v_theta, v_phi);
  EmbeddingCertificate c;
  c.omega_bar = bar_from_sv(red.sv, eps_star);
  c.omega_bar_half = 0.5 * c.omega_bar;
  c.cond_phi = red.cond_phi;
  c.margin = u_crs * red.cond_phi;
  c.precondition_ok = u_crs <= 1.0 / red.cond_phi;
  return c;
}

StabilityCertificate certify_factorization(const QrFactors& f, const Eigen::MatrixXd& phi_q,
                                           const Eigen::MatrixXd& phi_w,
                                           const CertificationParams& params, double u_crs) {
  validate(params);
  StabilityCertificate c = certificates(f);
  const EmbeddingCertificate q = certify_embedding(*f.s, phi_q, params.eps_star, u_crs);
  c.omega_bar = q.omega_bar;
  c.omega_bar_half = q.omega_bar_half;
  c.cert_margin = q.margin;
  c.margin_precondition_ok = q.precondition_ok;
  try {
    const EmbeddingCertificate w = certify_embedding(*f.p, phi_w, params.eps_star, u_crs);
    c.omega_bar_w = w.omega_bar;
    c.cert_margin_w = w.margin;
    c.margin_precondition_ok = c.margin_precondition_ok && w.precondition_ok;
  } catch (const RankDeficientError&) {
    // numerically singular W: no certificate, precondition violated
    c.cert_margin_w = std::numeric_limits<double>::infinity();
    c.margin_precondition_ok = false;
  }
  return c;
}

StabilityCertificate certify_factorization(const QrFactors& f, const CertificationParams& params,
                                           double u_crs) {
  if (!f.phi_q || !f.phi_w)
    throw InvalidArgument("certify_factorization: factors carry no certification sketches");
  return certify_factorization(f, *f.phi_q, *f.phi_w, params, u_crs);
}

}  // namespace rgs
