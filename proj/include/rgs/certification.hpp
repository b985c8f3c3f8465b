#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "rgs/gram_schmidt.hpp"
#include "rgs/precision.hpp"
#include "rgs/sketch.hpp"

namespace rgs {

struct CertificationParams {
  double eps_star = 0.05;
  double delta_star = 1e-3;
  std::uint64_t phi_seed = 0x9E3779B97F4A7C15ULL;
  Index k_phi = 0;  ///< 0 means "same as Theta"
};

/// Checks 0 < eps_star < 1 and 0 < delta_star < 1.
void validate(const CertificationParams& p);

/// Whether k_phi rows meet the a priori (eps_star, delta_star, 1) bound
/// vector_certificate_dim. Smaller Phi are allowed (the bound is pessimistic
/// for the sizes used in practice) and only reported.
bool meets_certificate_size(const CertificationParams& p, Index k_phi);

/// Phi with the given parameters; kind and size default to theta's.
SketchOperator make_certification_sketch(const SketchOperator& theta,
                                         const CertificationParams& p);

/// Upper bound on the embedding accuracy of Theta for range(V), computed from
/// the two sketches V_theta = Theta V and V_phi = Phi V only:
/// max(1 - (1-eps*) smin^2(V_theta X), (1+eps*) smax^2(V_theta X) - 1) with X
/// the inverse triangular factor of a binary64 QR of V_phi. Values >= 1 mean
/// the certification failed. Throws RankDeficientError when V_phi is
/// numerically rank deficient.
double omega_bar(const Eigen::MatrixXd& v_theta, const Eigen::MatrixXd& v_phi, double eps_star);

/// (1+eps*)(1+omega)/(1-eps') - 1: the largest omega_bar can be when Phi is an
/// eps'-embedding for V.
double omega_bar_sharpness(double omega, double eps_star, double eps_prime);

/// omega_bar together with the rounding margin u_crs cond(V_phi).
struct EmbeddingCertificate {
  double omega_bar = 0.0;
  double omega_bar_half = 0.0;  ///< advisory only
  double cond_phi = 1.0;
  double margin = 0.0;
  bool precondition_ok = true;  ///< u_crs <= 1/cond(V_phi)
};

EmbeddingCertificate certify_embedding(const Eigen::MatrixXd& v_theta,
                                       const Eigen::MatrixXd& v_phi, double eps_star,
                                       double u_crs);

/// Fills delta_m, delta_tilde_m, cond_s and omega_bar for Q and W from the
/// RGS factors, which must carry the certification sketches.
StabilityCertificate certify_factorization(const QrFactors& factors,
                                           const CertificationParams& params, double u_crs);
StabilityCertificate certify_factorization(const QrFactors& factors,
                                           const Eigen::MatrixXd& phi_q,
                                           const Eigen::MatrixXd& phi_w,
                                           const CertificationParams& params, double u_crs);

}  // namespace rgs
