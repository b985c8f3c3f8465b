#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rgs/errors.hpp"
#include "rgs/lsq.hpp"
#include "rgs/precision.hpp"
#include "rgs/sketch.hpp"

namespace rgs {

enum class GsVariant { CGS, MGS, CGS2, RGS };

GsVariant parse_variant(std::string_view name);
std::string_view variant_name(GsVariant v);
/// Comma separated list, e.g. "cgs,mgs,cgs2,rgs".
std::vector<GsVariant> parse_variant_list(std::string_view list);

/// Q (binary32 storage when the coarse precision is binary32), R in binary64,
/// and for RGS the sketches S = Theta Q and P = Theta W.
struct QrFactors {
  std::variant<Eigen::MatrixXf, Eigen::MatrixXd> q;
  Eigen::MatrixXd r;
  std::optional<Eigen::MatrixXd> s;
  std::optional<Eigen::MatrixXd> p;
  /// Certification sketches Phi Q and Phi W when a second operator was given.
  std::optional<Eigen::MatrixXd> phi_q;
  std::optional<Eigen::MatrixXd> phi_w;

  Index rows() const;
  Index cols() const { return r.cols(); }
  Eigen::MatrixXd q_double() const;
  /// Bytes occupied by the stored Q entries.
  std::size_t q_bytes() const;
};

struct StabilityCertificate {
  double delta_m = 0.0;        ///< ||I - S^T S||_F
  double delta_tilde_m = 0.0;  ///< ||P - S R||_F / ||P||_F
  double cond_s = 1.0;
  std::optional<double> omega;
  std::optional<double> omega_bar;       ///< for Q
  std::optional<double> omega_bar_w;     ///< for W
  std::optional<double> omega_bar_half;  ///< advisory omega_bar / 2, never used internally
  std::optional<double> cert_margin;     ///< u_crs cond(Phi Q)
  std::optional<double> cert_margin_w;   ///< u_crs cond(Phi W)
  bool margin_precondition_ok = true;    ///< u_crs <= 1/cond(Phi V) for every V certified
  bool gate = false;                     ///< delta_m <= 0.1 and delta_tilde_m <= 0.1
};

/// Singular value enclosure of Q implied by the certificate for a given
/// embedding accuracy eps.
struct SigmaEnclosure {
  double lower;
  double upper;
};
SigmaEnclosure sigma_enclosure(const StabilityCertificate& c, double eps, double u_crs);

struct GsOptions {
  PrecisionPolicy policy = PrecisionPolicy::mixed();
  LsqSolver solver = LsqSolver::householder();
  /// Breakdown when r_ii <= breakdown_factor * u_crs * ||p_i|| (||w_i|| for
  /// classical variants).
  double breakdown_factor = 10.0;
  /// Optional independent certification operator; sketches Phi w_i and
  /// Phi q'_i are then accumulated alongside p and s'.
  const SketchOperator* phi = nullptr;
};

/// Result of one attempted column.
struct StepOutcome {
  bool ok = true;
  double r_ii = 0.0;
  double threshold = 0.0;
};

/// Column-streaming Gram-Schmidt state. One implementation per variant and
/// precision; create with make_gram_schmidt.
class GramSchmidtProcess {
 public:
  virtual ~GramSchmidtProcess() = default;

  virtual GsVariant variant() const = 0;
  Index rows() const { return n_; }
  Index capacity() const { return cap_; }
  Index cols() const { return cols_; }
  const PrecisionPolicy& policy() const { return opts_.policy; }

  /// Orthogonalizes w against the current basis and appends it. On
  /// breakdown the basis is left unchanged, outcome.ok is false, and
  /// last_coefficients() still holds the projection coefficients.
  virtual StepOutcome try_step(std::span<const double> w) = 0;
  /// try_step that throws BreakdownError.
  void step(std::span<const double> w);

  /// Coefficients [R](0:i-1, i) of the most recent attempt, binary64.
  const std::vector<double>& last_coefficients() const { return coeffs_; }

  /// Leading cols() x cols() block of R.
  Eigen::MatrixXd r() const { return r_.topLeftCorner(cols_, cols_); }
  double r_entry(Index i, Index j) const { return r_(i, j); }
  /// Stored column j of Q widened to binary64.
  virtual void q_column(Index j, std::span<double> out) const = 0;
  virtual QrFactors factors() const = 0;

  /// RGS only: S = Theta Q, P = Theta W (binary64 copies).
  virtual bool has_sketches() const { return false; }
  virtual Eigen::VectorXd s_column(Index) const { return {}; }
  /// Certification sketches when GsOptions::phi was set.
  virtual bool has_phi() const { return false; }
  virtual Eigen::VectorXd phi_q_column(Index) const { return {}; }

 protected:
  GramSchmidtProcess(Index n, Index capacity, const GsOptions& opts);

  Index n_, cap_, cols_ = 0;
  GsOptions opts_;
  Eigen::MatrixXd r_;
  std::vector<double> coeffs_;
};

/// theta is required for RGS and ignored otherwise.
std::unique_ptr<GramSchmidtProcess> make_gram_schmidt(GsVariant variant, Index n, Index capacity,
                                                      const SketchOperator* theta,
                                                      const GsOptions& opts);

/// Supplies column j (0-based) of W into out.
using ColumnSource = std::function<void(Index j, std::span<double> out)>;

struct RgsResult {
  QrFactors factors;
  StabilityCertificate certificate;
};

RgsResult rgs_factorize(const Eigen::MatrixXd& W, const SketchOperator& theta,
                        const GsOptions& opts = {}, bool with_certificate = true);
RgsResult rgs_factorize(const ColumnSource& columns, Index n, Index m,
                        const SketchOperator& theta, const GsOptions& opts = {},
                        bool with_certificate = true);

/// CGS, MGS or CGS2.
QrFactors classical_factorize(const Eigen::MatrixXd& W, GsVariant variant,
                              const GsOptions& opts = {});

/// delta_m, delta_tilde_m and cond_s from the sketches in binary64.
StabilityCertificate certificates(const QrFactors& factors);
StabilityCertificate certificates(const Eigen::MatrixXd& S, const Eigen::MatrixXd& P,
                                  const Eigen::MatrixXd& R);

/// ||I - Q^T Q||_F in binary64.
double loss_of_orthogonality(const Eigen::MatrixXd& Q);
double loss_of_orthogonality(const QrFactors& f);

}  // namespace rgs
