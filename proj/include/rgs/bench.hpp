#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgs/certification.hpp"
#include "rgs/gram_schmidt.hpp"
#include "rgs/io.hpp"
#include "rgs/lsq.hpp"
#include "rgs/sketch.hpp"

namespace rgs {

enum class Subcommand { QrBench, GmresBench, Certify, SketchInfo };

struct RunConfig {
  Subcommand subcommand = Subcommand::QrBench;
  Index n = 100000;
  Index m = 300;
  Index k = 5000;
  SketchKind sketch = SketchKind::PSRHT;
  std::uint64_t seed = 1;
  PrecisionPolicy policy = PrecisionPolicy::mixed();
  std::vector<GsVariant> variants = {GsVariant::CGS, GsVariant::MGS, GsVariant::CGS2,
                                     GsVariant::RGS};
  std::string matrix = "synthetic";
  double eps_star = 0.05;
  double delta_star = 1e-3;
  std::string out;
  Index k_phi = 0;                         ///< 0: same as k
  std::optional<std::uint64_t> phi_seed;   ///< default derived from seed
  LsqSolver ls_solver = LsqSolver::householder();
  bool precond = false;
  double tol = 0.0;
  double breakdown_factor = 10.0;
  Index diag_stride = 1;
  bool cond_w = true;
  bool timing = true;  ///< write the wall_time metadata line
  // sketch-info only
  double epsilon = 0.5;
  double delta = 1e-2;
};

/// Breakdown factor used by qr-bench and certify unless given explicitly. The
/// synthetic family is orthogonalized past its numerical rank, where
/// r_ii / ||p_i|| settles at a few u_crs.
inline constexpr double kQrBenchBreakdownFactor = 0.5;

/// Certification parameters implied by the configuration.
CertificationParams certification_params(const RunConfig& cfg);

/// Runs every requested variant on the same W (synthetic or the first m
/// columns of a .mtx file). One report per variant, in request order. A
/// breakdown ends that variant's rows and is recorded as status=breakdown.
std::vector<ExperimentReport> run_qr_bench(const RunConfig& cfg);

/// b = A y / ||A y|| with y = ones, optional ILU(0) right preconditioning,
/// one report per variant with the residual history and basis diagnostics.
std::vector<ExperimentReport> run_gmres_bench(const RunConfig& cfg);

/// RGS only: omega, omega_bar, the rounding margin and cond(S_i) per iteration.
ExperimentReport run_certify(const RunConfig& cfg);

/// Sketch sizes and a measured embedding accuracy as key/value metadata.
ExperimentReport sketch_info(const RunConfig& cfg);

/// True when the report's status metadata records a breakdown.
bool report_broke_down(const ExperimentReport& r);

/// Writes the reports: `out` verbatim for a single report, otherwise
/// `<out>_<variant>.csv`. Returns the paths written.
std::vector<std::string> write_reports(const std::vector<ExperimentReport>& reports,
                                       const std::string& out);

}  // namespace rgs
