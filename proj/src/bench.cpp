#include "rgs/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "rgs/diagnostics.hpp"
#include "rgs/krylov.hpp"
#include "rgs/sparse.hpp"

namespace rgs {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) { return format_number(v); }
std::string num(Index v) { return std::to_string(v); }

void common_metadata(ExperimentReport& r, const RunConfig& cfg, std::string_view subcommand,
                     Index n, GsVariant v) {
  r.set("subcommand", std::string(subcommand));
  r.set("seed", std::to_string(cfg.seed));
  r.set("k", num(cfg.k));
  r.set("n", num(n));
  r.set("m", num(cfg.m));
  r.set("policy", std::string(policy_name(cfg.policy)));
  r.set("variant", std::string(variant_name(v)));
  r.set("sketch", std::string(sketch_kind_name(cfg.sketch)));
  r.set("matrix", cfg.matrix);
  r.set("ls_solver", lsq_solver_name(cfg.ls_solver));
  r.set("eps_star", num(cfg.eps_star));
  r.set("delta_star", num(cfg.delta_star));
  const CertificationParams cp = certification_params(cfg);
  r.set("k_phi", num(cp.k_phi > 0 ? cp.k_phi : cfg.k));
  r.set("phi_seed", std::to_string(cp.phi_seed));
  const Index kphi = cp.k_phi > 0 ? cp.k_phi : cfg.k;
  r.set("k_phi_a_priori", meets_certificate_size(cp, kphi)
                              ? "ok"
                              : "below:" + num(vector_certificate_dim(cp.eps_star, cp.delta_star)));
  r.set("breakdown_factor", num(cfg.breakdown_factor));
  r.set("diag_stride", num(cfg.diag_stride));
}

void finish(ExperimentReport& r, const RunConfig& cfg, Clock::time_point t0) {
  if (cfg.timing) {
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    r.set("wall_time", num(secs));
  }
}

Eigen::MatrixXd build_w(const RunConfig& cfg) {
  if (cfg.matrix == "synthetic") return synthetic_matrix(cfg.n, cfg.m);
  const SparseMatrix A = load_sparse(cfg.matrix);
  if (cfg.m > A.n()) throw InvalidArgument("m exceeds the matrix dimension");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(A.n(), cfg.m);
  for (const auto& t : A.triplets())
    if (t.col < cfg.m) W(t.row, t.col) += t.value;
  return W;
}

void check_config(const RunConfig& cfg) {
  if (cfg.m < 1) throw InvalidArgument("m must be >= 1");
  if (cfg.k < 1) throw InvalidArgument("k must be >= 1");
  if (cfg.diag_stride < 1) throw InvalidArgument("diag stride must be >= 1");
  if (cfg.variants.empty()) throw InvalidArgument("no variants requested");
}

ExperimentReport qr_variant(const RunConfig& cfg, const Eigen::MatrixXd& W,
                            const std::vector<double>& cond_w, const SketchOperator& theta,
                            const SketchOperator* phi, GsVariant v, std::string_view sub) {
  const auto t0 = Clock::now();
  const Index n = W.rows(), m = W.cols();
  ExperimentReport rep;
  common_metadata(rep, cfg, sub, n, v);

  GsOptions opts;
  opts.policy = cfg.policy;
  opts.solver = cfg.ls_solver;
  opts.breakdown_factor = cfg.breakdown_factor;
  opts.phi = v == GsVariant::RGS ? phi : nullptr;
  auto gs = make_gram_schmidt(v, n, m, &theta, opts);
  MonitorOptions mo;
  mo.eps_star = cfg.eps_star;
  mo.stride = cfg.diag_stride;
  BasisMonitor mon(n, m, v == GsVariant::RGS ? &theta : nullptr, cfg.policy, mo);

  std::string status = "ok";
  for (Index j = 0; j < m; ++j) {
    const std::span<const double> w(W.col(j).data(), n);
    const StepOutcome o = gs->try_step(w);
    if (!o.ok) {
      status = "breakdown:" + std::to_string(j + 1);
      break;
    }
    mon.observe(*gs, w, j == m - 1);
  }
  for (const auto& rec : mon.records()) {
    ReportRow row = ReportRow::from(rec);
    row.cond_w = cond_w[static_cast<std::size_t>(rec.iteration - 1)];
    rep.rows.push_back(row);
  }
  rep.set("status", status);
  rep.set("columns", num(gs->cols()));
  if (v == GsVariant::RGS && gs->cols() > 0) {
    const QrFactors f = gs->factors();
    StabilityCertificate c = phi ? certify_factorization(f, certification_params(cfg),
                                                         cfg.policy.u_crs())
                                 : certificates(f);
    rep.set("delta_m", num(c.delta_m));
    rep.set("delta_tilde_m", num(c.delta_tilde_m));
    rep.set("cond_S", num(c.cond_s));
    rep.set("certificate_gate", c.gate ? "pass" : "fail");
    if (c.omega_bar) rep.set("omega_bar_Q", num(*c.omega_bar));
    if (c.omega_bar_half) rep.set("omega_bar_Q_half", num(*c.omega_bar_half));
    if (c.cert_margin) rep.set("cert_margin_Q", num(*c.cert_margin));
    if (c.omega_bar_w) rep.set("omega_bar_W", num(*c.omega_bar_w));
    if (c.cert_margin_w) rep.set("cert_margin_W", num(*c.cert_margin_w));
    rep.set("margin_precondition", c.margin_precondition_ok ? "ok" : "violated");
  }
  finish(rep, cfg, t0);
  return rep;
}

}  // namespace

CertificationParams certification_params(const RunConfig& cfg) {
  CertificationParams p;
  p.eps_star = cfg.eps_star;
  p.delta_star = cfg.delta_star;
  p.k_phi = cfg.k_phi;
  p.phi_seed = cfg.phi_seed ? *cfg.phi_seed : mix64(cfg.seed ^ 0xF1F1F1F1ULL);
  return p;
}

std::vector<ExperimentReport> run_qr_bench(const RunConfig& cfg) {
  check_config(cfg);
  const Eigen::MatrixXd W = build_w(cfg);
  const Index n = W.rows();
  std::vector<double> cond_w(static_cast<std::size_t>(W.cols()), kMissing);
  if (cfg.cond_w) cond_w = leading_condition_numbers(W, cfg.diag_stride);
  const SketchOperator theta(cfg.sketch, cfg.k, n, cfg.seed);
  std::optional<SketchOperator> phi;
  for (GsVariant v : cfg.variants)
    if (v == GsVariant::RGS && !phi) phi.emplace(make_certification_sketch(theta, certification_params(cfg)));
  std::vector<ExperimentReport> out;
  for (GsVariant v : cfg.variants)
    out.push_back(qr_variant(cfg, W, cond_w, theta, phi ? &*phi : nullptr, v, "qr-bench"));
  return out;
}

std::vector<ExperimentReport> run_gmres_bench(const RunConfig& cfg) {
  check_config(cfg);
  if (cfg.matrix == "synthetic")
    throw InvalidArgument("gmres-bench needs a sparse matrix (laplacian:, randsparse: or .mtx)");
  const SparseMatrix A = load_sparse(cfg.matrix);
  const Index n = A.n();
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd b = A * y;
  b /= b.norm();
  std::optional<Ilu0> ilu;
  std::optional<Preconditioner> pre;
  if (cfg.precond) {
    ilu.emplace(A);
    pre = Preconditioner::from_ilu(*ilu);
  }
  const LinearOperator op = LinearOperator::from_sparse(A);
  const SketchOperator theta(cfg.sketch, cfg.k, n, cfg.seed);
  std::optional<SketchOperator> phi;
  for (GsVariant v : cfg.variants)
    if (v == GsVariant::RGS && !phi) phi.emplace(make_certification_sketch(theta, certification_params(cfg)));

  std::vector<ExperimentReport> out;
  for (GsVariant v : cfg.variants) {
    const auto t0 = Clock::now();
    ExperimentReport rep;
    common_metadata(rep, cfg, "gmres-bench", n, v);
    rep.set("precond", cfg.precond ? "ilu0" : "none");
    rep.set("tol", num(cfg.tol));
    GmresOptions go;
    go.m = cfg.m;
    go.variant = v;
    go.gs.policy = cfg.policy;
    go.gs.solver = cfg.ls_solver;
    go.gs.breakdown_factor = cfg.breakdown_factor;
    go.gs.phi = v == GsVariant::RGS && phi ? &*phi : nullptr;
    go.theta = &theta;
    go.precond = pre ? &*pre : nullptr;
    go.tol = cfg.tol;
    go.diagnostics = true;
    go.monitor.eps_star = cfg.eps_star;
    go.monitor.stride = cfg.diag_stride;
    const GmresResult res = gmres(op, std::span<const double>(b.data(), n), go);

    for (Index j = 0; j <= res.iterations; ++j) {
      ReportRow row;
      row.iteration = j;
      if (j < static_cast<Index>(res.records.size()))
        row = ReportRow::from(res.records[static_cast<std::size_t>(j)]);
      row.iteration = j;
      row.residual_norm = j == 0 ? b.norm() : res.residual_history[static_cast<std::size_t>(j - 1)];
      rep.rows.push_back(row);
    }
    rep.set("status", res.breakdown ? "subspace_exhausted" : "ok");
    rep.set("iterations", num(res.iterations));
    rep.set("true_final_residual", num(res.true_final_residual));
    if (res.tau) rep.set("tau", num(*res.tau));
    if (v == GsVariant::RGS) {
      rep.set("delta_m", num(res.certificate.delta_m));
      rep.set("delta_tilde_m", num(res.certificate.delta_tilde_m));
      rep.set("cond_S", num(res.certificate.cond_s));
    }
    finish(rep, cfg, t0);
    out.push_back(std::move(rep));
  }
  return out;
}

ExperimentReport run_certify(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.variants = {GsVariant::RGS};
  auto reps = run_qr_bench(c);
  reps.front().set("subcommand", "certify");
  return reps.front();
}

ExperimentReport sketch_info(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.n < 1 || cfg.k < 1) throw InvalidArgument("n and k must be >= 1");
  const SketchOperator theta(cfg.sketch, cfg.k, cfg.n, cfg.seed);
  ExperimentReport r;
  r.set("subcommand", "sketch-info");
  r.set("sketch", std::string(sketch_kind_name(cfg.sketch)));
  r.set("seed", std::to_string(cfg.seed));
  r.set("n", num(cfg.n));
  r.set("k", num(cfg.k));
  r.set("m", num(cfg.m));
  r.set("padded_size", num(theta.padded_size()));
  r.set("epsilon", num(cfg.epsilon));
  r.set("delta", num(cfg.delta));
  r.set("required_k_rademacher",
        num(required_sketch_dim(SketchKind::Rademacher, {cfg.epsilon, cfg.delta, cfg.m}, cfg.n)));
  r.set("required_k_psrht",
        num(required_sketch_dim(SketchKind::PSRHT, {cfg.epsilon, cfg.delta, cfg.m}, cfg.n)));
  r.set("eps_star", num(cfg.eps_star));
  r.set("delta_star", num(cfg.delta_star));
  r.set("certificate_k", num(vector_certificate_dim(cfg.eps_star, cfg.delta_star)));
  if (cfg.m <= cfg.n && cfg.m <= cfg.k && cfg.n * cfg.m <= 20'000'000) {
    std::mt19937_64 eng(mix64(cfg.seed ^ 0x6A55ULL));
    Eigen::MatrixXd V(cfg.n, cfg.m);
    for (Index j = 0; j < cfg.m; ++j)
      for (Index i = 0; i < cfg.n; ++i) V(i, j) = standard_normal(eng);
    r.set("omega_gaussian_subspace", num(epsilon_of(theta, V)));
  }
  finish(r, cfg, t0);
  return r;
}

bool report_broke_down(const ExperimentReport& r) {
  const std::string* s = r.get("status");
  return s && s->rfind("breakdown", 0) == 0;
}

std::vector<std::string> write_reports(const std::vector<ExperimentReport>& reports,
                                       const std::string& out) {
  std::vector<std::string> paths;
  if (out.empty()) return paths;
  for (const auto& r : reports) {
    std::string path = out;
    if (reports.size() > 1) {
      const std::string* v = r.get("variant");
      path = out + "_" + (v ? *v : std::to_string(paths.size())) + ".csv";
    }
    write_report(r, std::filesystem::path(path));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace rgs
