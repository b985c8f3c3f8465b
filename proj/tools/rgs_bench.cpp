// rgs-bench: command line runner for the Gram-Schmidt, GMRES and sketch
// experiments. Exit codes: 0 success, 1 internal error, 2 configuration
// error, 3 numerical breakdown, 4 I/O failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rgs/bench.hpp"
#include "rgs/parallel.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBreakdown = 3;
constexpr int kExitIo = 4;

struct RawFlags {
  std::string sketch = "psrht";
  std::string policy = "mixed";
  std::string variants = "cgs,mgs,cgs2,rgs";
  std::string ls_solver = "householder";
  std::uint64_t phi_seed = 0;
  bool full_scale = false;
  bool no_cond_w = false;
  bool no_timing = false;
};

void add_flags(CLI::App* sub, rgs::RunConfig& cfg, RawFlags& raw) {
  sub->add_option("--n", cfg.n, "Ambient dimension")->check(CLI::PositiveNumber);
  sub->add_option("--m", cfg.m, "Number of columns / Krylov basis size")->check(CLI::PositiveNumber);
  sub->add_option("--k", cfg.k, "Sketch rows")->check(CLI::PositiveNumber);
  sub->add_option("--sketch", raw.sketch, "rademacher | psrht");
  sub->add_option("--seed", cfg.seed, "Sketch seed");
  sub->add_option("--policy", raw.policy, "f32 | f64 | mixed");
  sub->add_option("--variants", raw.variants, "Comma list of cgs,mgs,cgs2,rgs");
  sub->add_option("--matrix", cfg.matrix, "synthetic | PATH.mtx | laplacian:SIZE | randsparse:N[,NNZ[,SEED]]");
  sub->add_option("--eps-star", cfg.eps_star, "Certification accuracy");
  sub->add_option("--delta-star", cfg.delta_star, "Certification failure probability");
  sub->add_option("--out", cfg.out, "Output CSV path (prefix when several variants)");
  sub->add_option("--k-phi", cfg.k_phi, "Certification sketch rows (default k)");
  sub->add_option("--phi-seed", raw.phi_seed, "Certification sketch seed");
  sub->add_option("--ls-solver", raw.ls_solver, "householder | richardson:N | smgs");
  sub->add_flag("--precond", cfg.precond, "ILU(0) right preconditioning");
  sub->add_option("--tol", cfg.tol, "Relative residual for early exit (0: run all m)");
  sub->add_option("--breakdown-factor", cfg.breakdown_factor, "r_ii <= factor * u_crs * ||p_i|| is a breakdown (qr-bench/certify 0.5, else 10)");
  sub->add_option("--diag-stride", cfg.diag_stride, "Evaluate eigenvalue diagnostics every N iterations");
  sub->add_flag("--full-scale", raw.full_scale, "qr-bench at n = 1e6");
  sub->add_flag("--no-cond-w", raw.no_cond_w, "Skip the cond(W_i) trace");
  sub->add_flag("--no-timing", raw.no_timing, "Omit wall_time from the metadata");
  sub->add_option("--epsilon", cfg.epsilon, "sketch-info: embedding accuracy");
  sub->add_option("--delta", cfg.delta, "sketch-info: embedding failure probability");
}

void finalize(rgs::RunConfig& cfg, const RawFlags& raw, const CLI::App& sub) {
  cfg.sketch = rgs::parse_sketch_kind(raw.sketch);
  cfg.policy = rgs::parse_policy(raw.policy);
  cfg.variants = rgs::parse_variant_list(raw.variants);
  cfg.ls_solver = rgs::parse_lsq_solver(raw.ls_solver);
  if (sub.count("--phi-seed")) cfg.phi_seed = raw.phi_seed;
  if (raw.full_scale) cfg.n = 1000000;
  cfg.cond_w = !raw.no_cond_w;
  cfg.timing = !raw.no_timing;
}

void print_metadata(const rgs::ExperimentReport& r) {
  for (const auto& kv : r.metadata) std::cout << kv.first << '=' << kv.second << '\n';
}

void summarize(const rgs::ExperimentReport& r) {
  const std::string* v = r.get("variant");
  const std::string* s = r.get("status");
  std::cout << (v ? *v : "?") << ": status=" << (s ? *s : "?");
  if (!r.rows.empty()) {
    const auto& last = r.rows.back();
    std::cout << " iteration=" << last.iteration;
    if (!std::isnan(last.cond_q)) std::cout << " cond_Q=" << rgs::format_number(last.cond_q);
    if (!std::isnan(last.factorization_error))
      std::cout << " factorization_error=" << rgs::format_number(last.factorization_error);
    if (!std::isnan(last.omega)) std::cout << " omega=" << rgs::format_number(last.omega);
    if (!std::isnan(last.residual_norm))
      std::cout << " residual=" << rgs::format_number(last.residual_norm);
  }
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  rgs::init_threads_from_env();
  CLI::App app{"Randomized Gram-Schmidt benchmark runner"};
  app.require_subcommand(1);
  rgs::RunConfig cfg;
  RawFlags raw;
  auto* qr = app.add_subcommand("qr-bench", "Orthogonalize the synthetic (or .mtx) matrix");
  auto* gm = app.add_subcommand("gmres-bench", "GMRES on a sparse system");
  auto* ce = app.add_subcommand("certify", "Per-iteration embedding certification of RGS");
  auto* si = app.add_subcommand("sketch-info", "Sketch sizes and measured embedding accuracy");
  for (auto* sub : {qr, gm, ce, si}) add_flags(sub, cfg, raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    finalize(cfg, raw, *sub);
    std::vector<rgs::ExperimentReport> reports;
    if ((sub == qr || sub == ce) && !sub->count("--breakdown-factor"))
      cfg.breakdown_factor = rgs::kQrBenchBreakdownFactor;
    if (sub == qr) {
      reports = rgs::run_qr_bench(cfg);
    } else if (sub == gm) {
      if (!gm->count("--m")) cfg.m = 100;
      reports = rgs::run_gmres_bench(cfg);
    } else if (sub == ce) {
      reports.push_back(rgs::run_certify(cfg));
    } else {
      const auto r = rgs::sketch_info(cfg);
      print_metadata(r);
      if (!cfg.out.empty()) rgs::write_reports({r}, cfg.out);
      return 0;
    }
    for (const auto& r : reports) summarize(r);
    for (const auto& p : rgs::write_reports(reports, cfg.out)) std::cout << "wrote " << p << '\n';
    for (const auto& r : reports)
      if (rgs::report_broke_down(r)) return kExitBreakdown;
    return 0;
  } catch (const rgs::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const rgs::BreakdownError& e) {
    std::cerr << "breakdown: " << e.what() << '\n';
    return kExitBreakdown;
  } catch (const rgs::RankDeficientError& e) {
    std::cerr << "breakdown: " << e.what() << '\n';
    return kExitBreakdown;
  } catch (const rgs::PivotError& e) {
    std::cerr << "breakdown: " << e.what() << '\n';
    return kExitBreakdown;
  } catch (const rgs::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rgs::DimensionError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
