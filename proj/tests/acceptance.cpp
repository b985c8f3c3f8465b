// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Arguments restrict the run to the
// listed criterion numbers.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "rgs/bench.hpp"
#include "rgs/krylov.hpp"
#include "rgs/linalg.hpp"
#include "rgs/parallel.hpp"

using namespace rgs;

namespace {

constexpr double kU32 = 0x1p-24;
constexpr double kU64 = 0x1p-53;

bool g_all_ok = true;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d %s: %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  g_all_ok = g_all_ok && ok;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
std::string g3(double v) { return fmt("%.3g", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ExperimentReport& by_variant(const std::vector<ExperimentReport>& reps, const char* v) {
  for (const auto& r : reps)
    if (*r.get("variant") == v) return r;
  std::fprintf(stderr, "missing variant %s\n", v);
  std::exit(1);
}

Eigen::MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& eng) {
  Eigen::MatrixXd G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = standard_normal(eng);
  return G;
}

// ------------------------------------------------------ synthetic runs (1-3)

struct SyntheticRuns {
  std::vector<ExperimentReport> mixed;
  ExperimentReport unified32;
  ExperimentReport small_sketch;
  double mixed_seconds = 0.0;
};

RunConfig synthetic_config() {
  RunConfig c;
  c.n = 100000;
  c.m = 300;
  c.k = 5000;
  c.sketch = SketchKind::PSRHT;
  c.policy = PrecisionPolicy::mixed();
  c.breakdown_factor = kQrBenchBreakdownFactor;
  c.cond_w = false;
  return c;
}

const SyntheticRuns& synthetic_runs() {
  static SyntheticRuns runs = [] {
    SyntheticRuns s;
    RunConfig c = synthetic_config();
    const auto t0 = std::chrono::steady_clock::now();
    s.mixed = run_qr_bench(c);
    s.mixed_seconds = seconds_since(t0);
    c.policy = PrecisionPolicy::unified32();
    c.variants = {GsVariant::RGS};
    s.unified32 = run_qr_bench(c).front();
    c.policy = PrecisionPolicy::mixed();
    c.k = 1500;
    s.small_sketch = run_qr_bench(c).front();
    return s;
  }();
  return runs;
}

double final_cond(const ExperimentReport& r) {
  return r.rows.size() == 300 ? r.rows.back().cond_q : std::nan("");
}

void criterion1() {
  const SyntheticRuns& s = synthetic_runs();
  const double rgs = final_cond(by_variant(s.mixed, "rgs"));
  const double mgs = final_cond(by_variant(s.mixed, "mgs"));
  const double cgs = final_cond(by_variant(s.mixed, "cgs"));
  const double f32 = final_cond(s.unified32);
  Index onset = 0;
  for (const auto& row : by_variant(s.mixed, "cgs").rows)
    if (row.cond_q > 1e3) {
      onset = row.iteration;
      break;
    }
  const bool ok = rgs <= 2.0 && mgs >= 10 && mgs <= 1e4 && f32 >= 10 && f32 <= 1e4 && cgs >= 1e4 &&
                  onset >= 40 && onset <= 90 && s.mixed_seconds < 120.0;
  report(1, ok,
         "cond(Q_300) rgs-mixed=" + g3(rgs) + " (<=2) mgs=" + g3(mgs) + " rgs-f32=" + g3(f32) +
             " (in [10,1e4]) cgs=" + g3(cgs) + " (>=1e4); cgs onset i=" + std::to_string(onset) +
             " (first cond>1e3, in [40,90]); 4-variant run " + fmt("%.1f", s.mixed_seconds) +
             " s (<120)");
}

void criterion2() {
  const SyntheticRuns& s = synthetic_runs();
  const double bound = 50 * kU32 * std::pow(300.0, 1.5);
  const auto err = [](const ExperimentReport& r) {
    return r.rows.size() == 300 ? r.rows.back().factorization_error : std::nan("");
  };
  const double rgs = err(by_variant(s.mixed, "rgs"));
  const double mgs = err(by_variant(s.mixed, "mgs"));
  const double cgs = err(by_variant(s.mixed, "cgs"));
  const bool ok_bound = rgs <= bound && mgs <= bound;
  const bool ok_ratio = cgs >= 10 * rgs;
  report(2, ok_bound && ok_ratio,
         "error rgs=" + g3(rgs) + " mgs=" + g3(mgs) + " (<=" + g3(bound) + ": " +
             (ok_bound ? "ok" : "violated") + "); cgs/rgs=" + g3(cgs / rgs) + " (>=10: " +
             (ok_ratio ? "ok" : "violated") + ")");
}

void criterion3() {
  const SyntheticRuns& s = synthetic_runs();
  double max_large = 0.0;
  for (const auto& row : by_variant(s.mixed, "rgs").rows) max_large = std::max(max_large, row.omega);
  double max_small = 0.0;
  Index first_above = 0;
  for (const auto& row : s.small_sketch.rows) {
    max_small = std::max(max_small, row.omega);
    if (!first_above && row.omega > 0.5) first_above = row.iteration;
  }
  bool exceeds_late = false;
  for (const auto& row : s.small_sketch.rows)
    if (row.iteration >= 70 && row.omega > 0.5) exceeds_late = true;
  const bool ok_a = by_variant(s.mixed, "rgs").rows.size() == 300 && max_large <= 0.55;
  const bool ok_b = s.small_sketch.rows.size() == 300 && exceeds_late && max_small < 1.0;
  report(3, ok_a && ok_b,
         "k=5000 max omega=" + g3(max_large) + " (<=0.55: " + (ok_a ? "ok" : "violated") +
             "); k=1500 omega>0.5 from i=" + std::to_string(first_above) + ", max omega=" +
             g3(max_small) + " (exceeds 0.5 at i>=70 and stays <1: " + (ok_b ? "ok" : "violated") +
             ")");
}

// ------------------------------------------------------------ certification

void criterion4() {
  const int seeds = 20;
  std::vector<double> ratios;
  int violations = 0;
  for (int s = 1; s <= seeds; ++s) {
    RunConfig c = synthetic_config();
    c.n = 20000;
    c.seed = static_cast<std::uint64_t>(s);
    c.timing = false;
    const ExperimentReport r = run_certify(c);
    if (r.rows.size() != 300) ++violations;
    for (const auto& row : r.rows) {
      if (!(row.omega_bar >= row.omega)) ++violations;
      if (row.omega > 0) ratios.push_back(row.omega_bar / row.omega);
    }
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios.empty() ? std::nan("") : ratios[ratios.size() / 2];
  const bool ok = violations == 0 && median >= 1.3 && median <= 3.5;
  report(4, ok,
         std::to_string(seeds) + " seeds at n=20000, m=300, k=k_phi=5000: omega_bar<omega at " +
             std::to_string(violations) + " iterations (0 required); median omega_bar/omega=" +
             g3(median) + " (in [1.3,3.5])");
}

// ------------------------------------------------------ stability certificates

void criterion5() {
  const Index n = 500, m = 20;
  std::mt19937_64 eng(20240505);
  std::uniform_real_distribution<double> logc(1.0, 4.0);
  int qualifying = 0, failures = 0, failures_all = 0;
  double worst_delta = 0.0, worst_tilde = 0.0;
  GsOptions o;
  o.policy = PrecisionPolicy::unified64();
  for (int t = 0; t < 200; ++t) {
    const double target = std::pow(10.0, logc(eng));
    const Eigen::HouseholderQR<Eigen::MatrixXd> qu(gaussian(n, m, eng));
    const Eigen::HouseholderQR<Eigen::MatrixXd> qv(gaussian(m, m, eng));
    const Eigen::MatrixXd U = qu.householderQ() * Eigen::MatrixXd::Identity(n, m);
    const Eigen::MatrixXd V = qv.householderQ() * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd sig(m);
    for (Index i = 0; i < m; ++i) sig[i] = std::pow(target, -double(i) / double(m - 1));
    const Eigen::MatrixXd W = U * sig.asDiagonal() * V.transpose();
    const SketchOperator theta(SketchKind::Rademacher, 256, n, 1000 + t);
    const double cond_w = linalg::cond(W);
    const double omega = epsilon_of(theta, W);
    const RgsResult res = rgs_factorize(W, theta, o);
    const double db = 20 * kU64 * m * m * cond_w;
    const double tb = 6 * kU64 * std::pow(double(m), 1.5);
    const bool holds = res.certificate.delta_m <= db && res.certificate.delta_tilde_m <= tb;
    if (!holds) ++failures_all;
    if (omega <= 0.5) {
      ++qualifying;
      if (!holds) ++failures;
      worst_delta = std::max(worst_delta, res.certificate.delta_m / db);
      worst_tilde = std::max(worst_tilde, res.certificate.delta_tilde_m / tb);
    }
  }
  const bool ok = qualifying > 0 && failures == 0;
  report(5, ok,
         std::to_string(qualifying) + "/200 runs with omega<=1/2, bound violations " +
             std::to_string(failures) + " (max Delta/bound=" + g3(worst_delta) +
             ", max DeltaTilde/bound=" + g3(worst_tilde) + "); violations over all 200 runs " +
             std::to_string(failures_all));
}

// ------------------------------------------------------------------ GMRES

struct GmresCheck {
  double residual;
  double x_error;
  double arnoldi;
};

GmresCheck check_gmres(const SparseMatrix& A, bool precond, Index k, std::uint64_t seed) {
  const Index n = A.n();
  Eigen::VectorXd b = A * Eigen::VectorXd::Ones(n);
  b /= b.norm();

  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : A.triplets()) t.emplace_back(e.row, e.col, e.value);
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(t.begin(), t.end());
  S.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(S);
  const Eigen::VectorXd xs = lu.solve(b);

  std::optional<Ilu0> ilu;
  std::optional<Preconditioner> pre;
  if (precond) {
    ilu.emplace(A);
    pre = Preconditioner::from_ilu(*ilu);
  }
  const SketchOperator theta(SketchKind::PSRHT, k, n, seed);
  const LinearOperator op = LinearOperator::from_sparse(A);
  GmresOptions o;
  o.m = 80;
  o.variant = GsVariant::RGS;
  o.theta = &theta;
  o.gs.policy = PrecisionPolicy::unified64();
  o.precond = pre ? &*pre : nullptr;
  const GmresResult r = gmres(op, std::span<const double>(b.data(), n), o);

  // Arnoldi residual of the normalized operator A M^{-1} / alpha
  const Index cols = r.h.cols();
  Eigen::MatrixXd AQ(n, cols);
  Eigen::VectorXd tmp(n);
  for (Index j = 0; j < cols; ++j) {
    const Eigen::VectorXd q = r.q.col(j);
    if (pre) {
      pre->solve(std::span<const double>(q.data(), n), std::span<double>(tmp.data(), n));
      AQ.col(j) = A * tmp;
    } else {
      AQ.col(j) = A * q;
    }
  }
  AQ /= r.scale_a;
  const double arnoldi = (AQ - r.q.leftCols(r.h.rows()) * r.h).norm();
  return {r.true_final_residual / b.norm(), (r.x - xs).norm() / xs.norm(), arnoldi};
}

void criterion6() {
  const double arnoldi_bound = 15 * kU64 * 80.0 * 80.0 * 10;
  double worst_res = 0, worst_x = 0, worst_arn = 0;
  const GmresCheck lap = check_gmres(laplacian_2d(100), true, 1000, 7);
  worst_res = lap.residual;
  worst_x = lap.x_error;
  worst_arn = lap.arnoldi;
  for (int s = 0; s < 20; ++s) {
    const GmresCheck c = check_gmres(random_sparse(2000, 5, 100 + s), false, 1000, 200 + s);
    worst_res = std::max(worst_res, c.residual);
    worst_x = std::max(worst_x, c.x_error);
    worst_arn = std::max(worst_arn, c.arnoldi);
  }
  const bool ok = worst_res <= 1e-8 && worst_x <= 1e-6 && worst_arn <= arnoldi_bound;
  report(6, ok,
         "laplacian 100x100 (ILU(0)) + 20 randsparse n=2000, m=80: laplacian residual=" +
             g3(lap.residual) + " x error=" + g3(lap.x_error) + "; worst residual=" + g3(worst_res) +
             " (<=1e-8), worst x error=" + g3(worst_x) + " (<=1e-6), worst Arnoldi residual=" +
             g3(worst_arn) + " (<=" + g3(arnoldi_bound) + ")");
}

void criterion7() {
  RunConfig c;
  c.matrix = "laplacian:100";
  c.m = 150;
  c.k = 1000;
  c.policy = PrecisionPolicy::mixed();
  c.precond = true;
  c.diag_stride = 50;
  c.timing = false;
  const auto reps = run_gmres_bench(c);
  const auto res = [&](const char* v) {
    return std::stod(*by_variant(reps, v).get("true_final_residual"));
  };
  const double cgs = res("cgs"), mgs = res("mgs"), cgs2 = res("cgs2"), rgs = res("rgs");
  const bool ok_gap = cgs >= 100 * std::max({rgs, mgs, cgs2});
  const bool ok_rgs = rgs >= 1e-8 && rgs <= 1e-5;
  report(7, ok_gap && ok_rgs,
         "laplacian 100x100, ILU(0), mixed, m=150 true residuals: cgs=" + g3(cgs) + " rgs=" +
             g3(rgs) + " mgs=" + g3(mgs) + " cgs2=" + g3(cgs2) + "; cgs/rgs=" + g3(cgs / rgs) +
             " cgs/mgs=" + g3(cgs / mgs) + " cgs/cgs2=" + g3(cgs / cgs2) + " (each >=100: " +
             (ok_gap ? "ok" : "violated") + "); rgs in [1e-8,1e-5]: " + (ok_rgs ? "ok" : "violated"));
}

// ------------------------------------------------------------------ sketches

void criterion8() {
  const Index n = 1024, d = 10;
  const Index k = required_sketch_dim(SketchKind::Rademacher, {0.5, 0.01, d}, n);
  std::mt19937_64 eng(8);
  int good = 0;
  for (int t = 0; t < 200; ++t) {
    const SketchOperator theta(SketchKind::Rademacher, k, n, 5000 + t);
    if (epsilon_of(theta, gaussian(n, d, eng)) <= 0.5) ++good;
  }
  const bool ok_embed = good >= 190;

  double fwht_err = 0.0;
  for (Index s = 1; s <= 4096; s *= 2) {
    std::vector<double> v(static_cast<std::size_t>(s));
    for (auto& x : v) x = standard_normal(eng);
    const std::vector<double> fast = fwht(v);
    double scale = 0.0;
    for (double x : v) scale += x * x;
    scale = std::sqrt(scale * double(s));
    for (Index i = 0; i < s; ++i) {
      double acc = 0.0;
      for (Index j = 0; j < s; ++j)
        acc += (std::popcount(static_cast<std::uint64_t>(i & j)) & 1 ? -1.0 : 1.0) * v[j];
      fwht_err = std::max(fwht_err, std::abs(acc - fast[i]) / scale);
    }
  }
  const bool ok_fwht = fwht_err <= 1e-12;

  const double eps = 0.5, delta = 0.01;
  const Index nr = 256;
  const Index kr = required_sketch_dim(SketchKind::Rademacher, {eps / 4, delta, 1}, nr);
  const Index trials = 1000;
  const double slack = 3 * std::sqrt(2 * delta * (1 - 2 * delta) / double(trials));
  double worst_frac = 0.0;
  for (int s = 0; s < 5; ++s) {
    std::vector<double> gamma(static_cast<std::size_t>(nr));
    for (auto& g : gamma) g = kU32 * std::abs(standard_normal(eng));
    const SketchOperator theta(SketchKind::Rademacher, kr, nr, 9000 + s);
    RoundingTrialConfig cfg;
    cfg.epsilon = eps;
    cfg.trials = trials;
    cfg.seed = static_cast<std::uint64_t>(s);
    worst_frac = std::max(worst_frac, rounding_sketch_trial(theta, gamma, cfg));
  }
  const bool ok_round = worst_frac <= 2 * delta + slack;

  report(8, ok_embed && ok_fwht && ok_round,
         "k=" + std::to_string(k) + ": omega<=0.5 in " + std::to_string(good) +
             "/200 (>=190); FWHT vs dense Hadamard max rel err=" + g3(fwht_err) +
             " (<=1e-12, s<=4096); rounding trial k=" + std::to_string(kr) +
             " n=256 eps=0.5 delta=0.01 worst failure fraction=" + g3(worst_frac) + " (<=" +
             g3(2 * delta + slack) + ")");
}

// ---------------------------------------------------------------- determinism

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_reports(const std::vector<ExperimentReport>& reps) {
  std::ostringstream out;
  for (const auto& r : reps) write_report(r, out);
  return fnv1a(out.str());
}

void criterion9() {
  RunConfig q;
  q.n = 5000;
  q.m = 60;
  q.k = 600;
  q.policy = PrecisionPolicy::unified64();
  q.timing = false;
  RunConfig g = q;
  g.matrix = "randsparse:3000,5,3";
  g.m = 40;
  g.precond = true;

  const std::uint64_t q1 = hash_reports(run_qr_bench(q));
  const std::uint64_t q2 = hash_reports(run_qr_bench(q));
  const std::uint64_t g1 = hash_reports(run_gmres_bench(g));
  const std::uint64_t g2 = hash_reports(run_gmres_bench(g));
  const int threads = num_threads();
  set_num_threads(4);
  const std::uint64_t q4 = hash_reports(run_qr_bench(q));
  const std::uint64_t g4 = hash_reports(run_gmres_bench(g));
  set_num_threads(threads);
  const bool ok = q1 == q2 && q1 == q4 && g1 == g2 && g1 == g4;
  char buf[160];
  std::snprintf(buf, sizeof buf, "qr-bench %016llx/%016llx/%016llx, gmres-bench %016llx/%016llx/%016llx",
                (unsigned long long)q1, (unsigned long long)q2, (unsigned long long)q4,
                (unsigned long long)g1, (unsigned long long)g2, (unsigned long long)g4);
  report(9, ok, std::string("CSV hashes (run 1/run 2/4 threads) ") + buf);
}

}  // namespace

int main(int argc, char** argv) {
  init_threads_from_env();
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
  void (*const criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                criterion6, criterion7, criterion8, criterion9};
  for (int id = 1; id <= 9; ++id) {
    if (!want(id)) continue;
    try {
      criteria[id - 1]();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  }
  return g_all_ok ? 0 : 1;
}
