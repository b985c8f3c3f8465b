// Python bindings for the rgs library.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>


#include "rgs/certification.hpp"
#include "rgs/gram_schmidt.hpp"
#include "rgs/io.hpp"
#include "rgs/krylov.hpp"
#include "rgs/parallel.hpp"
#include "rgs/sketch.hpp"
#include "rgs/sparse.hpp"

namespace py = pybind11;
using namespace rgs;

namespace {

using Csr = std::tuple<std::vector<Index>, std::vector<Index>, std::vector<double>, Index>;

Csr to_csr(const SparseMatrix& A) { return {A.row_ptr(), A.col_idx(), A.values(), A.n()}; }

SparseMatrix from_csr(const std::vector<Index>& indptr, const std::vector<Index>& indices,
                      const std::vector<double>& data, Index n) {
  if (static_cast<Index>(indptr.size()) != n + 1 || indices.size() != data.size())
    throw DimensionError("CSR arrays do not describe an n x n matrix");
  std::vector<Triplet> t;
  t.reserve(data.size());
  for (Index r = 0; r < n; ++r)
    for (Index p = indptr[r]; p < indptr[r + 1]; ++p) t.push_back({r, indices[p], data[p]});
  return SparseMatrix::from_triplets(n, std::move(t));
}

GsOptions make_options(const std::string& policy, const std::string& solver,
                       double breakdown_factor) {
  GsOptions o;
  o.policy = parse_policy(policy);
  o.solver = parse_lsq_solver(solver);
  o.breakdown_factor = breakdown_factor;
  return o;
}

py::dict certificate_dict(const StabilityCertificate& c) {
  py::dict d;
  d["delta_m"] = c.delta_m;
  d["delta_tilde_m"] = c.delta_tilde_m;
  d["cond_s"] = c.cond_s;
  d["gate"] = c.gate;
  if (c.omega_bar) d["omega_bar"] = *c.omega_bar;
  if (c.omega_bar_w) d["omega_bar_w"] = *c.omega_bar_w;
  if (c.cert_margin) d["cert_margin"] = *c.cert_margin;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rgs, m) {
  m.doc() = "Randomized Gram-Schmidt, sketching and GMRES";
  init_threads_from_env();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<OverflowError>(m, "OverflowError", base.ptr());
  py::register_exception<RankDeficientError>(m, "RankDeficientError", base.ptr());
  py::register_exception<BreakdownError>(m, "BreakdownError", base.ptr());
  py::register_exception<PivotError>(m, "PivotError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<SketchOperator>(m, "Sketch")
      .def(py::init([](const std::string& kind, Index k, Index n, std::uint64_t seed) {
             return SketchOperator(parse_sketch_kind(kind), k, n, seed);
           }),
           py::arg("kind"), py::arg("k"), py::arg("n"), py::arg("seed") = 1)
      .def_property_readonly("kind", [](const SketchOperator& s) {
        return std::string(sketch_kind_name(s.kind()));
      })
      .def_property_readonly("rows", &SketchOperator::rows)
      .def_property_readonly("cols", &SketchOperator::cols)
      .def_property_readonly("seed", &SketchOperator::seed)
      .def_property_readonly("padded_size", &SketchOperator::padded_size)
      .def("apply", [](const SketchOperator& s, const Eigen::VectorXd& x) { return s.apply(x); },
           py::arg("x"))
      .def("apply_block",
           py::overload_cast<const Eigen::MatrixXd&>(&SketchOperator::apply_block, py::const_),
           py::arg("X"))
      .def("materialize", &SketchOperator::materialize);

  m.def("required_sketch_dim",
        [](const std::string& kind, double eps, double delta, Index d, Index n) {
          return required_sketch_dim(parse_sketch_kind(kind), {eps, delta, d}, n);
        },
        py::arg("kind"), py::arg("epsilon"), py::arg("delta"), py::arg("d"), py::arg("n"));
  m.def("epsilon_of", &epsilon_of, py::arg("theta"), py::arg("V"));
  m.def("fwht", [](std::vector<double> v) { return fwht(std::move(v)); }, py::arg("v"));

  m.def("rgs_factorize",
        [](const Eigen::MatrixXd& W, const SketchOperator& theta, const std::string& policy,
           const std::string& solver, double breakdown_factor) {
          const RgsResult r =
              rgs_factorize(W, theta, make_options(policy, solver, breakdown_factor));
          py::dict d;
          d["Q"] = r.factors.q_double();
          d["R"] = r.factors.r;
          d["S"] = *r.factors.s;
          d["P"] = *r.factors.p;
          d["certificate"] = certificate_dict(r.certificate);
          return d;
        },
        py::arg("W"), py::arg("theta"), py::arg("policy") = "mixed",
        py::arg("solver") = "householder", py::arg("breakdown_factor") = 10.0);

  m.def("classical_factorize",
        [](const Eigen::MatrixXd& W, const std::string& variant, const std::string& policy,
           double breakdown_factor) {
          const QrFactors f = classical_factorize(
              W, parse_variant(variant), make_options(policy, "householder", breakdown_factor));
          return py::make_tuple(f.q_double(), f.r);
        },
        py::arg("W"), py::arg("variant"), py::arg("policy") = "mixed",
        py::arg("breakdown_factor") = 10.0);

  m.def("loss_of_orthogonality",
        py::overload_cast<const Eigen::MatrixXd&>(&loss_of_orthogonality), py::arg("Q"));
  m.def("omega_bar", &omega_bar, py::arg("v_theta"), py::arg("v_phi"), py::arg("eps_star") = 0.05);

  m.def("synthetic_matrix", &synthetic_matrix, py::arg("n"), py::arg("m"));
  m.def("laplacian_2d", [](Index grid) { return to_csr(laplacian_2d(grid)); }, py::arg("grid"));
  m.def("random_sparse",
        [](Index n, Index nnz, std::uint64_t seed) { return to_csr(random_sparse(n, nnz, seed)); },
        py::arg("n"), py::arg("nnz_per_row") = 5, py::arg("seed") = 1);
  m.def("read_matrix_market",
        [](const std::string& path) { return to_csr(read_matrix_market(std::filesystem::path(path))); },
        py::arg("path"));

  m.def("gmres",
        [](const std::vector<Index>& indptr, const std::vector<Index>& indices,
           const std::vector<double>& data, Index n, const Eigen::VectorXd& b, Index m,
           const std::string& variant, Index k, std::uint64_t seed, const std::string& policy,
           bool precond, double tol) {
          const SparseMatrix A = from_csr(indptr, indices, data, n);
          const GsVariant v = parse_variant(variant);
          std::optional<SketchOperator> theta;
          if (v == GsVariant::RGS) theta.emplace(SketchKind::PSRHT, k, n, seed);
          std::optional<Ilu0> ilu;
          std::optional<Preconditioner> pre;
          if (precond) {
            ilu.emplace(A);
            pre = Preconditioner::from_ilu(*ilu);
          }
          GmresOptions o;
          o.m = m;
          o.variant = v;
          o.gs.policy = parse_policy(policy);
          o.theta = theta ? &*theta : nullptr;
          o.precond = pre ? &*pre : nullptr;
          o.tol = tol;
          const GmresResult r = gmres(LinearOperator::from_sparse(A),
                                      std::span<const double>(b.data(), b.size()), o);
          py::dict d;
          d["x"] = r.x;
          d["residual_history"] = r.residual_history;
          d["true_final_residual"] = r.true_final_residual;
          d["iterations"] = r.iterations;
          d["breakdown"] = r.breakdown;
          return d;
        },
        py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("n"), py::arg("b"),
        py::arg("m") = 80, py::arg("variant") = "rgs", py::arg("k") = 400, py::arg("seed") = 1,
        py::arg("policy") = "f64", py::arg("precond") = false, py::arg("tol") = 0.0);

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
  m.def("num_threads", &num_threads);
}
