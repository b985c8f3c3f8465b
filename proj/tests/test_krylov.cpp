#include <gtest/gtest.h>

#include <cmath>

#include "rgs/io.hpp"
#include "rgs/krylov.hpp"
#include "rgs/linalg.hpp"
#include "support.hpp"

using namespace rgs;

namespace {

GsOptions f64() {
  GsOptions o;
  o.policy = PrecisionPolicy::unified64();
  return o;
}

Eigen::VectorXd solve_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  return A.partialPivLu().solve(b);
}

}  // namespace

TEST(Operator, FromSparseAndDense) {
  const SparseMatrix S = random_sparse(30, 3, 1);
  const Eigen::MatrixXd D = S.to_dense();
  const LinearOperator a = LinearOperator::from_sparse(S);
  const LinearOperator d = LinearOperator::from_dense(D);
  const Eigen::VectorXd x = test::gaussian_vector(30, 2);
  EXPECT_LE((a * x - D * x).norm(), 1e-14 * x.norm());
  EXPECT_LE((d * x - D * x).norm(), 1e-14 * x.norm());
  const double nrm = estimate_norm(a, 200);
  const double exact = linalg::singular_values(D)[0];
  EXPECT_LE(nrm, exact * (1 + 1e-12));
  EXPECT_GE(nrm, 0.9 * exact);
}

TEST(Arnoldi, IdentityBreaksDownAtSecondColumn) {
  const Eigen::VectorXd b = test::gaussian_vector(20, 3);
  const auto A = LinearOperator::from_dense(Eigen::MatrixXd::Identity(20, 20));
  for (GsVariant v : {GsVariant::CGS, GsVariant::MGS, GsVariant::CGS2}) {
    const ArnoldiDecomposition d = arnoldi(A, std::span<const double>(b.data(), 20), 5, v, nullptr);
    ASSERT_TRUE(d.breakdown_at.has_value());
    EXPECT_EQ(*d.breakdown_at, 2);
    EXPECT_EQ(d.q.cols(), 1);
    EXPECT_NEAR(d.h(0, 0), 1.0, 1e-6);
  }
  const SketchOperator theta(SketchKind::PSRHT, 10, 20, 4);
  const auto d = arnoldi(A, std::span<const double>(b.data(), 20), 5, GsVariant::RGS, &theta);
  ASSERT_TRUE(d.breakdown_at.has_value());
  EXPECT_EQ(*d.breakdown_at, 2);
}

TEST(Arnoldi, DiagonalTwoByTwo) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  const Eigen::Vector2d b(1, 1);
  for (GsVariant v : {GsVariant::CGS, GsVariant::MGS}) {
    const auto d = arnoldi(LinearOperator::from_dense(D), std::span<const double>(b.data(), 2), 2, v,
                           nullptr, f64());
    EXPECT_FALSE(d.breakdown_at.has_value());
    ASSERT_EQ(d.h.rows(), 2);
    ASSERT_EQ(d.h.cols(), 1);
    EXPECT_NEAR(d.h(0, 0), 1.5, 1e-15);
    EXPECT_NEAR(d.h(1, 0), 0.5, 1e-15);
    EXPECT_NEAR(d.r11, std::sqrt(2.0), 1e-15);
  }
}

TEST(Arnoldi, Relation) {
  const Index n = 400, m = 30;
  const SparseMatrix S = random_sparse(n, 6, 5);
  const auto A = LinearOperator::from_sparse(S);
  const Eigen::VectorXd b = test::gaussian_vector(n, 6);
  const SketchOperator theta(SketchKind::PSRHT, 120, n, 7);
  for (auto p : {PrecisionPolicy::mixed(), PrecisionPolicy::unified64()}) {
    GsOptions o;
    o.policy = p;
    const auto d = arnoldi(A, std::span<const double>(b.data(), n), m, GsVariant::RGS, &theta, o);
    ASSERT_FALSE(d.breakdown_at.has_value());
    Eigen::MatrixXd AQ(n, m - 1);
    for (Index j = 0; j < m - 1; ++j) AQ.col(j) = A * Eigen::VectorXd(d.q.col(j));
    const double rel = (AQ - d.q * d.h).norm() / (S.frobenius_norm() * d.q.norm());
    EXPECT_LE(rel, 10 * p.u_crs() * m) << policy_name(p);
    EXPECT_NEAR(d.r11, theta.apply(b).norm(), 1e-12 * b.norm());
  }
}

TEST(Gmres, IdentityConvergesInOneIteration) {
  const Index n = 30;
  const Eigen::VectorXd b = test::gaussian_vector(n, 8);
  GmresOptions o;
  o.variant = GsVariant::MGS;
  o.gs = f64();
  o.m = 10;
  const auto r = gmres(LinearOperator::from_dense(Eigen::MatrixXd::Identity(n, n)),
                       std::span<const double>(b.data(), n), o);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_TRUE(r.breakdown);
  EXPECT_LE((r.x - b).norm(), 1e-14 * b.norm());
  EXPECT_LE(r.true_final_residual, 1e-14 * b.norm());
}

TEST(Gmres, FullSpaceMatchesLu) {
  const Index n = 10;
  Eigen::MatrixXd A = test::gaussian(n, n, 9);
  A.diagonal().array() += 3.0;
  const Eigen::VectorXd b = test::gaussian_vector(n, 10);
  const Eigen::VectorXd x = solve_dense(A, b);
  for (GsVariant v : {GsVariant::CGS2, GsVariant::MGS, GsVariant::RGS}) {
    const SketchOperator theta(SketchKind::PSRHT, 16, n, 11);
    GmresOptions o;
    o.variant = v;
    o.gs = f64();
    o.theta = &theta;
    o.m = n + 1;
    const auto r = gmres(LinearOperator::from_dense(A), std::span<const double>(b.data(), n), o);
    EXPECT_LE((r.x - x).norm(), 1e-9 * x.norm()) << variant_name(v);
    EXPECT_LE(r.true_final_residual, 1e-10 * b.norm()) << variant_name(v);
  }
}

TEST(Gmres, ExactPreconditioner) {
  const Index n = 25;
  Eigen::MatrixXd A = test::gaussian(n, n, 12);
  A.diagonal().array() += 6.0;
  const Eigen::VectorXd b = test::gaussian_vector(n, 13);
  const Preconditioner M = Preconditioner::from_dense_lu(A);
  GmresOptions o;
  o.variant = GsVariant::MGS;
  o.gs = f64();
  o.precond = &M;
  o.m = 8;
  const auto r = gmres(LinearOperator::from_dense(A), std::span<const double>(b.data(), n), o);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE((r.x - solve_dense(A, b)).norm(), 1e-12 * r.x.norm());
}

TEST(Gmres, IluPreconditionerHelps) {
  const SparseMatrix S = laplacian_2d(20);
  const Index n = S.n();
  const Eigen::VectorXd b = S * Eigen::VectorXd::Ones(n);
  const Ilu0 ilu(S);
  const Preconditioner M = Preconditioner::from_ilu(ilu);
  GmresOptions o;
  o.variant = GsVariant::MGS;
  o.gs = f64();
  o.m = 40;
  const auto plain = gmres(LinearOperator::from_sparse(S), std::span<const double>(b.data(), n), o);
  o.precond = &M;
  const auto pre = gmres(LinearOperator::from_sparse(S), std::span<const double>(b.data(), n), o);
  EXPECT_LT(pre.true_final_residual, 1e-2 * plain.true_final_residual);
}

TEST(Gmres, ResidualEstimatesMatchTrueResidual) {
  const Index n = 300;
  const SparseMatrix S = random_sparse(n, 5, 14);
  const Eigen::VectorXd b = test::gaussian_vector(n, 15);
  GmresOptions o;
  o.variant = GsVariant::MGS;
  o.gs = f64();
  o.m = 25;
  const auto r = gmres(LinearOperator::from_sparse(S), std::span<const double>(b.data(), n), o);
  ASSERT_EQ(static_cast<Index>(r.residual_history.size()), r.iterations);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] * (1 + 1e-12));
  EXPECT_NEAR(r.residual_history.back(), r.true_final_residual, 1e-8 * b.norm());
}

TEST(Gmres, QuasiOptimalWithRgs) {
  const Index n = 2000, m = 40;
  const SparseMatrix S = random_sparse(n, 8, 16);
  const auto A = LinearOperator::from_sparse(S);
  const Eigen::VectorXd b = test::gaussian_vector(n, 17);
  const SketchOperator theta(SketchKind::PSRHT, 1200, n, 18);
  GmresOptions o;
  o.variant = GsVariant::RGS;
  o.theta = &theta;
  o.gs = f64();
  o.m = m;
  o.diagnostics = true;
  const auto r = gmres(A, std::span<const double>(b.data(), n), o);
  ASSERT_FALSE(r.breakdown);
  const double omega = epsilon_of(theta, r.q);
  ASSERT_LT(omega, 0.5);
  const double best =
      best_attainable_residual(A, r.q.leftCols(r.iterations), std::span<const double>(b.data(), n));
  EXPECT_LE(r.true_final_residual, std::sqrt((1 + omega) / (1 - omega)) * best * (1 + 1e-8));
  EXPECT_EQ(static_cast<Index>(r.records.size()), m);
}

TEST(Gmres, RgsWithinFactorOfMgs) {
  const Index n = 1500;
  const SparseMatrix S = random_sparse(n, 6, 19);
  const auto A = LinearOperator::from_sparse(S);
  const Eigen::VectorXd b = test::gaussian_vector(n, 20);
  const SketchOperator theta(SketchKind::PSRHT, 300, n, 21);
  GmresOptions o;
  o.m = 30;
  o.variant = GsVariant::MGS;
  const auto mgs = gmres(A, std::span<const double>(b.data(), n), o);
  o.variant = GsVariant::RGS;
  o.theta = &theta;
  const auto rgs = gmres(A, std::span<const double>(b.data(), n), o);
  EXPECT_LE(rgs.true_final_residual, 10 * mgs.true_final_residual);
}

TEST(Gmres, Errors) {
  const auto A = LinearOperator::from_dense(Eigen::MatrixXd::Identity(4, 4));
  const std::vector<double> b(4, 1.0), bad(3, 1.0);
  GmresOptions o;
  o.variant = GsVariant::MGS;
  o.m = 1;
  EXPECT_THROW(gmres(A, b, o), InvalidArgument);
  o.m = 6;
  EXPECT_THROW(gmres(A, b, o), InvalidArgument);
  o.m = 3;
  EXPECT_THROW(gmres(A, bad, o), DimensionError);
  o.variant = GsVariant::RGS;
  EXPECT_THROW(gmres(A, b, o), InvalidArgument);
  const auto z = gmres(A, std::vector<double>(4, 0.0), GmresOptions{.m = 3, .variant = GsVariant::MGS});
  EXPECT_EQ(z.x, Eigen::VectorXd::Zero(4));
}

TEST(BestAttainable, Cases) {
  const Index n = 12;
  const Eigen::MatrixXd D = test::gaussian(n, n, 22) + 5 * Eigen::MatrixXd::Identity(n, n);
  const auto A = LinearOperator::from_dense(D);
  const Eigen::VectorXd b = test::gaussian_vector(n, 23);
  EXPECT_NEAR(best_attainable_residual(A, Eigen::MatrixXd(n, 0), std::span<const double>(b.data(), n)),
              b.norm(), 1e-15);
  EXPECT_LE(best_attainable_residual(A, Eigen::MatrixXd::Identity(n, n), std::span<const double>(b.data(), n)),
            1e-12 * b.norm());
  const Eigen::VectorXd q = test::gaussian_vector(n, 24);
  const Eigen::VectorXd aq = D * q;
  const double c = aq.dot(b) / aq.squaredNorm();
  EXPECT_NEAR(best_attainable_residual(A, q, std::span<const double>(b.data(), n)), (b - c * aq).norm(), 1e-12);
  Eigen::MatrixXd Q2(n, 2);
  Q2 << q, q;
  EXPECT_THROW(best_attainable_residual(A, Q2, std::span<const double>(b.data(), n)), RankDeficientError);
}
