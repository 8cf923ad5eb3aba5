#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "polybddc/krylov.hpp"

using namespace polybddc;

namespace {

Eigen::MatrixXd random_spd(int n, unsigned seed, double shift) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(gen);
  return g * g.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = nd(gen);
  return v;
}

LinearOperator dense_op(const Eigen::MatrixXd& m) {
  return [m](const Eigen::VectorXd& x) -> Eigen::VectorXd { return m * x; };
}

const LinearOperator identity = [](const Eigen::VectorXd& x) { return x; };

}  // namespace

TEST(Fgmres, IdentityConvergesInOneStep) {
  const Eigen::VectorXd b = random_vector(12, 1);
  const FgmresResult r = fgmres(identity, identity, b);
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 1);
  EXPECT_LT((r.solution - b).norm(), 1e-14 * b.norm());
  EXPECT_EQ(estimate_condition(r.stats), 1.0);
}

TEST(Fgmres, ExactInversePreconditionerConvergesInOneStep) {
  const Eigen::MatrixXd a = random_spd(10, 2, 0.5);
  const Eigen::MatrixXd inv = a.inverse();
  const Eigen::VectorXd b = random_vector(10, 3);
  const FgmresResult r = fgmres(dense_op(a), dense_op(inv), b);
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 1);
  EXPECT_LT((a * r.solution - b).norm(), 1e-10 * b.norm());
}

TEST(Fgmres, SolvesRandomSpdSystem) {
  const Eigen::MatrixXd a = random_spd(40, 4, 1.0);
  const Eigen::VectorXd b = random_vector(40, 5);
  const FgmresResult r = fgmres(dense_op(a), identity, b, {.tolerance = 1e-10, .max_iterations = 200});
  ASSERT_TRUE(r.stats.converged);
  const Eigen::VectorXd x = a.llt().solve(b);
  EXPECT_LT((r.solution - x).norm(), 1e-8 * x.norm() * a.norm() * a.inverse().norm());
  EXPECT_LE(r.stats.iterations, 40);
}

TEST(Fgmres, ResidualHistoryIsMonotoneAndMatchesTrueResidual) {
  const Eigen::MatrixXd a = random_spd(30, 6, 0.1);
  const Eigen::VectorXd b = random_vector(30, 7);
  const FgmresResult r = fgmres(dense_op(a), identity, b, {.tolerance = 1e-9, .max_iterations = 100});
  const auto& h = r.stats.residual_history;
  ASSERT_EQ(h.size(), static_cast<std::size_t>(r.stats.iterations + 1));
  EXPECT_DOUBLE_EQ(h.front(), 1.0);
  for (std::size_t j = 1; j < h.size(); ++j) EXPECT_LE(h[j], h[j - 1] * (1 + 1e-12));
  const double actual = (b - a * r.solution).norm() / b.norm();
  EXPECT_NEAR(actual, h.back(), 1e-8);
}

TEST(Fgmres, ReportsNonConvergence) {
  const Eigen::MatrixXd a = random_spd(50, 8, 0.01);
  const Eigen::VectorXd b = random_vector(50, 9);
  const FgmresResult r = fgmres(dense_op(a), identity, b, {.tolerance = 1e-14, .max_iterations = 3});
  EXPECT_FALSE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 3);
  EXPECT_GT(r.stats.residual_history.back(), 1e-14);
}

TEST(Fgmres, ZeroRightHandSide) {
  const FgmresResult r = fgmres(identity, identity, Eigen::VectorXd::Zero(5));
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.solution.norm(), 0.0);
}

TEST(Fgmres, ToleratesVariablePreconditioner) {
  const Eigen::MatrixXd a = random_spd(25, 10, 0.5);
  const Eigen::VectorXd b = random_vector(25, 11);
  int calls = 0;
  const Eigen::VectorXd d = a.diagonal().cwiseInverse();
  const LinearOperator varying = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    ++calls;
    return (1.0 + 0.3 * (calls % 3)) * d.cwiseProduct(x);
  };
  const FgmresResult r = fgmres(dense_op(a), varying, b, {.tolerance = 1e-10, .max_iterations = 100});
  ASSERT_TRUE(r.stats.converged);
  EXPECT_LT((a * r.solution - b).norm(), 1.01e-10 * b.norm());
}

TEST(ConditionEstimate, RecoversExtremeEigenvalues) {
  const int n = 60;
  Eigen::VectorXd lambda = Eigen::VectorXd::LinSpaced(n, 1.0, 4.0);
  const Eigen::MatrixXd q = random_spd(n, 12, 1.0).householderQr().householderQ();
  const Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
  const FgmresResult r =
      fgmres(dense_op(a), identity, Eigen::VectorXd::Ones(n), {.tolerance = 1e-12, .max_iterations = 200});
  ASSERT_TRUE(r.stats.converged);
  const double kappa = estimate_condition(r.stats);
  EXPECT_NEAR(kappa, 4.0, 0.05 * 4.0);
  EXPECT_LE(kappa, 4.0 * (1 + 1e-8));
  EXPECT_DOUBLE_EQ(r.stats.kappa, kappa);
}

TEST(ConditionEstimate, FewerThanTwoIterationsGivesOne) {
  KrylovStats stats;
  stats.iterations = 1;
  stats.ritz_values = {std::complex<double>(7.0, 0.0)};
  EXPECT_EQ(estimate_condition(stats), 1.0);
  stats.iterations = 2;
  stats.ritz_values = {{2.0, 0.0}, {-8.0, 0.0}};
  EXPECT_DOUBLE_EQ(estimate_condition(stats), 4.0);
}

TEST(Materialize, ReproducesMatrix) {
  const Eigen::MatrixXd a = random_spd(9, 13, 0.0);
  EXPECT_EQ((materialize(dense_op(a), 9) - a).cwiseAbs().maxCoeff(), 0.0);
}
