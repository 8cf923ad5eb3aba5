#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace polybddc {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct KrylovStats {
  int iterations = 0;
  bool converged = false;
  /// ||b - A x_j|| / ||b|| from the least-squares residual, starting with 1 at j = 0.
  std::vector<double> residual_history;
  /// Eigenvalues of the square Hessenberg matrix H_m.
  std::vector<std::complex<double>> ritz_values;
  double kappa = 1.0;
};

struct FgmresOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
};

struct FgmresResult {
  Eigen::VectorXd solution;
  KrylovStats stats;
};

/// Right-preconditioned flexible GMRES without restarts, starting from x = 0.
/// Arnoldi uses classical Gram-Schmidt with one re-orthogonalisation pass.
/// Non-convergence is reported through stats.converged.
FgmresResult fgmres(const LinearOperator& apply_a, const LinearOperator& apply_b, const Eigen::VectorXd& b,
                    const FgmresOptions& options = {});

/// max |Ritz| / min |Ritz|; 1 when fewer than two iterations were performed.
/// A lower bound of the condition number of the preconditioned operator.
double estimate_condition(const KrylovStats& stats);

/// Dense matrix of a linear operator of size n, built column by column.
Eigen::MatrixXd materialize(const LinearOperator& op, int n);

}  // namespace polybddc
