#include "polybddc/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace polybddc {

namespace {

/// Relative size below which a new Arnoldi vector counts as a breakdown.
constexpr double kBreakdown = 1e-14;

}  // namespace

FgmresResult fgmres(const LinearOperator& apply_a, const LinearOperator& apply_b, const Eigen::VectorXd& b,
                    const FgmresOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("fgmres: tolerance must be positive");
  if (options.max_iterations < 1) throw std::invalid_argument("fgmres: max_iterations must be positive");
  const Eigen::Index n = b.size();
  const double beta = b.norm();
  FgmresResult result;
  result.solution = Eigen::VectorXd::Zero(n);
  KrylovStats& stats = result.stats;
  stats.residual_history.push_back(1.0);
  if (beta == 0.0) {
    stats.converged = true;
    return result;
  }

  const int m_max = static_cast<int>(std::min<Eigen::Index>(options.max_iterations, n));
  std::vector<Eigen::VectorXd> v{b / beta};
  std::vector<Eigen::VectorXd> z;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m_max + 1, m_max);  // unrotated Hessenberg
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m_max + 1, m_max);  // rotated copy
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(m_max);
  Eigen::VectorXd sn = Eigen::VectorXd::Zero(m_max);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m_max + 1);
  g[0] = beta;

  auto project = [&](Eigen::VectorXd& w, Eigen::VectorXd& coeff) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) c[static_cast<Eigen::Index>(i)] = v[i].dot(w);
    for (std::size_t i = 0; i < v.size(); ++i) w -= c[static_cast<Eigen::Index>(i)] * v[i];
    coeff += c;
  };

  int m = 0;
  bool breakdown = false;
  while (m < m_max) {
    const int j = m;
    z.push_back(apply_b(v[static_cast<std::size_t>(j)]));
    Eigen::VectorXd w = apply_a(z.back());
    const double w_norm = w.norm();
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(j + 1);
    project(w, coeff);
    project(w, coeff);
    const double next = w.norm();
    h.col(j).head(j + 1) = coeff;
    h(j + 1, j) = next;

    r.col(j) = h.col(j);
    for (int i = 0; i < j; ++i) {
      const double a = r(i, j);
      const double c = r(i + 1, j);
      r(i, j) = cs[i] * a + sn[i] * c;
      r(i + 1, j) = -sn[i] * a + cs[i] * c;
    }
    const double rho = std::hypot(r(j, j), r(j + 1, j));
    cs[j] = rho == 0.0 ? 1.0 : r(j, j) / rho;
    sn[j] = rho == 0.0 ? 0.0 : r(j + 1, j) / rho;
    r(j, j) = rho;
    r(j + 1, j) = 0.0;
    g[j + 1] = -sn[j] * g[j];
    g[j] = cs[j] * g[j];
    ++m;

    const double rel = std::abs(g[j + 1]) / beta;
    stats.residual_history.push_back(rel);
    if (next <= kBreakdown * std::max(w_norm, beta)) {
      breakdown = true;
      break;
    }
    if (rel <= options.tolerance) break;
    v.push_back(w / next);
  }

  if (m > 0) {
    const Eigen::VectorXd y = r.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(g.head(m));
    for (int i = 0; i < m; ++i) result.solution += y[i] * z[static_cast<std::size_t>(i)];
  }
  stats.iterations = m;
  stats.converged = breakdown || stats.residual_history.back() <= options.tolerance;

  Eigen::EigenSolver<Eigen::MatrixXd> eig(h.topLeftCorner(m, m), false);
  if (eig.info() == Eigen::Success) {
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) stats.ritz_values.push_back(eig.eigenvalues()[i]);
  }
  stats.kappa = estimate_condition(stats);
  return result;
}

double estimate_condition(const KrylovStats& stats) {
  if (stats.iterations < 2 || stats.ritz_values.empty()) return 1.0;
  double lo = std::abs(stats.ritz_values.front());
  double hi = lo;
  for (const auto& value : stats.ritz_values) {
    lo = std::min(lo, std::abs(value));
    hi = std::max(hi, std::abs(value));
  }
  if (lo == 0.0) throw std::runtime_error("estimate_condition: zero Ritz value");
  return hi / lo;
}

Eigen::MatrixXd materialize(const LinearOperator& op, int n) {
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) out.col(j) = op(Eigen::VectorXd::Unit(n, j));
  return out;
}

}  // namespace polybddc
