#include "polybddc/experiments.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace polybddc {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need two or more points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

double truncation_lambda_max(const HybridSpace& space, const BoundaryRegion& gamma, const HhalfGram& gram) {
  const Eigen::MatrixXd& h = gram.matrix;
  const Eigen::Index n = h.rows();
  const Eigen::RowVectorXd s = boundary_mean_vector(space, gamma);
  const Eigen::VectorXd one = boundary_constant_vector(space);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) - one * (s / gamma.measure);
  const Eigen::MatrixXd rp = truncation_matrix(space, gamma) * p;
  const Eigen::MatrixXd a = rp.transpose() * h * rp;
  const Eigen::MatrixXd b = h + s.transpose() * s;
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (b + b.transpose()));
  if (llt.info() != Eigen::Success) throw std::runtime_error("truncation_lambda_max: H + S^T S is not SPD");
  // L^{-1} A L^{-T}
  Eigen::MatrixXd c = llt.matrixL().solve(a);
  c = llt.matrixL().solve(c.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("truncation_lambda_max: eigensolve failed");
  return eig.eigenvalues().maxCoeff();
}

double truncation_lambda_max(const HybridSpace& space, const BoundaryRegion& gamma) {
  return truncation_lambda_max(space, gamma, hhalf_gram(space));
}

std::string gamma_name(unsigned sides) {
  if (sides == kTop) return "top";
  if (sides == (kTop | kRight)) return "top_right";
  if (sides == kAllSides) return "all";
  std::string out;
  const std::pair<unsigned, const char*> names[] = {{kBottom, "bottom"}, {kRight, "right"}, {kTop, "top"}, {kLeft, "left"}};
  for (const auto& [bit, name] : names) {
    if (sides & bit) out += (out.empty() ? "" : "+") + std::string(name);
  }
  return out;
}

unsigned gamma_from_string(const std::string& name) {
  if (name == "top") return kTop;
  if (name == "top_right" || name == "top+right") return kTop | kRight;
  if (name == "all" || name == "boundary") return kAllSides;
  unsigned sides = 0;
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part == "bottom") {
      sides |= kBottom;
    } else if (part == "right") {
      sides |= kRight;
    } else if (part == "top") {
      sides |= kTop;
    } else if (part == "left") {
      sides |= kLeft;
    } else {
      throw std::invalid_argument("unknown boundary part '" + part + "'");
    }
  }
  if (sides == 0) throw std::invalid_argument("empty boundary region");
  return sides;
}

StudyResult truncation_study(const std::vector<int>& n_list, const std::vector<int>& degrees, unsigned gamma_sides) {
  if (n_list.empty() || degrees.empty()) throw std::invalid_argument("truncation_study: empty grid");
  StudyResult result;
  for (int k : degrees) {
    std::vector<double> x;
    std::vector<double> y;
    const std::size_t first = result.rows.size();
    for (int n : n_list) {
      const PolytopalMesh mesh = build_cartesian(n, n);
      const HybridSpace space(mesh, k, k);
      const BoundaryRegion gamma = boundary_region(mesh, gamma_sides);
      StudyRow row;
      row.family = to_string(MeshFamily::cartesian);
      row.h = 1.0 / n;
      row.k = k;
      row.gamma = gamma_name(gamma_sides);
      row.lambda_max = truncation_lambda_max(space, gamma);
      x.push_back(std::abs(std::log(*row.h)));
      y.push_back(*row.lambda_max);
      result.rows.push_back(row);
    }
    if (x.size() >= 2) {
      const LinearFit fit = linear_fit(x, y);
      for (std::size_t i = first; i < result.rows.size(); ++i) {
        result.rows[i].fit_slope = fit.slope;
        result.rows[i].fit_r2 = fit.r2;
      }
    }
  }
  return result;
}

namespace {

std::vector<double> cell_means(const HybridVector& v) {
  const HybridSpace& space = *v.space;
  const auto& mesh = space.mesh();
  std::vector<double> means(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const QuadratureRule rule = cell_quadrature(mesh, c, space.cell_degree());
    const Eigen::VectorXd values = space.cell_basis(c).values(rule) * v.cell(c);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * values[static_cast<Eigen::Index>(q)];
    means[static_cast<std::size_t>(c)] = sum / mesh.cell(c).area;
  }
  return means;
}

double energy_error(const HybridSpace& space, const HybridVector& uh) {
  HybridVector diff = interpolate(space, manufactured_solution);
  diff.values -= uh.values;
  return h1_seminorm(space, diff);
}

}  // namespace

PoissonSolve solve_poisson(const PolytopalMesh& mesh, const MethodConfig& config, const CoarsePartition& partition,
                           const FgmresOptions& options) {
  const SkeletalDiscretization disc(mesh, config);
  const CondensedSystem sys = disc.assemble(manufactured_source);
  const BddcPreconditioner bddc(disc, partition);
  const auto apply_a = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return sys.matrix * x; };
  const auto apply_b = [&](const Eigen::VectorXd& x) { return bddc.apply(x); };
  const FgmresResult solved = fgmres(apply_a, apply_b, sys.rhs, options);
  const HybridVector uh = disc.recover(solved.solution, manufactured_source);

  PoissonSolve out;
  out.iterations = solved.stats.iterations;
  out.converged = solved.stats.converged;
  out.kappa = solved.stats.kappa;
  out.error_l2 = l2_error(uh, manufactured_solution);
  out.error_energy = energy_error(disc.space(), uh);
  out.cell_means = cell_means(uh);
  return out;
}

StudyResult scaling_study(const ScalingOptions& options) {
  StudyResult result;
  for (int k : options.degrees) {
    for (int ratio : options.h_ratios) {
      for (int side : options.np_sides) {
        if (ratio < 1 || side < 1) throw std::invalid_argument("scaling_study: H/h and N_p must be positive");
        const int n = side * ratio;
        const PolytopalMesh mesh = build_mesh(options.family, n, n);
        const CoarsePartition partition = agglomerate(mesh, side, side);
        const PoissonSolve solve = solve_poisson(mesh, MethodConfig(options.method, k), partition, options.solver);
        StudyRow row;
        row.family = to_string(options.family);
        row.h = 1.0 / n;
        row.k = k;
        row.method = to_string(options.method);
        row.np = side * side;
        row.h_ratio = ratio;
        row.iterations = solve.iterations;
        row.kappa = solve.kappa;
        row.error_l2 = solve.error_l2;
        row.error_energy = solve.error_energy;
        row.converged = solve.converged;
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

StudyResult convergence_study(Method method, MeshFamily family, int k, const std::vector<int>& n_list) {
  StudyResult result;
  for (int n : n_list) {
    const PolytopalMesh mesh = build_mesh(family, n, n);
    const SkeletalDiscretization disc(mesh, MethodConfig(method, k));
    const CondensedSystem sys = disc.assemble(manufactured_source);
    const HybridVector uh = disc.recover(solve_direct(sys), manufactured_source);
    StudyRow row;
    row.family = to_string(family);
    row.h = 1.0 / n;
    row.k = k;
    row.method = to_string(method);
    row.error_l2 = l2_error(uh, manufactured_solution);
    row.error_energy = energy_error(disc.space(), uh);
    if (!result.rows.empty()) {
      const StudyRow& prev = result.rows.back();
      const double ratio = std::log(*prev.h / *row.h);
      row.rate_l2 = std::log(*prev.error_l2 / *row.error_l2) / ratio;
      row.rate_energy = std::log(*prev.error_energy / *row.error_energy) / ratio;
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace polybddc
