#pragma once

#include <span>
#include <string>
#include <vector>

#include "polybddc/bddc.hpp"
#include "polybddc/csv.hpp"
#include "polybddc/krylov.hpp"
#include "polybddc/seminorms.hpp"
#include "polybddc/skeletal.hpp"

namespace polybddc {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line y = intercept + slope x. Needs at least two distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct StudyResult {
  std::vector<StudyRow> rows;
};

/// Largest eigenvalue of the pencil (P^T R H R P, H + S^T S), where H is the
/// discrete H^{1/2} Gram matrix, S the row of int_Gamma, R the truncation to
/// Gamma and P = I - 1 S / |Gamma| removes the Gamma-mean.
double truncation_lambda_max(const HybridSpace& space, const BoundaryRegion& gamma, const HhalfGram& gram);
double truncation_lambda_max(const HybridSpace& space, const BoundaryRegion& gamma);

/// Cartesian n x n meshes of the unit square for each n and degree k; Gamma is
/// a BoxSide mask. Rows carry h = 1/n and the fit of lambda_max against |ln h|
/// over the n list (per k).
StudyResult truncation_study(const std::vector<int>& n_list, const std::vector<int>& degrees, unsigned gamma_sides);

std::string gamma_name(unsigned sides);
/// "top", "top_right", "all", or a '+'-separated list of bottom/right/top/left.
unsigned gamma_from_string(const std::string& name);

/// Outcome of one FGMRES + BDDC solve of the manufactured problem.
struct PoissonSolve {
  int iterations = 0;
  bool converged = false;
  double kappa = 1.0;
  double error_l2 = 0.0;
  double error_energy = 0.0;
  std::vector<double> cell_means;
};

PoissonSolve solve_poisson(const PolytopalMesh& mesh, const MethodConfig& config, const CoarsePartition& partition,
                           const FgmresOptions& options = {});

struct ScalingOptions {
  Method method = Method::hho;
  MeshFamily family = MeshFamily::simplicial;
  std::vector<int> h_ratios{8};    ///< H/h: fine cells per subdomain side
  std::vector<int> np_sides{2, 4, 8};  ///< subdomains per side; N_p = side^2
  std::vector<int> degrees{1};
  FgmresOptions solver;
};

/// One row per (k, H/h, N_p) in that nesting order.
StudyResult scaling_study(const ScalingOptions& options);

/// Direct solves on n x n meshes; rows carry L2 and energy errors and the
/// observed rates against the previous row.
StudyResult convergence_study(Method method, MeshFamily family, int k, const std::vector<int>& n_list);

}  // namespace polybddc
