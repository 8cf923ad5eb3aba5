#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "polybddc/hybrid_space.hpp"

namespace polybddc {

/// Local matrix of |.|^2_{1,h} on cell c over HybridSpace::local_dofs(c):
/// ||grad v_t||^2 + sum_f h_t^{-1} ||v_f - v_t||^2_f.
Eigen::MatrixXd h1_local_matrix(const HybridSpace& space, int cell);

/// Global Gram matrix of |.|^2_{1,h} over all hybrid DOFs.
Eigen::SparseMatrix<double> h1_gram(const HybridSpace& space);

double h1_seminorm(const HybridSpace& space, const HybridVector& v);
/// |.|_{1,h,T}: sum restricted to the given cells.
double h1_seminorm(const HybridSpace& space, const HybridVector& v, std::span<const int> cells);

/// Gram matrix of the discrete H^{1/2}(dOmega) seminorm over the boundary space.
/// Face pairs are ordered: (f, f') and (f', f) both contribute.
struct HhalfGram {
  Eigen::MatrixXd matrix;
  std::vector<int> faces;  ///< boundary faces in boundary-space order
  std::size_t ordered_pairs = 0;
};

HhalfGram hhalf_gram(const HybridSpace& space);

double hhalf_seminorm(const HhalfGram& gram, const BoundaryFunction& w);
double hhalf_seminorm(const HybridSpace& space, const BoundaryFunction& w);

/// A portion of the boundary made of whole boundary faces.
struct BoundaryRegion {
  std::vector<int> faces;  ///< increasing, distinct
  double measure = 0.0;

  bool contains(int f) const;
};

enum BoxSide : unsigned { kBottom = 1u, kRight = 2u, kTop = 4u, kLeft = 8u, kAllSides = 15u };

/// Union of whole sides of the rectangular domain, selected by a BoxSide mask.
BoundaryRegion boundary_region(const PolytopalMesh& mesh, unsigned sides);
BoundaryRegion boundary_region(const PolytopalMesh& mesh, std::vector<int> faces);

/// Row vector with entries int_Gamma phi_a over the boundary space.
Eigen::RowVectorXd boundary_mean_vector(const HybridSpace& space, const BoundaryRegion& gamma);

/// Coefficients of the constant function 1 in the boundary space.
Eigen::VectorXd boundary_constant_vector(const HybridSpace& space);

/// Keeps the blocks of faces in Gamma and zeroes the others.
BoundaryFunction truncate(const HybridSpace& space, const BoundaryRegion& gamma, const BoundaryFunction& w);
/// R_Gamma as a 0/1 diagonal matrix.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> truncation_matrix(const HybridSpace& space,
                                                                const BoundaryRegion& gamma);

/// Extreme generalized Rayleigh quotients between the H^{1/2} form and the
/// minimal-extension H^1 form on the mean-free boundary space.
struct TraceLiftingConstants {
  double trace = 0.0;    ///< max |gamma v|^2_{1/2,h} / |v|^2_{1,h}
  double lifting = 0.0;  ///< max min{|v|^2_{1,h} : gamma v = w} / |w|^2_{1/2,h}
};

/// Schur complement of the |.|^2_{1,h} Gram matrix onto the boundary space.
Eigen::MatrixXd h1_boundary_schur(const HybridSpace& space);

TraceLiftingConstants trace_lifting_constants(const HybridSpace& space);

}  // namespace polybddc
