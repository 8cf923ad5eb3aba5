#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "polybddc/hybrid_space.hpp"

namespace polybddc {

enum class Method { hdg, hdg_plus, hho, hho_mixed };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

/// Face degree k plus the cell degree and penalty implied by the method.
struct MethodConfig {
  Method method = Method::hho;
  int face_degree = 0;

  MethodConfig() = default;
  MethodConfig(Method m, int k);

  /// k for HDG and HHO, k + 1 for HDG+ and mixed-order HHO.
  int cell_degree() const;
  /// tau_t: 1 for HDG, 1/h_t for HDG+ (unused by the HHO variants).
  double penalty(const Cell& cell) const;
  bool is_hdg_family() const { return method == Method::hdg || method == Method::hdg_plus; }
};

/// Symmetric local system of one cell before condensation. Unknowns are
/// ordered [internal | faces]; internal holds (q_x, q_y, u_t) for the HDG
/// family and u_t for the HHO family. The cell load int_t f phi enters the
/// u_t rows.
struct LocalElement {
  Eigen::MatrixXd matrix;
  int num_internal = 0;
  int num_flux = 0;       ///< leading internal rows holding q (HDG family only)
  int cell_begin = 0;     ///< first internal row of u_t
  int num_cell = 0;
  int num_face_dofs = 0;  ///< sum over faces of the face block
  /// Maps [internal | faces] to the flux coefficients (q for the HDG family,
  /// the potential reconstruction in P_{k+1} for the HHO family).
  Eigen::MatrixXd flux_operator;
};

/// Maps produced by eliminating the internal unknowns of one cell.
struct LocalCondensation {
  Eigen::MatrixXd face_matrix;  ///< a_t over the faces of t (loop order)
  Eigen::MatrixXd face_to_cell;  ///< U_t: face data -> u_t (f = 0)
  Eigen::MatrixXd load_to_cell;  ///< V_t: load moments int_t f phi -> u_t (face data = 0)
  Eigen::MatrixXd face_to_flux;  ///< see LocalElement::flux_operator
  Eigen::MatrixXd load_to_flux;
};

/// Condensed skeleton system over the non-Dirichlet faces.
struct CondensedSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<int> face_offset;  ///< per mesh face: offset in the system, -1 on the Dirichlet boundary
  int face_block = 0;

  int size() const { return static_cast<int>(rhs.size()); }
};

/// HHO potential reconstruction on one cell: p = R [u_t; u_dt] in P_{k+1}.
struct HhoReconstruction {
  CellBasis potential_basis;
  Eigen::MatrixXd operator_matrix;  ///< dim P_{k+1} x local DOFs
  Eigen::MatrixXd stiffness;        ///< int grad(Phi_i) . grad(Phi_j)
};

HhoReconstruction hho_reconstruction(const HybridSpace& space, int cell);

/// Stabilisation bilinear form of the method over HybridSpace::local_dofs(c):
/// s(u, v) = u^T S v.
Eigen::MatrixXd stabilisation_matrix(const MethodConfig& config, const HybridSpace& space, int cell);

LocalElement local_element(const MethodConfig& config, const HybridSpace& space, int cell);

/// Eliminates the internal unknowns with a dense factorisation. Throws
/// std::runtime_error if the internal block is singular.
LocalCondensation condense(const LocalElement& element);

/// Cell load moments int_t f phi_i.
Eigen::VectorXd cell_load(const HybridSpace& space, int cell, const ScalarFunction& f);

/// Skeletal discretisation of -Laplace(u) = f with homogeneous Dirichlet data.
class SkeletalDiscretization {
 public:
  SkeletalDiscretization(const PolytopalMesh& mesh, const MethodConfig& config);

  const MethodConfig& config() const { return config_; }
  const HybridSpace& space() const { return space_; }
  const PolytopalMesh& mesh() const { return space_.mesh(); }
  const LocalCondensation& local(int cell) const { return local_[static_cast<std::size_t>(cell)]; }

  /// Offset of each face in the condensed numbering (-1 for Dirichlet faces).
  const std::vector<int>& face_offset() const { return face_offset_; }
  int num_skeleton_dofs() const { return num_skeleton_dofs_; }

  /// Global condensed matrix sum_t a_t and load int f U mu. Throws if the
  /// assembled matrix is not symmetric.
  CondensedSystem assemble(const ScalarFunction& f) const;
  CondensedSystem assemble_matrix() const;

  /// u_t = U u_dt + V f; face blocks copied from the skeleton (zero on the boundary).
  HybridVector recover(const Eigen::VectorXd& skeleton, const ScalarFunction& f) const;

  /// Local solve on one cell: (u_t, flux) for face data given in loop order.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> local_solve(int cell, const Eigen::VectorXd& face_data,
                                                          const ScalarFunction& f) const;

 private:
  MethodConfig config_;
  HybridSpace space_;
  std::vector<LocalCondensation> local_;
  std::vector<int> face_offset_;
  int num_skeleton_dofs_ = 0;
};

CondensedSystem assemble_condensed(const SkeletalDiscretization& disc, const ScalarFunction& f);
HybridVector recover_bulk(const SkeletalDiscretization& disc, const Eigen::VectorXd& skeleton,
                          const ScalarFunction& f);

/// Direct sparse solve of the condensed system.
Eigen::VectorXd solve_direct(const CondensedSystem& system);

/// sqrt(sum_t ||u_t - u||^2_{L2(t)}).
double l2_error(const HybridVector& v, const ScalarFunction& exact);

/// Manufactured solution sin(2 pi x) sin(2 pi y) x (x-1) y (y-1) and its source -Laplace(u).
double manufactured_solution(const Point& x);
double manufactured_source(const Point& x);

}  // namespace polybddc
