#pragma once

#include <functional>

#include <Eigen/Dense>

#include "polybddc/mesh.hpp"
#include "polybddc/quadrature.hpp"

namespace polybddc {

using ScalarFunction = std::function<double(const Point&)>;

/// Dimension of P_k in two variables.
constexpr int cell_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }
/// Dimension of P_k on a segment.
constexpr int face_dim(int degree) { return degree + 1; }

/// Scaled monomials ((x - x_t)/h_t)^a ((y - y_t)/h_t)^b, a + b <= k, ordered by
/// total degree. An optional lower-triangular change of basis keeps the
/// hierarchy: the first cell_dim(j) functions always span P_j.
class CellBasis {
 public:
  CellBasis(Point center, double scale, int degree);

  int degree() const { return degree_; }
  int dim() const { return cell_dim(degree_); }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }

  Eigen::VectorXd value(const Point& x) const;
  /// dim x 2
  Eigen::MatrixXd gradient(const Point& x) const;

  /// Row q holds the basis values at rule.points[q].
  Eigen::MatrixXd values(const QuadratureRule& rule) const;
  Eigen::MatrixXd values(std::span<const Point> points) const;
  /// Derivative in direction `axis` (0 = x, 1 = y) at the quadrature points.
  Eigen::MatrixXd derivatives(const QuadratureRule& rule, int axis) const;

  /// Coefficients representing the constant function 1.
  Eigen::VectorXd constant_coefficients() const;

  /// Replaces the basis by L^{-1} phi where mass = L L^T.
  void orthonormalize(const Eigen::MatrixXd& mass);
  bool orthonormalized() const { return transform_.size() > 0; }

 private:
  Eigen::VectorXd raw_value(const Point& x) const;
  Eigen::MatrixXd raw_gradient(const Point& x) const;

  Point center_;
  double scale_;
  int degree_;
  Eigen::MatrixXd transform_;
};

/// Powers of s = (x - x_f) . tau_f / h_f along a face.
class FaceBasis {
 public:
  FaceBasis(Point center, Point tangent, double scale, int degree);

  int degree() const { return degree_; }
  int dim() const { return face_dim(degree_); }

  Eigen::VectorXd value(const Point& x) const;
  Eigen::MatrixXd values(const QuadratureRule& rule) const;
  Eigen::VectorXd constant_coefficients() const;

  void orthonormalize(const Eigen::MatrixXd& mass);

 private:
  Point center_;
  Point tangent_;
  double scale_;
  int degree_;
  Eigen::MatrixXd transform_;
};

/// Mass matrices above this condition number trigger orthonormalisation.
inline constexpr double kOrthonormalizeThreshold = 1e8;

CellBasis make_cell_basis(const PolytopalMesh& mesh, int cell, int degree);
FaceBasis make_face_basis(const PolytopalMesh& mesh, int face, int degree);

/// A^T diag(w) B for values tabulated at the quadrature points.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const QuadratureRule& rule);

Eigen::MatrixXd mass_matrix(const CellBasis& basis, const QuadratureRule& rule);
Eigen::MatrixXd mass_matrix(const FaceBasis& basis, const QuadratureRule& rule);

/// Ratio of extreme eigenvalues of a symmetric matrix. Throws std::runtime_error
/// if the matrix is numerically singular (min eig < 1e-14 max eig).
double spd_condition_number(const Eigen::MatrixXd& mass);

/// Stiffness matrix int grad(phi_i) . grad(phi_j).
Eigen::MatrixXd stiffness_matrix(const CellBasis& basis, const QuadratureRule& rule);

/// L2 projection of a function: solves M c = b with b_i = int phi_i g.
Eigen::VectorXd l2_project(const CellBasis& basis, const QuadratureRule& rule, const ScalarFunction& g);
Eigen::VectorXd l2_project(const FaceBasis& basis, const QuadratureRule& rule, const ScalarFunction& g);

/// L2 projection of tabulated values (one per quadrature point).
Eigen::VectorXd l2_project_values(const Eigen::MatrixXd& basis_values, const QuadratureRule& rule,
                                  const Eigen::VectorXd& g_values);

}  // namespace polybddc
