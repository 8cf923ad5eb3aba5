#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "polybddc/skeletal.hpp"

namespace polybddc {

/// Restriction of the condensed skeleton system to one subdomain T.
/// Local DOFs are ordered [interior I | interface Gamma].
struct SubdomainOperator {
  std::vector<int> interior_dofs;   ///< global condensed indices
  std::vector<int> interface_dofs;  ///< global condensed indices
  Eigen::SparseMatrix<double> matrix;  ///< A_T = sum over cells of T of a_t
  std::vector<int> coarse_faces;       ///< global coarse face ids, one constraint row each
  Eigen::SparseMatrix<double> constraints;  ///< C_T: (C_T w)_F = int_F w

  int num_interior() const { return static_cast<int>(interior_dofs.size()); }
  int num_interface() const { return static_cast<int>(interface_dofs.size()); }
  int size() const { return num_interior() + num_interface(); }
};

/// Two-level BDDC preconditioner with coarse-face mean constraints and
/// flat 1/2 interface weights, acting on the condensed skeleton system.
class BddcPreconditioner {
 public:
  BddcPreconditioner(const SkeletalDiscretization& disc, const CoarsePartition& partition);
  ~BddcPreconditioner();
  BddcPreconditioner(BddcPreconditioner&&) noexcept;
  BddcPreconditioner& operator=(BddcPreconditioner&&) noexcept;

  int size() const { return size_; }
  int num_subdomains() const { return static_cast<int>(subdomains_.size()); }
  int num_coarse_dofs() const { return num_coarse_; }
  const SubdomainOperator& subdomain(int t) const { return subdomains_[static_cast<std::size_t>(t)]; }
  /// Assembled coarse matrix S_c (one unknown per coarse face).
  const Eigen::MatrixXd& coarse_matrix() const { return coarse_matrix_; }
  /// The condensed matrix A_h the preconditioner was built for.
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  /// z = B r.
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

  /// Local vector [I | Gamma] of T with Gamma values g and A_T,II v_I = -A_T,IGamma g.
  Eigen::VectorXd harmonic_extension(int t, const Eigen::VectorXd& interface_values) const;

  /// Averages duplicated interface values: input holds one interface block per
  /// subdomain (in subdomain order), output is a conforming global vector on
  /// the interface DOFs (zero elsewhere).
  Eigen::VectorXd weighting_apply(const std::vector<Eigen::VectorXd>& subassembled) const;

  /// Weight of interface DOF i of subdomain t (1/2 on every shared DOF).
  double weight(int t, int i) const;

 private:
  struct Factors;

  int size_ = 0;
  int num_coarse_ = 0;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<SubdomainOperator> subdomains_;
  std::vector<int> multiplicity_;  ///< per global DOF: number of subdomains sharing it
  Eigen::MatrixXd coarse_matrix_;
  std::unique_ptr<Factors> factors_;
};

/// Dense B A, materialized column by column (small problems only).
Eigen::MatrixXd preconditioned_operator(const BddcPreconditioner& bddc);

/// Eigenvalues of B A, ascending, computed as the spectrum of L^T B L with A = L L^T.
Eigen::VectorXd preconditioned_spectrum(const BddcPreconditioner& bddc);

}  // namespace polybddc
