#include "polybddc/bddc.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "polybddc/parallel.hpp"

namespace polybddc {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct BddcPreconditioner::Factors {
  struct Local {
    Eigen::SimplicialLDLT<SparseMatrix> interior;  ///< A_T,II
    SparseMatrix interior_interface;                ///< A_T,IGamma
    Eigen::SparseLU<SparseMatrix> saddle;           ///< [A_T C_T^T; C_T 0]
    Eigen::MatrixXd coarse_basis;                   ///< Psi_T
  };
  std::vector<std::unique_ptr<Local>> local;
  Eigen::LLT<Eigen::MatrixXd> coarse;
};

BddcPreconditioner::~BddcPreconditioner() = default;
BddcPreconditioner::BddcPreconditioner(BddcPreconditioner&&) noexcept = default;
BddcPreconditioner& BddcPreconditioner::operator=(BddcPreconditioner&&) noexcept = default;

namespace {

/// Local DOF start of every face of T, -1 for Dirichlet faces. Interior faces
/// are numbered before interface faces.
std::vector<int> local_face_starts(const SkeletalDiscretization& disc, const CoarsePartition& partition,
                                   const Subdomain& sd, SubdomainOperator& op) {
  const int nb = disc.space().face_block();
  std::vector<int> start(sd.faces.size(), -1);
  int next = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < sd.faces.size(); ++i) {
      const int f = sd.faces[i];
      const int offset = disc.face_offset()[static_cast<std::size_t>(f)];
      if (offset < 0) continue;
      const bool interface = partition.coarse_face_of(f) >= 0;
      if (interface != (pass == 1)) continue;
      start[i] = next;
      auto& dofs = interface ? op.interface_dofs : op.interior_dofs;
      for (int a = 0; a < nb; ++a) dofs.push_back(offset + a);
      next += nb;
    }
  }
  return start;
}

int position(const std::vector<int>& sorted, int value) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  if (it == sorted.end() || *it != value) throw std::logic_error("bddc: face not in subdomain");
  return static_cast<int>(it - sorted.begin());
}

}  // namespace

BddcPreconditioner::BddcPreconditioner(const SkeletalDiscretization& disc, const CoarsePartition& partition)
    : factors_(std::make_unique<Factors>()) {
  const auto& mesh = disc.mesh();
  if (static_cast<int>(partition.subdomain_of_cell().size()) != mesh.num_cells()) {
    throw std::invalid_argument("BddcPreconditioner: partition does not match the mesh");
  }
  const int nb = disc.space().face_block();
  matrix_ = disc.assemble_matrix().matrix;
  size_ = static_cast<int>(matrix_.rows());
  num_coarse_ = static_cast<int>(partition.coarse_faces().size());
  const int np = partition.num_subdomains();
  subdomains_.resize(static_cast<std::size_t>(np));
  factors_->local.resize(static_cast<std::size_t>(np));
  for (auto& l : factors_->local) l = std::make_unique<Factors::Local>();

  // int_f psi_a for every face basis function
  std::vector<Eigen::VectorXd> face_integrals(static_cast<std::size_t>(mesh.num_faces()));
  for (const CoarseFace& cf : partition.coarse_faces()) {
    for (int f : cf.fine_faces) {
      const FaceBasis& basis = disc.space().face_basis(f);
      face_integrals[static_cast<std::size_t>(f)] =
          mass_matrix(basis, face_quadrature(mesh, f, 2 * basis.degree())) * basis.constant_coefficients();
    }
  }

  parallel_for(np, [&](int t) {
    const Subdomain& sd = partition.subdomain(t);
    SubdomainOperator& op = subdomains_[static_cast<std::size_t>(t)];
    Factors::Local& fac = *factors_->local[static_cast<std::size_t>(t)];
    const std::vector<int> start = local_face_starts(disc, partition, sd, op);
    const int n = op.size();
    const int ni = op.num_interior();

    std::vector<Eigen::Triplet<double>> triplets;
    for (int c : sd.cells) {
      const auto& faces = mesh.cell(c).faces;
      const Eigen::MatrixXd& a = disc.local(c).face_matrix;
      for (std::size_t i = 0; i < faces.size(); ++i) {
        const int si = start[static_cast<std::size_t>(position(sd.faces, faces[i]))];
        if (si < 0) continue;
        for (std::size_t j = 0; j < faces.size(); ++j) {
          const int sj = start[static_cast<std::size_t>(position(sd.faces, faces[j]))];
          if (sj < 0) continue;
          for (int p = 0; p < nb; ++p) {
            for (int q = 0; q < nb; ++q) {
              triplets.emplace_back(si + p, sj + q,
                                    a(static_cast<Eigen::Index>(i) * nb + p, static_cast<Eigen::Index>(j) * nb + q));
            }
          }
        }
      }
    }
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());

    op.coarse_faces = sd.coarse_faces;
    const int nc = static_cast<int>(op.coarse_faces.size());
    std::vector<Eigen::Triplet<double>> ctrip;
    for (int j = 0; j < nc; ++j) {
      for (int f : partition.coarse_faces()[static_cast<std::size_t>(op.coarse_faces[static_cast<std::size_t>(j)])].fine_faces) {
        const int s = start[static_cast<std::size_t>(position(sd.faces, f))];
        const Eigen::VectorXd& w = face_integrals[static_cast<std::size_t>(f)];
        for (int a = 0; a < nb; ++a) ctrip.emplace_back(j, s + a, w[a]);
      }
    }
    op.constraints.resize(nc, n);
    op.constraints.setFromTriplets(ctrip.begin(), ctrip.end());

    if (ni > 0) {
      const SparseMatrix aii = op.matrix.topLeftCorner(ni, ni);
      fac.interior.compute(aii);
      if (fac.interior.info() != Eigen::Success || fac.interior.vectorD().minCoeff() <= 0.0) {
        throw std::runtime_error("bddc: interior block of subdomain " + std::to_string(t) + " is not SPD");
      }
    }
    fac.interior_interface = op.matrix.topRightCorner(ni, op.num_interface());

    std::vector<Eigen::Triplet<double>> ktrip;
    for (int col = 0; col < op.matrix.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(op.matrix, col); it; ++it) ktrip.emplace_back(it.row(), it.col(), it.value());
    }
    for (int col = 0; col < op.constraints.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(op.constraints, col); it; ++it) {
        ktrip.emplace_back(n + it.row(), it.col(), it.value());
        ktrip.emplace_back(it.col(), n + it.row(), it.value());
      }
    }
    SparseMatrix saddle(n + nc, n + nc);
    saddle.setFromTriplets(ktrip.begin(), ktrip.end());
    saddle.makeCompressed();
    fac.saddle.analyzePattern(saddle);
    fac.saddle.factorize(saddle);
    if (fac.saddle.info() != Eigen::Success) {
      throw std::runtime_error("bddc: constrained problem of subdomain " + std::to_string(t) + " is singular");
    }
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + nc, nc);
    rhs.bottomRows(nc).setIdentity();
    fac.coarse_basis = fac.saddle.solve(rhs).topRows(n);
  });

  multiplicity_.assign(static_cast<std::size_t>(size_), 0);
  for (const auto& op : subdomains_) {
    for (int d : op.interface_dofs) ++multiplicity_[static_cast<std::size_t>(d)];
  }

  coarse_matrix_ = Eigen::MatrixXd::Zero(num_coarse_, num_coarse_);
  for (int t = 0; t < np; ++t) {
    const SubdomainOperator& op = subdomains_[static_cast<std::size_t>(t)];
    const Eigen::MatrixXd& psi = factors_->local[static_cast<std::size_t>(t)]->coarse_basis;
    const Eigen::MatrixXd st = psi.transpose() * (op.matrix * psi);
    for (std::size_t i = 0; i < op.coarse_faces.size(); ++i) {
      for (std::size_t j = 0; j < op.coarse_faces.size(); ++j) {
        coarse_matrix_(op.coarse_faces[i], op.coarse_faces[j]) +=
            st(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  coarse_matrix_ = 0.5 * (coarse_matrix_ + coarse_matrix_.transpose()).eval();
  if (num_coarse_ > 0) {
    factors_->coarse.compute(coarse_matrix_);
    if (factors_->coarse.info() != Eigen::Success) throw std::runtime_error("bddc: coarse matrix is not SPD");
  }
}

double BddcPreconditioner::weight(int t, int i) const {
  const int d = subdomains_[static_cast<std::size_t>(t)].interface_dofs[static_cast<std::size_t>(i)];
  return 1.0 / multiplicity_[static_cast<std::size_t>(d)];
}

Eigen::VectorXd BddcPreconditioner::harmonic_extension(int t, const Eigen::VectorXd& g) const {
  const SubdomainOperator& op = subdomains_.at(static_cast<std::size_t>(t));
  if (g.size() != op.num_interface()) throw std::invalid_argument("harmonic_extension: wrong interface length");
  const auto& fac = *factors_->local[static_cast<std::size_t>(t)];
  Eigen::VectorXd v(op.size());
  if (op.num_interior() > 0) v.head(op.num_interior()) = -fac.interior.solve(fac.interior_interface * g);
  v.tail(op.num_interface()) = g;
  return v;
}

Eigen::VectorXd BddcPreconditioner::weighting_apply(const std::vector<Eigen::VectorXd>& subassembled) const {
  if (subassembled.size() != subdomains_.size()) throw std::invalid_argument("weighting_apply: wrong block count");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size_);
  for (std::size_t t = 0; t < subdomains_.size(); ++t) {
    const auto& dofs = subdomains_[t].interface_dofs;
    if (subassembled[t].size() != static_cast<Eigen::Index>(dofs.size())) {
      throw std::invalid_argument("weighting_apply: wrong block length");
    }
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      out[dofs[i]] += subassembled[t][static_cast<Eigen::Index>(i)] / multiplicity_[static_cast<std::size_t>(dofs[i])];
    }
  }
  return out;
}

Eigen::VectorXd BddcPreconditioner::apply(const Eigen::VectorXd& r) const {
  if (r.size() != size_) throw std::invalid_argument("bddc apply: wrong vector length");
  const int np = num_subdomains();

  // bubble solves with zero interface values
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(size_);
  std::vector<Eigen::VectorXd> bubble(static_cast<std::size_t>(np));
  parallel_for(np, [&](int t) {
    const SubdomainOperator& op = subdomains_[static_cast<std::size_t>(t)];
    if (op.num_interior() == 0) return;
    Eigen::VectorXd ri(op.num_interior());
    for (int i = 0; i < op.num_interior(); ++i) ri[i] = r[op.interior_dofs[static_cast<std::size_t>(i)]];
    bubble[static_cast<std::size_t>(t)] = factors_->local[static_cast<std::size_t>(t)]->interior.solve(ri);
  });
  for (int t = 0; t < np; ++t) {
    const auto& dofs = subdomains_[static_cast<std::size_t>(t)].interior_dofs;
    for (std::size_t i = 0; i < dofs.size(); ++i) z0[dofs[i]] = bubble[static_cast<std::size_t>(t)][static_cast<Eigen::Index>(i)];
  }
  const Eigen::VectorXd residual = r - matrix_ * z0;

  // weighted restriction, local constrained solves and coarse right-hand side
  std::vector<Eigen::VectorXd> local(static_cast<std::size_t>(np));
  std::vector<Eigen::VectorXd> coarse_rhs(static_cast<std::size_t>(np));
  parallel_for(np, [&](int t) {
    const SubdomainOperator& op = subdomains_[static_cast<std::size_t>(t)];
    const auto& fac = *factors_->local[static_cast<std::size_t>(t)];
    const int n = op.size();
    const int nc = static_cast<int>(op.coarse_faces.size());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n + nc);
    for (int i = 0; i < op.num_interface(); ++i) {
      g[op.num_interior() + i] = weight(t, i) * residual[op.interface_dofs[static_cast<std::size_t>(i)]];
    }
    coarse_rhs[static_cast<std::size_t>(t)] = fac.coarse_basis.transpose() * g.head(n);
    local[static_cast<std::size_t>(t)] = fac.saddle.solve(g).head(n);
  });
  Eigen::VectorXd rc = Eigen::VectorXd::Zero(num_coarse_);
  for (int t = 0; t < np; ++t) {
    const auto& cfs = subdomains_[static_cast<std::size_t>(t)].coarse_faces;
    for (std::size_t j = 0; j < cfs.size(); ++j) rc[cfs[j]] += coarse_rhs[static_cast<std::size_t>(t)][static_cast<Eigen::Index>(j)];
  }
  const Eigen::VectorXd uc = num_coarse_ > 0 ? Eigen::VectorXd(factors_->coarse.solve(rc)) : rc;

  // add coarse correction, average the interface values
  std::vector<Eigen::VectorXd> interface_values(static_cast<std::size_t>(np));
  for (int t = 0; t < np; ++t) {
    const SubdomainOperator& op = subdomains_[static_cast<std::size_t>(t)];
    Eigen::VectorXd& w = local[static_cast<std::size_t>(t)];
    if (!op.coarse_faces.empty()) {
      Eigen::VectorXd ut(static_cast<Eigen::Index>(op.coarse_faces.size()));
      for (std::size_t j = 0; j < op.coarse_faces.size(); ++j) ut[static_cast<Eigen::Index>(j)] = uc[op.coarse_faces[j]];
      w += factors_->local[static_cast<std::size_t>(t)]->coarse_basis * ut;
    }
    interface_values[static_cast<std::size_t>(t)] = w.tail(op.num_interface());
  }
  const Eigen::VectorXd u_gamma = weighting_apply(interface_values);

  // discrete harmonic extension into the subdomain interiors
  std::vector<Eigen::VectorXd> extension(static_cast<std::size_t>(np));
  parallel_for(np, [&](int t) {
    const SubdomainOperator& op = subdomains_[static_cast<std::size_t>(t)];
    Eigen::VectorXd g(op.num_interface());
    for (int i = 0; i < op.num_interface(); ++i) g[i] = u_gamma[op.interface_dofs[static_cast<std::size_t>(i)]];
    extension[static_cast<std::size_t>(t)] = harmonic_extension(t, g);
  });
  Eigen::VectorXd z = z0 + u_gamma;
  for (int t = 0; t < np; ++t) {
    const auto& dofs = subdomains_[static_cast<std::size_t>(t)].interior_dofs;
    for (std::size_t i = 0; i < dofs.size(); ++i) z[dofs[i]] += extension[static_cast<std::size_t>(t)][static_cast<Eigen::Index>(i)];
  }
  return z;
}

Eigen::MatrixXd preconditioned_operator(const BddcPreconditioner& bddc) {
  const int n = bddc.size();
  const Eigen::MatrixXd a(bddc.matrix());
  Eigen::MatrixXd ba(n, n);
  for (int j = 0; j < n; ++j) ba.col(j) = bddc.apply(a.col(j));
  return ba;
}

Eigen::VectorXd preconditioned_spectrum(const BddcPreconditioner& bddc) {
  const int n = bddc.size();
  const Eigen::MatrixXd a(bddc.matrix());
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("preconditioned_spectrum: matrix is not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd bl(n, n);
  for (int j = 0; j < n; ++j) bl.col(j) = bddc.apply(l.col(j));
  Eigen::MatrixXd m = l.transpose() * bl;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("preconditioned_spectrum: eigensolve failed");
  return eig.eigenvalues();
}

}  // namespace polybddc
