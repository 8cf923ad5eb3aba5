#include "polybddc/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

namespace polybddc {

Eigen::MatrixXd h1_local_matrix(const HybridSpace& space, int c) {
  const auto& mesh = space.mesh();
  const Cell& cell = mesh.cell(c);
  const CellBasis& cb = space.cell_basis(c);
  const int nc = space.cell_block();
  const int nb = space.face_block();
  const int n = nc + nb * static_cast<int>(cell.faces.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  k.topLeftCorner(nc, nc) = stiffness_matrix(cb, cell_quadrature(mesh, c, 2 * space.cell_degree()));

  const int qdeg = 2 * std::max(space.cell_degree(), space.face_degree());
  for (std::size_t i = 0; i < cell.faces.size(); ++i) {
    const int f = cell.faces[i];
    const QuadratureRule rule = face_quadrature(mesh, f, qdeg);
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rule.size()), n);
    jump.leftCols(nc) = -cb.values(rule);
    jump.middleCols(nc + nb * static_cast<Eigen::Index>(i), nb) = space.face_basis(f).values(rule);
    k += weighted_gram(jump, jump, rule) / cell.diameter;
  }
  return k;
}

Eigen::SparseMatrix<double> h1_gram(const HybridSpace& space) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const Eigen::MatrixXd k = h1_local_matrix(space, c);
    const auto dofs = space.local_dofs(c);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      for (std::size_t j = 0; j < dofs.size(); ++j) {
        triplets.emplace_back(dofs[i], dofs[j], k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
  }
  Eigen::SparseMatrix<double> gram(space.num_dofs(), space.num_dofs());
  gram.setFromTriplets(triplets.begin(), triplets.end());
  return gram;
}

double h1_seminorm(const HybridSpace& space, const HybridVector& v, std::span<const int> cells) {
  double sum = 0.0;
  for (int c : cells) {
    const auto dofs = space.local_dofs(c);
    Eigen::VectorXd local(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) local[static_cast<Eigen::Index>(i)] = v.values[dofs[i]];
    sum += local.dot(h1_local_matrix(space, c) * local);
  }
  return std::sqrt(std::max(sum, 0.0));
}

double h1_seminorm(const HybridSpace& space, const HybridVector& v) {
  std::vector<int> cells(static_cast<std::size_t>(space.mesh().num_cells()));
  for (int c = 0; c < space.mesh().num_cells(); ++c) cells[static_cast<std::size_t>(c)] = c;
  return h1_seminorm(space, v, cells);
}

namespace {

struct FaceMoments {
  Eigen::MatrixXd mass;
  Eigen::RowVectorXd integral;  ///< int_f psi_i
};

FaceMoments face_moments(const HybridSpace& space, int f) {
  const FaceBasis& basis = space.face_basis(f);
  FaceMoments m;
  m.mass = mass_matrix(basis, face_quadrature(space.mesh(), f, 2 * space.face_degree()));
  m.integral = (m.mass * basis.constant_coefficients()).transpose();
  return m;
}

}  // namespace

HhalfGram hhalf_gram(const HybridSpace& space) {
  const auto& mesh = space.mesh();
  const auto bfaces = mesh.boundary_faces();
  const int nb = space.face_block();
  const auto n_faces = static_cast<Eigen::Index>(bfaces.size());

  HhalfGram gram;
  gram.faces.assign(bfaces.begin(), bfaces.end());
  gram.matrix = Eigen::MatrixXd::Zero(space.num_boundary_dofs(), space.num_boundary_dofs());

  // mean rows a_f = (1/|f|) int_f psi
  Eigen::MatrixXd mean_rows(n_faces, nb);
  for (Eigen::Index i = 0; i < n_faces; ++i) {
    const int f = bfaces[static_cast<std::size_t>(i)];
    const FaceMoments m = face_moments(space, f);
    const double len = mesh.face(f).length;
    mean_rows.row(i) = m.integral / len;
    // fluctuation term h_f^{-1} || w_f - mean(w_f) ||^2
    const Eigen::VectorXd one = space.face_basis(f).constant_coefficients();
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(nb, nb) - one * mean_rows.row(i);
    gram.matrix.block(i * nb, i * nb, nb, nb) += p.transpose() * m.mass * p / mesh.face(f).diameter();
  }

  for (Eigen::Index i = 0; i < n_faces; ++i) {
    const Face& fi = mesh.face(bfaces[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = i + 1; j < n_faces; ++j) {
      const Face& fj = mesh.face(bfaces[static_cast<std::size_t>(j)]);
      const double dist2 = (fi.centroid - fj.centroid).squaredNorm();
      if (!(dist2 > 0.0)) {
        throw std::runtime_error("hhalf_gram: coincident boundary face centroids");
      }
      // |x_f - x_f'|^d with d = 2; both orderings of the pair contribute
      const double weight = 2.0 * fi.length * fj.length / dist2;
      const Eigen::MatrixXd aa = mean_rows.row(i).transpose() * mean_rows.row(j);
      gram.matrix.block(i * nb, i * nb, nb, nb) += weight * mean_rows.row(i).transpose() * mean_rows.row(i);
      gram.matrix.block(j * nb, j * nb, nb, nb) += weight * mean_rows.row(j).transpose() * mean_rows.row(j);
      gram.matrix.block(i * nb, j * nb, nb, nb) -= weight * aa;
      gram.matrix.block(j * nb, i * nb, nb, nb) -= weight * aa.transpose();
    }
  }
  gram.ordered_pairs = static_cast<std::size_t>(n_faces) * static_cast<std::size_t>(std::max<Eigen::Index>(n_faces - 1, 0));
  return gram;
}

double hhalf_seminorm(const HhalfGram& gram, const BoundaryFunction& w) {
  const double value = w.values.dot(gram.matrix * w.values);
  const double scale = 1.0 + w.values.squaredNorm() * gram.matrix.diagonal().cwiseAbs().maxCoeff();
  if (value < -1e-12 * scale) throw std::logic_error("hhalf_seminorm: negative quadratic form");
  return std::sqrt(std::max(value, 0.0));
}

double hhalf_seminorm(const HybridSpace& space, const BoundaryFunction& w) {
  return hhalf_seminorm(hhalf_gram(space), w);
}

bool BoundaryRegion::contains(int f) const { return std::binary_search(faces.begin(), faces.end(), f); }

BoundaryRegion boundary_region(const PolytopalMesh& mesh, std::vector<int> faces) {
  std::sort(faces.begin(), faces.end());
  if (std::adjacent_find(faces.begin(), faces.end()) != faces.end()) {
    throw std::invalid_argument("boundary_region: duplicate faces");
  }
  BoundaryRegion region;
  for (int f : faces) {
    if (f < 0 || f >= mesh.num_faces() || !mesh.face(f).is_boundary()) {
      throw std::invalid_argument("boundary_region: face " + std::to_string(f) + " is not a boundary face");
    }
    region.measure += mesh.face(f).length;
  }
  if (faces.empty()) throw std::invalid_argument("boundary_region: empty region");
  region.faces = std::move(faces);
  return region;
}

BoundaryRegion boundary_region(const PolytopalMesh& mesh, unsigned sides) {
  const Box& box = mesh.domain();
  const double tol = 1e-12 * box.diameter();
  std::vector<int> faces;
  for (int f : mesh.boundary_faces()) {
    const Point& x = mesh.face(f).centroid;
    const bool hit = ((sides & kBottom) && std::abs(x.y() - box.y0) < tol) ||
                     ((sides & kRight) && std::abs(x.x() - box.x1) < tol) ||
                     ((sides & kTop) && std::abs(x.y() - box.y1) < tol) ||
                     ((sides & kLeft) && std::abs(x.x() - box.x0) < tol);
    if (hit) faces.push_back(f);
  }
  return boundary_region(mesh, std::move(faces));
}

Eigen::RowVectorXd boundary_mean_vector(const HybridSpace& space, const BoundaryRegion& gamma) {
  Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(space.num_boundary_dofs());
  for (int f : gamma.faces) {
    s.segment(space.boundary_offset(f), space.face_block()) = face_moments(space, f).integral;
  }
  return s;
}

Eigen::VectorXd boundary_constant_vector(const HybridSpace& space) {
  return constant_boundary_function(space, 1.0).values;
}

BoundaryFunction truncate(const HybridSpace& space, const BoundaryRegion& gamma, const BoundaryFunction& w) {
  BoundaryFunction out(space);
  for (int f : gamma.faces) out.face(f) = w.face(f);
  return out;
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> truncation_matrix(const HybridSpace& space,
                                                                const BoundaryRegion& gamma) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(space.num_boundary_dofs());
  for (int f : gamma.faces) d.segment(space.boundary_offset(f), space.face_block()).setOnes();
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(d);
}

Eigen::MatrixXd h1_boundary_schur(const HybridSpace& space) {
  const Eigen::SparseMatrix<double> k = h1_gram(space);
  const int n = space.num_dofs();
  // boundary DOFs in boundary-space order, everything else interior
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  const int nbd = space.num_boundary_dofs();
  for (int f : space.mesh().boundary_faces()) {
    for (int i = 0; i < space.face_block(); ++i) slot[space.face_offset(f) + i] = space.boundary_offset(f) + i;
  }
  std::vector<int> interior_index(static_cast<std::size_t>(n), -1);
  int ni = 0;
  for (int d = 0; d < n; ++d) {
    if (slot[d] < 0) interior_index[d] = ni++;
  }
  std::vector<Eigen::Triplet<double>> tii;
  std::vector<Eigen::Triplet<double>> tib;
  Eigen::MatrixXd kbb = Eigen::MatrixXd::Zero(nbd, nbd);
  for (int col = 0; col < k.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      if (slot[r] >= 0 && slot[c] >= 0) {
        kbb(slot[r], slot[c]) += it.value();
      } else if (slot[r] < 0 && slot[c] < 0) {
        tii.emplace_back(interior_index[r], interior_index[c], it.value());
      } else if (slot[r] < 0) {
        tib.emplace_back(interior_index[r], slot[c], it.value());
      }
    }
  }
  Eigen::SparseMatrix<double> kii(ni, ni);
  kii.setFromTriplets(tii.begin(), tii.end());
  Eigen::SparseMatrix<double> kib(ni, nbd);
  kib.setFromTriplets(tib.begin(), tib.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kii);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("h1_boundary_schur: interior factorization failed");
  // column blocks keep the dense interior-by-boundary work arrays small
  constexpr int kBlock = 64;
  Eigen::MatrixXd schur = kbb;
  for (int j0 = 0; j0 < nbd; j0 += kBlock) {
    const int width = std::min(kBlock, nbd - j0);
    const Eigen::MatrixXd cols(kib.middleCols(j0, width));
    const Eigen::MatrixXd x = ldlt.solve(cols);
    schur.middleCols(j0, width) -= kib.transpose() * x;
  }
  return 0.5 * (schur + schur.transpose());
}

TraceLiftingConstants trace_lifting_constants(const HybridSpace& space) {
  const Eigen::MatrixXd h = hhalf_gram(space).matrix;
  const Eigen::MatrixXd s = h1_boundary_schur(space);
  const BoundaryRegion all = boundary_region(space.mesh(), kAllSides);
  const Eigen::RowVectorXd mean = boundary_mean_vector(space, all);
  // orthonormal basis of {w : int_dOmega w = 0}, a complement of the constants
  const Eigen::Index n = mean.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mean.transpose());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd basis = q.rightCols(n - 1);
  const Eigen::MatrixXd hr = basis.transpose() * h * basis;
  const Eigen::MatrixXd sr = basis.transpose() * s * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hr + hr.transpose()),
                                                                 0.5 * (sr + sr.transpose()), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("trace_lifting_constants: eigensolve failed");
  TraceLiftingConstants out;
  out.trace = eig.eigenvalues().maxCoeff();
  out.lifting = 1.0 / eig.eigenvalues().minCoeff();
  return out;
}

}  // namespace polybddc
