#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polybddc/basis.hpp"
#include "polybddc/mesh.hpp"

namespace polybddc {

/// DOF layout of the hybrid space: P_{k_cell} on every cell followed by
/// P_{k_face} on every face. Cell c owns [cell_offset(c), +cell_block()),
/// face f owns [face_offset(f), +face_block()). The mesh must outlive the space.
class HybridSpace {
 public:
  HybridSpace(const PolytopalMesh& mesh, int cell_degree, int face_degree);

  const PolytopalMesh& mesh() const { return *mesh_; }
  int cell_degree() const { return cell_degree_; }
  int face_degree() const { return face_degree_; }
  int cell_block() const { return cell_dim(cell_degree_); }
  int face_block() const { return face_dim(face_degree_); }

  int num_cell_dofs() const { return mesh_->num_cells() * cell_block(); }
  int num_face_dofs() const { return mesh_->num_faces() * face_block(); }
  int num_dofs() const { return num_cell_dofs() + num_face_dofs(); }
  int cell_offset(int c) const { return c * cell_block(); }
  int face_offset(int f) const { return num_cell_dofs() + f * face_block(); }

  /// Boundary space layout: boundary faces in increasing index, face_block() each.
  int num_boundary_dofs() const { return mesh_->num_boundary_faces() * face_block(); }
  /// Offset of face f in the boundary space, or -1 for interior faces.
  int boundary_offset(int f) const { return boundary_offset_[static_cast<std::size_t>(f)]; }

  const CellBasis& cell_basis(int c) const { return cell_bases_[static_cast<std::size_t>(c)]; }
  const FaceBasis& face_basis(int f) const { return face_bases_[static_cast<std::size_t>(f)]; }

  /// Global DOF indices of cell c followed by the faces of c in loop order.
  std::vector<int> local_dofs(int c) const;

 private:
  const PolytopalMesh* mesh_;
  int cell_degree_;
  int face_degree_;
  std::vector<CellBasis> cell_bases_;
  std::vector<FaceBasis> face_bases_;
  std::vector<int> boundary_offset_;
};

/// Coefficient vector aligned with a HybridSpace.
struct HybridVector {
  const HybridSpace* space = nullptr;
  Eigen::VectorXd values;

  explicit HybridVector(const HybridSpace& s) : space(&s), values(Eigen::VectorXd::Zero(s.num_dofs())) {}

  auto cell(int c) { return values.segment(space->cell_offset(c), space->cell_block()); }
  auto cell(int c) const { return values.segment(space->cell_offset(c), space->cell_block()); }
  auto face(int f) { return values.segment(space->face_offset(f), space->face_block()); }
  auto face(int f) const { return values.segment(space->face_offset(f), space->face_block()); }
};

/// Element of the boundary space: one polynomial block per boundary face.
struct BoundaryFunction {
  const HybridSpace* space = nullptr;
  Eigen::VectorXd values;

  explicit BoundaryFunction(const HybridSpace& s)
      : space(&s), values(Eigen::VectorXd::Zero(s.num_boundary_dofs())) {}

  auto face(int f) { return values.segment(space->boundary_offset(f), space->face_block()); }
  auto face(int f) const { return values.segment(space->boundary_offset(f), space->face_block()); }
};

/// Componentwise L2 projections onto cells and faces.
HybridVector interpolate(const HybridSpace& space, const ScalarFunction& g);

/// Boundary function with the constant value c on every boundary face.
BoundaryFunction constant_boundary_function(const HybridSpace& space, double c);

/// Copies the boundary-face blocks.
BoundaryFunction trace(const HybridSpace& space, const HybridVector& v);

/// Hybrid vector equal to w on boundary faces and zero elsewhere.
HybridVector extend_by_zero(const HybridSpace& space, const BoundaryFunction& w);

/// Restriction of a hybrid vector to the cells and faces of subdomain T. Cell
/// blocks come first (in the subdomain's cell order), then face blocks.
struct LocalHybridVector {
  int subdomain = -1;
  std::vector<int> cells;
  std::vector<int> faces;
  int cell_block = 0;
  int face_block = 0;
  Eigen::VectorXd values;

  auto cell(int local_c) const { return values.segment(local_c * cell_block, cell_block); }
  auto face(int local_f) const {
    return values.segment(static_cast<Eigen::Index>(cells.size()) * cell_block + local_f * face_block, face_block);
  }
};

LocalHybridVector restrict_to_subdomain(const HybridSpace& space, const CoarsePartition& partition, int subdomain,
                                        const HybridVector& v);

/// Face DOFs of the sub-assembled skeleton: every interface face counted once
/// per adjacent subdomain.
int subassembled_face_dofs(const HybridSpace& space, const CoarsePartition& partition);

}  // namespace polybddc
