#include "polybddc/hybrid_space.hpp"

#include <stdexcept>
#include <string>

namespace polybddc {

HybridSpace::HybridSpace(const PolytopalMesh& mesh, int cell_degree, int face_degree)
    : mesh_(&mesh), cell_degree_(cell_degree), face_degree_(face_degree) {
  if (cell_degree < 0 || face_degree < 0) throw std::invalid_argument("HybridSpace: negative degree");
  cell_bases_.reserve(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) cell_bases_.push_back(make_cell_basis(mesh, c, cell_degree));
  face_bases_.reserve(static_cast<std::size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) face_bases_.push_back(make_face_basis(mesh, f, face_degree));
  boundary_offset_.assign(static_cast<std::size_t>(mesh.num_faces()), -1);
  int offset = 0;
  for (int f : mesh.boundary_faces()) {
    boundary_offset_[static_cast<std::size_t>(f)] = offset;
    offset += face_block();
  }
}

std::vector<int> HybridSpace::local_dofs(int c) const {
  const auto& faces = mesh_->cell(c).faces;
  std::vector<int> dofs;
  dofs.reserve(static_cast<std::size_t>(cell_block() + face_block() * static_cast<int>(faces.size())));
  for (int i = 0; i < cell_block(); ++i) dofs.push_back(cell_offset(c) + i);
  for (int f : faces) {
    for (int i = 0; i < face_block(); ++i) dofs.push_back(face_offset(f) + i);
  }
  return dofs;
}

HybridVector interpolate(const HybridSpace& space, const ScalarFunction& g) {
  const auto& mesh = space.mesh();
  HybridVector v(space);
  const int qc = 2 * space.cell_degree() + 6;
  const int qf = 2 * space.face_degree() + 6;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    v.cell(c) = l2_project(space.cell_basis(c), cell_quadrature(mesh, c, qc), g);
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    v.face(f) = l2_project(space.face_basis(f), face_quadrature(mesh, f, qf), g);
  }
  return v;
}

BoundaryFunction constant_boundary_function(const HybridSpace& space, double c) {
  BoundaryFunction w(space);
  for (int f : space.mesh().boundary_faces()) w.face(f) = c * space.face_basis(f).constant_coefficients();
  return w;
}

BoundaryFunction trace(const HybridSpace& space, const HybridVector& v) {
  BoundaryFunction w(space);
  for (int f : space.mesh().boundary_faces()) w.face(f) = v.face(f);
  return w;
}

HybridVector extend_by_zero(const HybridSpace& space, const BoundaryFunction& w) {
  HybridVector v(space);
  for (int f : space.mesh().boundary_faces()) v.face(f) = w.face(f);
  return v;
}

LocalHybridVector restrict_to_subdomain(const HybridSpace& space, const CoarsePartition& partition, int subdomain,
                                        const HybridVector& v) {
  if (subdomain < 0 || subdomain >= partition.num_subdomains()) {
    throw std::out_of_range("restrict_to_subdomain: invalid subdomain " + std::to_string(subdomain));
  }
  const Subdomain& sd = partition.subdomain(subdomain);
  LocalHybridVector local;
  local.subdomain = subdomain;
  local.cells = sd.cells;
  local.faces = sd.faces;
  local.cell_block = space.cell_block();
  local.face_block = space.face_block();
  local.values.resize(static_cast<Eigen::Index>(sd.cells.size()) * space.cell_block() +
                      static_cast<Eigen::Index>(sd.faces.size()) * space.face_block());
  Eigen::Index pos = 0;
  for (int c : sd.cells) {
    local.values.segment(pos, space.cell_block()) = v.cell(c);
    pos += space.cell_block();
  }
  for (int f : sd.faces) {
    local.values.segment(pos, space.face_block()) = v.face(f);
    pos += space.face_block();
  }
  return local;
}

int subassembled_face_dofs(const HybridSpace& space, const CoarsePartition& partition) {
  int n = 0;
  for (int t = 0; t < partition.num_subdomains(); ++t) {
    n += static_cast<int>(partition.subdomain(t).faces.size()) * space.face_block();
  }
  return n;
}

}  // namespace polybddc
