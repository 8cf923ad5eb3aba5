#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polybddc {

using Point = Eigen::Vector2d;

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Box {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double diameter() const;
};

/// True if no two non-adjacent edges of the closed loop properly intersect.
bool is_simple_polygon(std::span<const Point> polygon);

enum class MeshFamily { cartesian, simplicial, voronoi };

const char* to_string(MeshFamily family);
MeshFamily mesh_family_from_string(const std::string& name);

/// A straight face (edge in 2D). Vertices are stored in the orientation of the
/// owner cell's counter-clockwise loop, so `normal` points out of `owner`.
struct Face {
  std::array<int, 2> vertices{};
  int owner = -1;
  int neighbor = -1;  ///< -1 on the boundary
  Point centroid = Point::Zero();
  Point normal = Point::Zero();
  /// Unit tangent from the lower to the higher global vertex index. Face bases
  /// are parameterised along this direction so both neighbours agree.
  Point tangent = Point::Zero();
  double length = 0.0;

  bool is_boundary() const { return neighbor < 0; }
  double diameter() const { return length; }
};

struct Cell {
  std::vector<int> vertices;  ///< counter-clockwise loop
  std::vector<int> faces;     ///< faces[i] joins vertices[i] and vertices[i+1]
  Point centroid = Point::Zero();
  double area = 0.0;
  double diameter = 0.0;
};

/// Immutable 2D polytopal mesh. Cells are simple polygons; faces are shared by
/// at most two cells.
class PolytopalMesh {
 public:
  /// Builds faces and geometry from counter-clockwise polygon loops.
  /// `cell_origin[c]` names the Cartesian entity (cell or node) cell `c` was
  /// generated from; it drives ownership in `agglomerate`.
  PolytopalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> loops, MeshFamily family,
                int grid_nx, int grid_ny, Box domain, std::vector<int> cell_origin);

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const Face> faces() const { return faces_; }
  const Cell& cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }
  const Face& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }

  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_boundary_faces() const { return static_cast<int>(boundary_faces_.size()); }
  int num_interior_faces() const { return num_faces() - num_boundary_faces(); }

  /// Boundary faces in increasing face index.
  std::span<const int> boundary_faces() const { return boundary_faces_; }

  /// +1 if `c` owns `f` (normal points out of `c`), -1 otherwise.
  double orientation(int c, int f) const { return face(f).owner == c ? 1.0 : -1.0; }

  /// Global mesh size h = max_t h_t.
  double h() const { return h_; }
  /// max_t h / h_t.
  double quasi_uniformity() const;
  double total_area() const;

  MeshFamily family() const { return family_; }
  int grid_nx() const { return grid_nx_; }
  int grid_ny() const { return grid_ny_; }
  const Box& domain() const { return domain_; }
  std::span<const int> cell_origin() const { return cell_origin_; }

 private:
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<int> boundary_faces_;
  MeshFamily family_;
  int grid_nx_;
  int grid_ny_;
  Box domain_;
  std::vector<int> cell_origin_;
  double h_ = 0.0;
};

/// nx*ny rectangles. Vertex (i,j) has index i + (nx+1)*j; cell (i,j) has index i + nx*j.
PolytopalMesh build_cartesian(int nx, int ny, const Box& domain = {});

/// Splits every rectangle of a Cartesian mesh along its lower-left to
/// upper-right diagonal.
PolytopalMesh simplexify(const PolytopalMesh& cartesian);

/// Dual polygonal mesh of the simplexified (nx,ny) grid: one cell per grid node,
/// bounded by triangle circumcentres and, on the boundary, by edge midpoints and
/// the node itself. Faces shorter than 1e-12*h are collapsed.
PolytopalMesh voronoi_polygonal(int nx, int ny, const Box& domain = {});

PolytopalMesh build_mesh(MeshFamily family, int nx, int ny, const Box& domain = {});

/// Record of a coarse face F = dT ∩ dT'.
struct CoarseFace {
  std::array<int, 2> subdomains{};  ///< sorted pair (T, T')
  std::vector<int> fine_faces;      ///< increasing fine face indices
  double measure = 0.0;
};

struct Subdomain {
  std::vector<int> cells;  ///< local-to-global cell map
  std::vector<int> faces;  ///< fine faces touching a cell of T, increasing
  std::vector<int> coarse_faces;
  double diameter = 0.0;
};

/// Subdomain partition obtained by agglomerating fine cells.
class CoarsePartition {
 public:
  CoarsePartition(const PolytopalMesh& mesh, std::vector<int> subdomain_of_cell);

  int num_subdomains() const { return static_cast<int>(subdomains_.size()); }
  std::span<const int> subdomain_of_cell() const { return subdomain_of_cell_; }
  int subdomain_of(int cell) const { return subdomain_of_cell_[static_cast<std::size_t>(cell)]; }
  const Subdomain& subdomain(int t) const { return subdomains_.at(static_cast<std::size_t>(t)); }
  std::span<const CoarseFace> coarse_faces() const { return coarse_faces_; }
  /// Coarse face containing fine face f, or -1.
  int coarse_face_of(int f) const { return coarse_face_of_fine_[static_cast<std::size_t>(f)]; }
  /// H = max_T diam(T).
  double H() const { return H_; }

 private:
  std::vector<int> subdomain_of_cell_;
  std::vector<Subdomain> subdomains_;
  std::vector<CoarseFace> coarse_faces_;
  std::vector<int> coarse_face_of_fine_;
  double H_ = 0.0;
};

/// Block partition into npx*npy subdomains following the ownership of the
/// Cartesian entity each cell came from.
CoarsePartition agglomerate(const PolytopalMesh& mesh, int npx, int npy);

}  // namespace polybddc
