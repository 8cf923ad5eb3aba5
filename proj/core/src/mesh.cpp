#include "polybddc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polybddc {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

bool is_simple_polygon(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

double Box::diameter() const { return std::hypot(width(), height()); }

const char* to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::cartesian:
      return "cartesian";
    case MeshFamily::simplicial:
      return "simplicial";
    case MeshFamily::voronoi:
      return "voronoi";
  }
  return "unknown";
}

MeshFamily mesh_family_from_string(const std::string& name) {
  if (name == "cartesian") return MeshFamily::cartesian;
  if (name == "simplicial") return MeshFamily::simplicial;
  if (name == "voronoi" || name == "polygonal") return MeshFamily::voronoi;
  throw std::invalid_argument("unknown mesh family '" + name + "'");
}

PolytopalMesh::PolytopalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> loops,
                             MeshFamily family, int grid_nx, int grid_ny, Box domain,
                             std::vector<int> cell_origin)
    : vertices_(std::move(vertices)),
      family_(family),
      grid_nx_(grid_nx),
      grid_ny_(grid_ny),
      domain_(domain),
      cell_origin_(std::move(cell_origin)) {
  if (cell_origin_.size() != loops.size()) {
    throw std::invalid_argument("cell_origin must have one entry per cell");
  }
  cells_.resize(loops.size());
  std::map<std::pair<int, int>, int> edge_to_face;

  for (std::size_t c = 0; c < loops.size(); ++c) {
    auto& loop = loops[c];
    const std::size_t n = loop.size();
    if (n < 3) throw std::invalid_argument("cell " + std::to_string(c) + " has fewer than 3 vertices");
    Cell& cell = cells_[c];
    cell.vertices = loop;
    cell.faces.resize(n);

    // shoelace area and centroid
    double a2 = 0.0;
    Point cx = Point::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& p = vertices_[loop[i]];
      const Point& q = vertices_[loop[(i + 1) % n]];
      const double w = cross(p, q);
      a2 += w;
      cx += w * (p + q);
    }
    if (!(a2 > 0.0)) {
      throw std::invalid_argument("cell " + std::to_string(c) + " is degenerate or clockwise");
    }
    std::vector<Point> poly;
    for (int v : loop) poly.push_back(vertices_[v]);
    if (!is_simple_polygon(poly)) {
      throw std::invalid_argument("cell " + std::to_string(c) + " is not a simple polygon");
    }
    cell.area = 0.5 * a2;
    cell.centroid = cx / (3.0 * a2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        cell.diameter = std::max(cell.diameter, (vertices_[loop[i]] - vertices_[loop[j]]).norm());
      }
    }
    h_ = std::max(h_, cell.diameter);

    for (std::size_t i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto it = edge_to_face.find({key.first, key.second});
      if (it == edge_to_face.end()) {
        Face f;
        f.vertices = {a, b};
        f.owner = static_cast<int>(c);
        const Point& p = vertices_[a];
        const Point& q = vertices_[b];
        f.length = (q - p).norm();
        if (!(f.length > 0.0)) throw std::invalid_argument("zero-length face in cell " + std::to_string(c));
        f.centroid = 0.5 * (p + q);
        const Point t = (q - p) / f.length;
        f.normal = Point(t.y(), -t.x());
        f.tangent = a < b ? t : Point(-t);
        const int id = static_cast<int>(faces_.size());
        faces_.push_back(f);
        edge_to_face.emplace(std::make_pair(key.first, key.second), id);
        cell.faces[i] = id;
      } else {
        Face& f = faces_[it->second];
        if (f.neighbor >= 0) {
          throw std::invalid_argument("face shared by more than two cells");
        }
        if (f.vertices[0] != b || f.vertices[1] != a) {
          throw std::invalid_argument("inconsistent orientation between neighbouring cells");
        }
        f.neighbor = static_cast<int>(c);
        cell.faces[i] = it->second;
      }
    }
  }
  for (int f = 0; f < num_faces(); ++f) {
    if (faces_[f].is_boundary()) boundary_faces_.push_back(f);
  }
}

double PolytopalMesh::quasi_uniformity() const {
  double ratio = 1.0;
  for (const auto& c : cells_) ratio = std::max(ratio, h_ / c.diameter);
  return ratio;
}

double PolytopalMesh::total_area() const {
  double sum = 0.0;
  for (const auto& c : cells_) sum += c.area;
  return sum;
}

PolytopalMesh build_cartesian(int nx, int ny, const Box& domain) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_cartesian: nx and ny must be >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
    throw std::invalid_argument("build_cartesian: empty domain");
  }
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      vertices.emplace_back(domain.x0 + domain.width() * i / nx, domain.y0 + domain.height() * j / ny);
    }
  }
  auto vid = [nx](int i, int j) { return i + (nx + 1) * j; };
  std::vector<std::vector<int>> loops;
  std::vector<int> origin;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
      origin.push_back(i + nx * j);
    }
  }
  return PolytopalMesh(std::move(vertices), std::move(loops), MeshFamily::cartesian, nx, ny, domain,
                       std::move(origin));
}

PolytopalMesh simplexify(const PolytopalMesh& cartesian) {
  if (cartesian.family() != MeshFamily::cartesian) {
    throw std::invalid_argument("simplexify: input mesh is not Cartesian");
  }
  std::vector<Point> vertices(cartesian.vertices().begin(), cartesian.vertices().end());
  std::vector<std::vector<int>> loops;
  std::vector<int> origin;
  for (int c = 0; c < cartesian.num_cells(); ++c) {
    const auto& v = cartesian.cell(c).vertices;  // SW, SE, NE, NW
    loops.push_back({v[0], v[1], v[2]});
    loops.push_back({v[0], v[2], v[3]});
    origin.push_back(cartesian.cell_origin()[c]);
    origin.push_back(cartesian.cell_origin()[c]);
  }
  return PolytopalMesh(std::move(vertices), std::move(loops), MeshFamily::simplicial, cartesian.grid_nx(),
                       cartesian.grid_ny(), cartesian.domain(), std::move(origin));
}

namespace {

Point circumcenter(const Point& a, const Point& b, const Point& c) {
  const Point ab = b - a;
  const Point ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  return a + Point(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

// Sutherland-Hodgman clip of a polygon against the box.
std::vector<Point> clip_to_box(std::vector<Point> poly, const Box& box) {
  auto clip = [&poly](auto inside, auto intersect) {
    std::vector<Point> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& cur = poly[i];
      const Point& prev = poly[(i + n - 1) % n];
      const bool ci = inside(cur);
      const bool pi = inside(prev);
      if (ci) {
        if (!pi) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (pi) {
        out.push_back(intersect(prev, cur));
      }
    }
    poly = std::move(out);
  };
  auto at_x = [](double x) {
    return [x](const Point& p, const Point& q) {
      const double s = (x - p.x()) / (q.x() - p.x());
      return Point(x, p.y() + s * (q.y() - p.y()));
    };
  };
  auto at_y = [](double y) {
    return [y](const Point& p, const Point& q) {
      const double s = (y - p.y()) / (q.y() - p.y());
      return Point(p.x() + s * (q.x() - p.x()), y);
    };
  };
  clip([&](const Point& p) { return p.x() >= box.x0; }, at_x(box.x0));
  clip([&](const Point& p) { return p.x() <= box.x1; }, at_x(box.x1));
  clip([&](const Point& p) { return p.y() >= box.y0; }, at_y(box.y0));
  clip([&](const Point& p) { return p.y() <= box.y1; }, at_y(box.y1));
  return poly;
}

// Merges points closer than `tol` into a single vertex index.
class VertexPool {
 public:
  explicit VertexPool(double tol) : tol_(tol) {}

  int insert(const Point& p) {
    const long long kx = std::llround(p.x() / tol_);
    const long long ky = std::llround(p.y() / tol_);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = index_.find({kx + dx, ky + dy});
        if (it != index_.end() && (points_[it->second] - p).norm() < tol_) return it->second;
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    index_.emplace(std::make_pair(kx, ky), id);
    return id;
  }

  std::vector<Point> release() { return std::move(points_); }

 private:
  double tol_;
  std::vector<Point> points_;
  std::map<std::pair<long long, long long>, int> index_;
};

}  // namespace

PolytopalMesh voronoi_polygonal(int nx, int ny, const Box& domain) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("voronoi_polygonal: nx and ny must be >= 1");
  const PolytopalMesh tri = simplexify(build_cartesian(nx, ny, domain));
  const auto nodes = tri.vertices();
  const int nn = tri.num_vertices();

  std::vector<std::vector<int>> node_cells(static_cast<std::size_t>(nn));
  std::vector<Point> centers(static_cast<std::size_t>(tri.num_cells()));
  for (int c = 0; c < tri.num_cells(); ++c) {
    const auto& v = tri.cell(c).vertices;
    centers[c] = circumcenter(nodes[v[0]], nodes[v[1]], nodes[v[2]]);
    for (int a : v) node_cells[a].push_back(c);
  }

  const double tol = 1e-12 * tri.h();
  VertexPool pool(tol);
  std::vector<std::vector<int>> loops;
  std::vector<int> origin;
  loops.reserve(static_cast<std::size_t>(nn));

  for (int a = 0; a < nn; ++a) {
    const Point& x = nodes[a];
    auto& fan = node_cells[a];
    std::vector<double> angle(fan.size());
    for (std::size_t i = 0; i < fan.size(); ++i) {
      const Point d = tri.cell(fan[i]).centroid - x;
      angle[i] = std::atan2(d.y(), d.x());
    }
    std::vector<std::size_t> order(fan.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return angle[i] < angle[j]; });

    // boundary faces of the fan around a boundary node
    std::vector<int> bfaces;
    for (int c : fan) {
      for (int f : tri.cell(c).faces) {
        const auto& fv = tri.face(f).vertices;
        if (tri.face(f).is_boundary() && (fv[0] == a || fv[1] == a)) bfaces.push_back(f);
      }
    }

    std::vector<Point> poly;
    if (bfaces.empty()) {
      for (auto i : order) poly.push_back(centers[fan[i]]);
    } else {
      if (bfaces.size() != 2) throw std::runtime_error("voronoi_polygonal: open fan at a boundary node");
      // rotate so the largest angular gap (the exterior) closes the sequence
      std::size_t start = 0;
      double gap = -1.0;
      for (std::size_t i = 0; i < order.size(); ++i) {
        const double prev = angle[order[(i + order.size() - 1) % order.size()]];
        double g = angle[order[i]] - prev;
        if (g <= 0.0) g += 2.0 * std::numbers::pi;
        if (g > gap) {
          gap = g;
          start = i;
        }
      }
      std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(start), order.end());
      // the boundary face of the first fan triangle opens the polygon
      const int first = fan[order.front()];
      auto in_cell = [&](int f, int c) {
        const auto& fs = tri.cell(c).faces;
        return std::find(fs.begin(), fs.end(), f) != fs.end();
      };
      const int f_open = in_cell(bfaces[0], first) ? bfaces[0] : bfaces[1];
      const int f_close = f_open == bfaces[0] ? bfaces[1] : bfaces[0];
      poly.push_back(tri.face(f_open).centroid);
      for (auto i : order) poly.push_back(centers[fan[i]]);
      poly.push_back(tri.face(f_close).centroid);
      poly.push_back(x);
    }
    poly = clip_to_box(std::move(poly), domain);
    // a corner fan has a single triangle owning both boundary faces, so the
    // open/close choice above may produce a clockwise loop
    double twice_area = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& p = poly[i];
      const Point& q = poly[(i + 1) % poly.size()];
      twice_area += p.x() * q.y() - q.x() * p.y();
    }
    if (twice_area < 0.0) std::reverse(poly.begin(), poly.end());

    std::vector<int> loop;
    for (const auto& p : poly) {
      const int id = pool.insert(p);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() < 3) {
      throw std::runtime_error("voronoi_polygonal: cell of node " + std::to_string(a) + " failed to close");
    }
    loops.push_back(std::move(loop));
    origin.push_back(a);
  }
  return PolytopalMesh(pool.release(), std::move(loops), MeshFamily::voronoi, nx, ny, domain,
                       std::move(origin));
}

PolytopalMesh build_mesh(MeshFamily family, int nx, int ny, const Box& domain) {
  switch (family) {
    case MeshFamily::cartesian:
      return build_cartesian(nx, ny, domain);
    case MeshFamily::simplicial:
      return simplexify(build_cartesian(nx, ny, domain));
    case MeshFamily::voronoi:
      return voronoi_polygonal(nx, ny, domain);
  }
  throw std::invalid_argument("build_mesh: unknown family");
}

CoarsePartition::CoarsePartition(const PolytopalMesh& mesh, std::vector<int> subdomain_of_cell)
    : subdomain_of_cell_(std::move(subdomain_of_cell)),
      coarse_face_of_fine_(static_cast<std::size_t>(mesh.num_faces()), -1) {
  if (static_cast<int>(subdomain_of_cell_.size()) != mesh.num_cells()) {
    throw std::invalid_argument("CoarsePartition: one subdomain id per cell required");
  }
  const int ns = subdomain_of_cell_.empty()
                     ? 0
                     : 1 + *std::max_element(subdomain_of_cell_.begin(), subdomain_of_cell_.end());
  subdomains_.resize(static_cast<std::size_t>(ns));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int t = subdomain_of_cell_[c];
    if (t < 0) throw std::invalid_argument("CoarsePartition: negative subdomain id");
    subdomains_[t].cells.push_back(c);
  }
  for (int t = 0; t < ns; ++t) {
    if (subdomains_[t].cells.empty()) {
      throw std::invalid_argument("CoarsePartition: subdomain " + std::to_string(t) + " is empty");
    }
  }

  std::map<std::pair<int, int>, int> pair_to_coarse;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int ta = subdomain_of_cell_[face.owner];
    subdomains_[ta].faces.push_back(f);
    if (face.is_boundary()) continue;
    const int tb = subdomain_of_cell_[face.neighbor];
    if (ta == tb) continue;
    subdomains_[tb].faces.push_back(f);
    const auto key = std::minmax(ta, tb);
    auto [it, inserted] =
        pair_to_coarse.try_emplace({key.first, key.second}, static_cast<int>(coarse_faces_.size()));
    if (inserted) {
      CoarseFace cf;
      cf.subdomains = {key.first, key.second};
      coarse_faces_.push_back(cf);
    }
    coarse_faces_[it->second].fine_faces.push_back(f);
    coarse_faces_[it->second].measure += face.length;
    coarse_face_of_fine_[f] = it->second;
  }
  for (int F = 0; F < static_cast<int>(coarse_faces_.size()); ++F) {
    for (int t : coarse_faces_[F].subdomains) subdomains_[t].coarse_faces.push_back(F);
  }

  for (auto& sd : subdomains_) {
    std::sort(sd.faces.begin(), sd.faces.end());
    std::vector<int> verts;
    for (int c : sd.cells) {
      const auto& v = mesh.cell(c).vertices;
      verts.insert(verts.end(), v.begin(), v.end());
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    const auto pts = mesh.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        sd.diameter = std::max(sd.diameter, (pts[verts[i]] - pts[verts[j]]).squaredNorm());
      }
    }
    sd.diameter = std::sqrt(sd.diameter);
    H_ = std::max(H_, sd.diameter);
  }
}

CoarsePartition agglomerate(const PolytopalMesh& mesh, int npx, int npy) {
  const int nx = mesh.grid_nx();
  const int ny = mesh.grid_ny();
  if (npx < 1 || npy < 1) throw std::invalid_argument("agglomerate: npx and npy must be >= 1");
  if (static_cast<long long>(npx) * npy > mesh.num_cells() || npx > nx || npy > ny) {
    throw std::invalid_argument("agglomerate: more subdomains than the grid supports");
  }
  std::vector<int> owner(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int o = mesh.cell_origin()[c];
    int i = 0;
    int j = 0;
    if (mesh.family() == MeshFamily::voronoi) {
      // node (i,j) is owned like the cell to its upper right, clamped at the last row/column
      i = std::min(o % (nx + 1), nx - 1);
      j = std::min(o / (nx + 1), ny - 1);
    } else {
      i = o % nx;
      j = o / nx;
    }
    const int bx = static_cast<int>(static_cast<long long>(i) * npx / nx);
    const int by = static_cast<int>(static_cast<long long>(j) * npy / ny);
    owner[c] = bx + npx * by;
  }
  return CoarsePartition(mesh, std::move(owner));
}

}  // namespace polybddc
