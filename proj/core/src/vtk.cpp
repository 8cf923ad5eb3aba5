#include "polybddc/vtk.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace polybddc {

void write_vtk(std::ostream& out, const PolytopalMesh& mesh, const std::vector<VtkCellField>& fields) {
  for (const auto& field : fields) {
    if (static_cast<int>(field.values.size()) != mesh.num_cells()) {
      throw std::invalid_argument("write_vtk: field '" + field.name + "' has wrong length");
    }
  }
  out << "# vtk DataFile Version 3.0\npolybddc mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point& p : mesh.vertices()) out << p.x() << ' ' << p.y() << " 0\n";

  std::size_t list_size = 0;
  for (const Cell& cell : mesh.cells()) list_size += cell.vertices.size() + 1;
  out << "CELLS " << mesh.num_cells() << ' ' << list_size << '\n';
  for (const Cell& cell : mesh.cells()) {
    out << cell.vertices.size();
    for (int v : cell.vertices) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << "7\n";

  if (fields.empty()) return;
  out << "CELL_DATA " << mesh.num_cells() << '\n';
  for (const auto& field : fields) {
    out << "SCALARS " << field.name << (field.integer ? " int" : " double") << " 1\nLOOKUP_TABLE default\n";
    for (double v : field.values) {
      if (field.integer) {
        out << std::lround(v) << '\n';
      } else {
        out << v << '\n';
      }
    }
  }
}

void write_vtk(const std::string& path, const PolytopalMesh& mesh, const std::vector<VtkCellField>& fields) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("write_vtk: cannot open " + path);
  write_vtk(file, mesh, fields);
  if (!file) throw std::runtime_error("write_vtk: write failed for " + path);
}

}  // namespace polybddc
