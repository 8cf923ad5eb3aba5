#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "polybddc/mesh.hpp"

namespace polybddc {

/// One value per cell.
struct VtkCellField {
  std::string name;
  std::vector<double> values;
  bool integer = false;
};

/// Legacy ASCII VTK (version 3.0) unstructured grid of polygon cells.
void write_vtk(std::ostream& out, const PolytopalMesh& mesh, const std::vector<VtkCellField>& fields);
void write_vtk(const std::string& path, const PolytopalMesh& mesh, const std::vector<VtkCellField>& fields);

}  // namespace polybddc
