#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vemc/mesh.hpp"

namespace vemc {

// Text format:
//   n_v n_el
//   x y on_boundary is_corner        (n_v lines)
//   k id_1 ... id_k                  (n_el lines, CCW)
void write_mesh(std::ostream& os, const PolyMesh& mesh);
void write_mesh(const std::string& path, const PolyMesh& mesh);
PolyMesh read_mesh(std::istream& is);
PolyMesh read_mesh(const std::string& path);

struct VtkFields {
  std::vector<std::pair<std::string, std::vector<double>>> point_scalars;
  std::vector<std::pair<std::string, std::vector<Vec2>>> point_vectors;
  std::vector<std::pair<std::string, std::vector<double>>> cell_scalars;
};

/// Legacy ASCII VTK polydata: POLYGONS cells with optional POINT_DATA and
/// CELL_DATA arrays.
void write_vtk(std::ostream& os, const PolyMesh& mesh, const VtkFields& fields = {},
               const std::string& title = "polygonal mesh");
void write_vtk(const std::string& path, const PolyMesh& mesh, const VtkFields& fields = {},
               const std::string& title = "polygonal mesh");

}  // namespace vemc
