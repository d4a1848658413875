#include "vemc/mesh_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <istream>
#include <ostream>

#include "vemc/error.hpp"

namespace vemc {

void write_mesh(std::ostream& os, const PolyMesh& mesh) {
  fmt::print(os, "{} {}\n", mesh.num_nodes(), mesh.num_elements());
  for (const auto& n : mesh.nodes)
    fmt::print(os, "{:.17g} {:.17g} {} {}\n", n.pos.x(), n.pos.y(), int(n.on_boundary), int(n.is_corner));
  for (const auto& el : mesh.elements) {
    os << el.vertices.size();
    for (int id : el.vertices) os << ' ' << id;
    os << '\n';
  }
}

void write_mesh(const std::string& path, const PolyMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::IoError, "cannot open " + path);
  write_mesh(os, mesh);
}

PolyMesh read_mesh(std::istream& is) {
  PolyMesh mesh;
  int nv = 0, ne = 0;
  if (!(is >> nv >> ne) || nv < 0 || ne < 0) throw Error(ErrorKind::IoError, "bad mesh header");
  mesh.nodes.resize(nv);
  for (auto& n : mesh.nodes) {
    int b = 0, c = 0;
    if (!(is >> n.pos.x() >> n.pos.y() >> b >> c)) throw Error(ErrorKind::IoError, "truncated node list");
    n.on_boundary = b != 0;
    n.is_corner = c != 0;
  }
  mesh.elements.resize(ne);
  for (auto& el : mesh.elements) {
    int k = 0;
    if (!(is >> k) || k < 0) throw Error(ErrorKind::IoError, "truncated element list");
    el.vertices.resize(k);
    for (int& id : el.vertices)
      if (!(is >> id)) throw Error(ErrorKind::IoError, "truncated element list");
  }
  build_adjacency(mesh);
  return mesh;
}

PolyMesh read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_mesh(is);
}

void write_vtk(std::ostream& os, const PolyMesh& mesh, const VtkFields& fields, const std::string& title) {
  fmt::print(os, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET POLYDATA\n", title);
  fmt::print(os, "POINTS {} double\n", mesh.num_nodes());
  for (const auto& n : mesh.nodes) fmt::print(os, "{:.17g} {:.17g} 0\n", n.pos.x(), n.pos.y());

  std::size_t size = 0;
  for (const auto& el : mesh.elements) size += el.vertices.size() + 1;
  fmt::print(os, "POLYGONS {} {}\n", mesh.num_elements(), size);
  for (const auto& el : mesh.elements) {
    os << el.vertices.size();
    for (int id : el.vertices) os << ' ' << id;
    os << '\n';
  }

  if (!fields.point_scalars.empty() || !fields.point_vectors.empty()) {
    fmt::print(os, "POINT_DATA {}\n", mesh.num_nodes());
    for (const auto& [name, values] : fields.point_scalars) {
      fmt::print(os, "SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
      for (double v : values) fmt::print(os, "{:.17g}\n", v);
    }
    for (const auto& [name, values] : fields.point_vectors) {
      fmt::print(os, "VECTORS {} double\n", name);
      for (const auto& v : values) fmt::print(os, "{:.17g} {:.17g} 0\n", v.x(), v.y());
    }
  }
  if (!fields.cell_scalars.empty()) {
    fmt::print(os, "CELL_DATA {}\n", mesh.num_elements());
    for (const auto& [name, values] : fields.cell_scalars) {
      fmt::print(os, "SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
      for (double v : values) fmt::print(os, "{:.17g}\n", v);
    }
  }
}

void write_vtk(const std::string& path, const PolyMesh& mesh, const VtkFields& fields, const std::string& title) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::IoError, "cannot open " + path);
  write_vtk(os, mesh, fields, title);
}

}  // namespace vemc
