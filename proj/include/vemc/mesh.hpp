#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vemc/geometry.hpp"

namespace vemc {

struct Node {
  Vec2 pos = Vec2::Zero();
  bool on_boundary = false;
  bool is_corner = false;  // implies on_boundary; never removed by coarsening
};

/// Polygon given by node ids in CCW order. Consecutive collinear vertices
/// (hanging nodes) are allowed.
struct Element {
  std::vector<int> vertices;
};

/// Nodes plus CCW polygonal elements. `node_elements` is derived data and
/// must be rebuilt (build_adjacency) after any topology edit.
struct PolyMesh {
  std::vector<Node> nodes;
  std::vector<Element> elements;
  std::vector<std::vector<int>> node_elements;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  Polygon polygon(int element) const;
  CentroidArea geometry(int element) const;
  double total_area() const;
  /// Diameter of the node cloud's bounding box.
  double bbox_diagonal() const;
};

/// Rebuilds node_elements. Throws InvalidMesh for out-of-range node ids,
/// elements with fewer than three vertices, or repeated vertices.
void build_adjacency(PolyMesh& mesh);

/// Every undirected edge exactly once, as (min id, max id), sorted.
std::vector<std::pair<int, int>> edge_list(const PolyMesh& mesh);

/// Node ids sharing an element edge with `node`, sorted.
std::vector<int> edge_neighbors(const PolyMesh& mesh, int node);

struct Patch {
  int defining_node = -1;
  std::vector<int> elements;  // sorted
  std::vector<int> nodes;     // sorted, includes defining_node
};

/// Patch of all elements incident to `node`. Requires adjacency.
Patch make_patch(const PolyMesh& mesh, int node);

/// Union of vertices of the given elements, sorted.
std::vector<int> nodes_of(const PolyMesh& mesh, const std::vector<int>& elements);

/// Closed boundary loops (each CCW w.r.t. the mesh interior), built from
/// directed element edges whose reverse is not present.
std::vector<std::vector<int>> boundary_loops(const PolyMesh& mesh);

/// Loop vertices where the boundary turns (collinear points dropped),
/// sorted lexicographically. A point-set fingerprint of the domain outline.
std::vector<Vec2> boundary_corner_points(const PolyMesh& mesh, double tol);

struct ValidationReport {
  bool ok = true;
  std::string message;
};

/// Full mesh invariant sweep: element simplicity and positive area,
/// edge-matching conformity (no T-junctions, no overlaps), adjacency
/// consistency, and flags (is_corner implies on_boundary).
ValidationReport validate_mesh(const PolyMesh& mesh, double tol);

struct CompactionMap {
  std::vector<int> node_map;     // old id -> new id or -1
  std::vector<int> element_map;  // old id -> new id or -1
};

/// Drops dead elements and every node no surviving element references,
/// renumbers densely (order preserved), and rebuilds adjacency.
CompactionMap compact(PolyMesh& mesh, const std::vector<bool>& element_alive);

}  // namespace vemc
