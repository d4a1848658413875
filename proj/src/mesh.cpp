#include "vemc/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "vemc/error.hpp"

namespace vemc {

Polygon PolyMesh::polygon(int element) const {
  const auto& v = elements[element].vertices;
  Polygon poly;
  poly.reserve(v.size());
  for (int id : v) poly.push_back(nodes[id].pos);
  return poly;
}

CentroidArea PolyMesh::geometry(int element) const {
  return centroid_area(polygon(element));
}

double PolyMesh::total_area() const {
  double a = 0.0;
  for (int e = 0; e < num_elements(); ++e) a += signed_area(polygon(e));
  return a;
}

double PolyMesh::bbox_diagonal() const {
  if (nodes.empty()) return 0.0;
  Vec2 lo = nodes[0].pos, hi = nodes[0].pos;
  for (const auto& n : nodes) {
    lo = lo.cwiseMin(n.pos);
    hi = hi.cwiseMax(n.pos);
  }
  return (hi - lo).norm();
}

void build_adjacency(PolyMesh& mesh) {
  const int nv = mesh.num_nodes();
  mesh.node_elements.assign(nv, {});
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& v = mesh.elements[e].vertices;
    if (v.size() < 3) throw Error(ErrorKind::InvalidMesh, fmt::format("element {} has {} vertices", e, v.size()));
    for (int id : v) {
      if (id < 0 || id >= nv)
        throw Error(ErrorKind::InvalidMesh, fmt::format("element {} references missing node {}", e, id));
      auto& list = mesh.node_elements[id];
      if (!list.empty() && list.back() == e)
        throw Error(ErrorKind::InvalidMesh, fmt::format("element {} repeats node {}", e, id));
      list.push_back(e);
    }
  }
}

std::vector<std::pair<int, int>> edge_list(const PolyMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& el : mesh.elements) {
    const auto& v = el.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int a = v[i], b = v[(i + 1) % v.size()];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<int> edge_neighbors(const PolyMesh& mesh, int node) {
  std::vector<int> out;
  for (int e : mesh.node_elements[node]) {
    const auto& v = mesh.elements[e].vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] != node) continue;
      out.push_back(v[(i + 1) % n]);
      out.push_back(v[(i + n - 1) % n]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> nodes_of(const PolyMesh& mesh, const std::vector<int>& elements) {
  std::vector<int> out;
  for (int e : elements)
    for (int id : mesh.elements[e].vertices) out.push_back(id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Patch make_patch(const PolyMesh& mesh, int node) {
  Patch p;
  p.defining_node = node;
  p.elements = mesh.node_elements[node];
  std::sort(p.elements.begin(), p.elements.end());
  p.nodes = nodes_of(mesh, p.elements);
  return p;
}

std::vector<std::vector<int>> boundary_loops(const PolyMesh& mesh) {
  std::set<std::pair<int, int>> directed;
  for (const auto& el : mesh.elements) {
    const auto& v = el.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) directed.emplace(v[i], v[(i + 1) % v.size()]);
  }
  std::map<int, int> next;
  for (const auto& [a, b] : directed)
    if (!directed.count({b, a})) next[a] = b;

  std::vector<std::vector<int>> loops;
  std::set<int> visited;
  for (const auto& [start, unused] : next) {
    if (visited.count(start)) continue;
    std::vector<int> loop;
    int cur = start;
    while (!visited.count(cur)) {
      visited.insert(cur);
      loop.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<Vec2> boundary_corner_points(const PolyMesh& mesh, double tol) {
  std::vector<Vec2> corners;
  for (const auto& loop : boundary_loops(mesh)) {
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = mesh.nodes[loop[(i + n - 1) % n]].pos;
      const Vec2& b = mesh.nodes[loop[i]].pos;
      const Vec2& c = mesh.nodes[loop[(i + 1) % n]].pos;
      if (distance_to_segment(b, a, c) > tol) corners.push_back(b);
    }
  }
  std::sort(corners.begin(), corners.end(),
            [](const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  return corners;
}

namespace {

// Uniform bucket grid over node positions for proximity queries.
class NodeGrid {
 public:
  NodeGrid(const PolyMesh& mesh, double cell) : mesh_(mesh), cell_(cell) {
    for (int i = 0; i < mesh.num_nodes(); ++i) buckets_[key(cell_index(mesh.nodes[i].pos))].push_back(i);
  }

  template <class F>
  void for_each_near_segment(const Vec2& a, const Vec2& b, double pad, F&& f) const {
    const Vec2 lo = a.cwiseMin(b).array() - pad;
    const Vec2 hi = a.cwiseMax(b).array() + pad;
    const auto [i0, j0] = cell_index(lo);
    const auto [i1, j1] = cell_index(hi);
    for (long i = i0; i <= i1; ++i)
      for (long j = j0; j <= j1; ++j) {
        auto it = buckets_.find(key({i, j}));
        if (it == buckets_.end()) continue;
        for (int id : it->second) f(id);
      }
  }

 private:
  std::pair<long, long> cell_index(const Vec2& p) const {
    return {static_cast<long>(std::floor(p.x() / cell_)), static_cast<long>(std::floor(p.y() / cell_))};
  }
  static long long key(std::pair<long, long> ij) {
    return (static_cast<long long>(ij.first) << 32) ^ (ij.second & 0xffffffffLL);
  }

  const PolyMesh& mesh_;
  double cell_;
  std::unordered_map<long long, std::vector<int>> buckets_;
};

}  // namespace

ValidationReport validate_mesh(const PolyMesh& mesh, double tol) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  const int nv = mesh.num_nodes();

  for (int i = 0; i < nv; ++i)
    if (mesh.nodes[i].is_corner && !mesh.nodes[i].on_boundary)
      return fail(fmt::format("node {} is a corner but not on the boundary", i));

  double mean_edge = 0.0;
  std::size_t n_edges = 0;
  std::map<std::pair<int, int>, int> directed;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& v = mesh.elements[e].vertices;
    if (v.size() < 3) return fail(fmt::format("element {} has fewer than three vertices", e));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return fail(fmt::format("element {} repeats a vertex", e));
    for (int id : v)
      if (id < 0 || id >= nv) return fail(fmt::format("element {} references missing node {}", e, id));
    const Polygon poly = mesh.polygon(e);
    if (signed_area(poly) <= tol * tol) return fail(fmt::format("element {} has non-positive area", e));
    if (!is_simple(poly, 0.0)) return fail(fmt::format("element {} is not simple", e));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int a = v[i], b = v[(i + 1) % v.size()];
      if (directed.count({a, b})) return fail(fmt::format("directed edge ({},{}) used twice", a, b));
      directed[{a, b}] = e;
      mean_edge += (mesh.nodes[a].pos - mesh.nodes[b].pos).norm();
      ++n_edges;
    }
  }

  if (mesh.node_elements.size() != static_cast<std::size_t>(nv)) return fail("adjacency not built");
  for (int i = 0; i < nv; ++i)
    for (int e : mesh.node_elements[i]) {
      const auto& v = mesh.elements[e].vertices;
      if (std::find(v.begin(), v.end(), i) == v.end())
        return fail(fmt::format("adjacency lists element {} for node {} not in it", e, i));
    }
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int id : mesh.elements[e].vertices) {
      const auto& list = mesh.node_elements[id];
      if (std::find(list.begin(), list.end(), e) == list.end())
        return fail(fmt::format("adjacency misses element {} for node {}", e, id));
    }

  // A node lying inside an edge it is not an endpoint of is a T-junction.
  if (n_edges == 0) return {};
  mean_edge /= static_cast<double>(n_edges);
  NodeGrid grid(mesh, std::max(mean_edge, 1e-300));
  for (const auto& [ab, e] : directed) {
    const auto [a, b] = ab;
    if (directed.count({b, a}) && a > b) continue;
    const Vec2& pa = mesh.nodes[a].pos;
    const Vec2& pb = mesh.nodes[b].pos;
    std::string err;
    grid.for_each_near_segment(pa, pb, tol, [&](int id) {
      if (!err.empty() || id == a || id == b) return;
      if (distance_to_segment(mesh.nodes[id].pos, pa, pb) <= tol)
        err = fmt::format("node {} lies on edge ({},{}) without being part of it", id, a, b);
    });
    if (!err.empty()) return fail(err);
  }
  return {};
}

CompactionMap compact(PolyMesh& mesh, const std::vector<bool>& element_alive) {
  CompactionMap map;
  map.element_map.assign(mesh.elements.size(), -1);
  map.node_map.assign(mesh.nodes.size(), -1);

  std::vector<bool> used(mesh.nodes.size(), false);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
    if (element_alive[e])
      for (int id : mesh.elements[e].vertices) used[id] = true;

  std::vector<Node> nodes;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (used[i]) {
      map.node_map[i] = static_cast<int>(nodes.size());
      nodes.push_back(mesh.nodes[i]);
    }
  std::vector<Element> elements;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (!element_alive[e]) continue;
    map.element_map[e] = static_cast<int>(elements.size());
    Element el = std::move(mesh.elements[e]);
    for (int& id : el.vertices) id = map.node_map[id];
    elements.push_back(std::move(el));
  }
  mesh.nodes = std::move(nodes);
  mesh.elements = std::move(elements);
  build_adjacency(mesh);
  return map;
}

}  // namespace vemc
