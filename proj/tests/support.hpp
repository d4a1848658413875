#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vemc/domain.hpp"
#include "vemc/geometry.hpp"
#include "vemc/mesh.hpp"
#include "vemc/mesh_gen.hpp"

namespace vemc::test {

// nx x ny unit squares with the lower-left corner at the origin; nodes row
// by row, elements row by row.
inline PolyMesh unit_grid(int nx, int ny) {
  PolyMesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const bool bx = i == 0 || i == nx, by = j == 0 || j == ny;
      m.nodes.push_back({Vec2(i, j), bx || by, bx && by});
    }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m.elements.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}});
  build_adjacency(m);
  return m;
}

inline int find_node(const PolyMesh& mesh, const Vec2& p, double tol = 1e-12) {
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if ((mesh.nodes[i].pos - p).norm() <= tol) return i;
  return -1;
}

// Star-shaped about the origin: jittered angles (every gap below pi),
// radii in [rmin, 1].
inline Polygon random_star(std::mt19937_64& rng, int n, double rmin = 0.4) {
  std::uniform_real_distribution<double> jit(-0.2, 0.2), rad(rmin, 1.0);
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * (i + jit(rng)) / n;
    const double r = rad(rng);
    p.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return p;
}

inline Polygon regular_polygon(int n, double r = 1.0, Vec2 c = Vec2::Zero()) {
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    p.push_back(c + r * Vec2(std::cos(t), std::sin(t)));
  }
  return p;
}

// Fan triangulation from vertex 0: area and centroid.
inline CentroidArea fan_centroid(const Polygon& p) {
  double area = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double a = 0.5 * orient(p[0], p[i], p[i + 1]);
    area += a;
    c += a * (p[0] + p[i] + p[i + 1]) / 3.0;
  }
  return {c / area, area};
}

}  // namespace vemc::test
