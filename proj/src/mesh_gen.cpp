#include "vemc/mesh_gen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "vemc/error.hpp"

namespace vemc {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, false>;  // CCW, open
using BMulti = bg::model::multi_polygon<BPolygon>;

SeedSet structured_seeds(const Domain& domain, int nx, int ny) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::EmptySeedSet, "structured grid needs n >= 2 per side");
  const Vec2 lo = domain.bbox_min(), hi = domain.bbox_max();
  const double hx = (hi.x() - lo.x()) / nx, hy = (hi.y() - lo.y()) / ny;
  SeedSet out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 p(lo.x() + (i + 0.5) * hx, lo.y() + (j + 0.5) * hy);
      if (domain.sdf(p) < 0.0) out.seeds.push_back(p);
    }
  if (out.seeds.empty()) throw Error(ErrorKind::EmptySeedSet, "every grid point lies outside the domain");
  return out;
}

SeedSet random_seeds(const Domain& domain, int n, std::uint64_t rng_seed) {
  if (n < 1) throw Error(ErrorKind::EmptySeedSet, "seed count must be positive");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> ux(domain.bbox_min().x(), domain.bbox_max().x());
  std::uniform_real_distribution<double> uy(domain.bbox_min().y(), domain.bbox_max().y());
  SeedSet out;
  long rejections = 0;
  while (static_cast<int>(out.seeds.size()) < n) {
    const double x = ux(rng);
    const double y = uy(rng);
    const Vec2 p(x, y);
    if (domain.sdf(p) < 0.0) {
      out.seeds.push_back(p);
    } else if (++rejections > 1'000'000) {
      throw Error(ErrorKind::SamplingExhausted, "rejection sampling exceeded 10^6 rejections");
    }
  }
  return out;
}

namespace {

// Bucket grid over generator positions; neighbours are visited ring by ring.
class GeneratorGrid {
 public:
  GeneratorGrid(const std::vector<Vec2>& pts) : pts_(pts) {
    lo_ = hi_ = pts.front();
    for (const auto& p : pts) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    const Vec2 ext = (hi_ - lo_).cwiseMax(Vec2(1e-12, 1e-12));
    cell_ = std::sqrt(ext.x() * ext.y() / static_cast<double>(pts.size()));
    cell_ = std::max(cell_, 1e-3 * ext.maxCoeff());
    nx_ = std::max(1, static_cast<int>(std::ceil(ext.x() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(ext.y() / cell_)));
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      const auto [bx, by] = bucket(pts[i]);
      buckets_[static_cast<std::size_t>(by) * nx_ + bx].push_back(i);
    }
  }

  std::pair<int, int> bucket(const Vec2& p) const {
    const int bx = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int by = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
    return {bx, by};
  }

  int max_ring() const { return std::max(nx_, ny_); }
  double cell() const { return cell_; }

  template <class F>
  void for_ring(std::pair<int, int> c, int r, F&& f) const {
    for (int j = c.second - r; j <= c.second + r; ++j) {
      if (j < 0 || j >= ny_) continue;
      for (int i = c.first - r; i <= c.first + r; ++i) {
        if (i < 0 || i >= nx_) continue;
        if (std::max(std::abs(i - c.first), std::abs(j - c.second)) != r) continue;
        for (int id : buckets_[static_cast<std::size_t>(j) * nx_ + i]) f(id);
      }
    }
  }

 private:
  const std::vector<Vec2>& pts_;
  Vec2 lo_, hi_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// Keeps the part of a convex polygon with (x - m) . n <= 0.
Polygon clip_half_plane(const Polygon& poly, const Vec2& m, const Vec2& n) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t k = poly.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % k];
    const double fp = (p - m).dot(n);
    const double fq = (q - m).dot(n);
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
  }
  return out;
}

Polygon voronoi_cell(int i, const std::vector<Vec2>& gens, const GeneratorGrid& grid, const Polygon& box) {
  Polygon cell = box;
  const Vec2& g = gens[i];
  const auto c = grid.bucket(g);
  auto radius = [&] {
    double r = 0.0;
    for (const auto& p : cell) r = std::max(r, (p - g).norm());
    return r;
  };
  double reach = 2.0 * radius();
  std::vector<std::pair<double, int>> ring;
  for (int r = 0; r <= grid.max_ring(); ++r) {
    if (r > 1 && (r - 1) * grid.cell() > reach) break;
    ring.clear();
    grid.for_ring(c, r, [&](int j) {
      if (j != i) ring.emplace_back((gens[j] - g).squaredNorm(), j);
    });
    std::sort(ring.begin(), ring.end());
    for (const auto& [d2, j] : ring) {
      if (std::sqrt(d2) > reach) break;
      if (d2 == 0.0) continue;
      cell = clip_half_plane(cell, 0.5 * (g + gens[j]), gens[j] - g);
      if (cell.size() < 3) return cell;
      reach = 2.0 * radius();
    }
  }
  return cell;
}

// Consecutive vertices closer than 1e-10 of the polygon extent are merged;
// Boost set operations misbehave on repeated points.
BPolygon to_boost(const Polygon& poly) {
  double ext = 0.0;
  for (const auto& p : poly) ext = std::max(ext, (p - poly.front()).cwiseAbs().maxCoeff());
  const double tol = 1e-10 * std::max(ext, 1e-300);
  Polygon clean;
  for (const auto& p : poly)
    if (clean.empty() || (p - clean.back()).norm() > tol) clean.push_back(p);
  while (clean.size() > 1 && (clean.back() - clean.front()).norm() <= tol) clean.pop_back();
  BPolygon out;
  for (const auto& p : clean) bg::append(out.outer(), BPoint(p.x(), p.y()));
  return out;
}

BPolygon domain_polygon(const Domain& domain) {
  BPolygon out = to_boost(domain.outer());
  for (const auto& h : domain.holes()) {
    out.inners().emplace_back();
    for (const auto& p : h) bg::append(out.inners().back(), BPoint(p.x(), p.y()));
  }
  bg::correct(out);
  return out;
}

// Points that can appear as vertices of cell ∩ domain: cell vertices, domain
// vertices and crossings of cell edges with boundary segments.
std::vector<Vec2> clip_candidates(const Polygon& cell, const Domain& domain) {
  std::vector<Vec2> out(cell.begin(), cell.end());
  out.insert(out.end(), domain.outer().begin(), domain.outer().end());
  for (const auto& h : domain.holes()) out.insert(out.end(), h.begin(), h.end());
  for (std::size_t i = 0; i < cell.size(); ++i) {
    const Vec2& a = cell[i];
    const Vec2 d = cell[(i + 1) % cell.size()] - a;
    for (const auto& s : domain.segments()) {
      const Vec2 e = s.b - s.a;
      const double den = cross(d, e);
      if (std::abs(den) <= 1e-14 * d.norm() * e.norm()) continue;
      const double t = cross(s.a - a, e) / den;
      const double u = cross(s.a - a, d) / den;
      if (t >= -1e-9 && t <= 1.0 + 1e-9 && u >= -1e-9 && u <= 1.0 + 1e-9) out.push_back(a + t * d);
    }
  }
  return out;
}

// Boost loses accuracy where edges overlap collinearly; every output vertex
// is moved to the nearest exactly computed candidate within tol.
Polygon snap_vertices(const BPolygon& poly, const std::vector<Vec2>& candidates, double tol) {
  Polygon out;
  for (const auto& q : poly.outer()) {
    const Vec2 p(q.x(), q.y());
    double best = tol;
    Vec2 snapped = p;
    for (const auto& c : candidates) {
      const double d = (c - p).norm();
      if (d <= best) {
        best = d;
        snapped = c;
      }
    }
    if (out.empty() || (snapped - out.back()).norm() > 0.0) out.push_back(snapped);
  }
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return make_ccw(std::move(out));
}

// Exact intersection of a convex cell with the domain. Cells strictly inside
// the domain with no domain corner inside them are returned unchanged.
Polygon clip_to_domain(const Polygon& cell, const Domain& domain, const BPolygon& bdomain) {
  // A cell with every vertex inside and no edge meeting the boundary is
  // already contained in the domain.
  bool inside = std::all_of(cell.begin(), cell.end(), [&](const Vec2& p) { return domain.sdf(p) < 0.0; });
  for (std::size_t i = 0; inside && i < cell.size(); ++i) {
    const Vec2& a = cell[i];
    const Vec2& b = cell[(i + 1) % cell.size()];
    for (const auto& s : domain.segments()) {
      const bool straddle_ab = orient(a, b, s.a) * orient(a, b, s.b) <= 0.0;
      const bool straddle_s = orient(s.a, s.b, a) * orient(s.a, s.b, b) <= 0.0;
      if (straddle_ab && straddle_s) {
        inside = false;
        break;
      }
    }
  }
  if (inside) return cell;

  BPolygon bcell = to_boost(cell);
  bg::correct(bcell);
  BMulti result;
  bg::intersection(bcell, bdomain, result);
  if (result.size() != 1 || !result.front().inners().empty())
    throw Error(ErrorKind::TessellationFailure, fmt::format("cell clipped to domain has {} pieces", result.size()));
  return snap_vertices(result.front(), clip_candidates(cell, domain), 1e-6 * domain.diameter());
}

struct Generators {
  std::vector<Vec2> points;  // seeds first, then mirrors
  std::vector<int> parent;   // seed index of each mirror, offset by the seed count
};

Generators with_reflections(const std::vector<Vec2>& seeds, const Domain& domain, double alpha) {
  Generators g{seeds, {}};
  const double h = std::sqrt(domain.area() / static_cast<double>(seeds.size()));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Vec2& p = seeds[i];
    const double d = domain.sdf(p);
    if (d <= -alpha * h) continue;
    Vec2 n = domain.sdf_gradient(p);
    const double len = n.norm();
    if (len < 1e-8) continue;
    n /= len;
    const Vec2 r = p - 2.0 * d * n;
    const double dr = domain.sdf(r);
    // Keep only mirrors that land outside at roughly the mirrored distance.
    if (dr > 0.0 && dr >= 0.9 * std::abs(d)) {
      g.points.push_back(r);
      g.parent.push_back(static_cast<int>(i));
    }
  }
  return g;
}

// Part of a mirror's cell that lies inside the domain (it appears where the
// mirror line extends past a re-entrant corner).
BMulti mirror_overlap(const Polygon& cell, const Domain& domain, const BPolygon& bdomain) {
  const bool outside = std::all_of(cell.begin(), cell.end(), [&](const Vec2& p) { return domain.sdf(p) > 0.0; });
  if (outside) {
    bool touches = false;
    for (std::size_t i = 0; !touches && i < cell.size(); ++i) {
      const Vec2& a = cell[i];
      const Vec2& b = cell[(i + 1) % cell.size()];
      for (const auto& s : domain.segments())
        if (orient(a, b, s.a) * orient(a, b, s.b) <= 0.0 && orient(s.a, s.b, a) * orient(s.a, s.b, b) <= 0.0) {
          touches = true;
          break;
        }
    }
    if (!touches) return {};
  }
  BPolygon bcell = to_boost(cell);
  bg::correct(bcell);
  BMulti result;
  bg::intersection(bcell, bdomain, result);
  return result;
}

std::vector<Polygon> bounded_cells_impl(const std::vector<Vec2>& seeds, const Domain& domain, bool reflect,
                                        double alpha) {
  const Generators gens = reflect ? with_reflections(seeds, domain, alpha) : Generators{seeds, {}};
  const GeneratorGrid grid(gens.points);
  const Vec2 pad = Vec2::Constant(domain.diameter());
  const Vec2 lo = domain.bbox_min() - pad, hi = domain.bbox_max() + pad;
  const Polygon box{{lo.x(), lo.y()}, {hi.x(), lo.y()}, {hi.x(), hi.y()}, {lo.x(), hi.y()}};
  const BPolygon bdomain = domain_polygon(domain);
  const int n = static_cast<int>(seeds.size());

  std::vector<Polygon> cells;
  cells.reserve(seeds.size());
  for (int i = 0; i < n; ++i) {
    Polygon cell = voronoi_cell(i, gens.points, grid, box);
    if (cell.size() < 3) throw Error(ErrorKind::TessellationFailure, fmt::format("cell {} vanished", i));
    cells.push_back(clip_to_domain(cell, domain, bdomain));
  }
  const double tiny = 1e-14 * domain.area();
  for (std::size_t k = 0; k < gens.parent.size(); ++k) {
    const Polygon cell = voronoi_cell(n + static_cast<int>(k), gens.points, grid, box);
    if (cell.size() < 3) continue;
    const std::vector<Vec2> cand = clip_candidates(cell, domain);
    for (const auto& raw : mirror_overlap(cell, domain, bdomain)) {
      if (bg::area(raw) <= tiny) continue;
      BPolygon piece = to_boost(snap_vertices(raw, cand, 1e-6 * domain.diameter()));
      bg::correct(piece);
      // Owner: the parent seed if the piece joins its cell, otherwise the
      // nearest seed whose cell it joins.
      BPoint pc(0.0, 0.0);
      bg::centroid(piece, pc);
      const Vec2 c(pc.x(), pc.y());
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double da = (seeds[a] - c).squaredNorm(), db = (seeds[b] - c).squaredNorm();
        return da < db || (da == db && a < b);
      });
      order.insert(order.begin(), gens.parent[k]);
      bool placed = false;
      for (std::size_t q = 0; q < order.size() && q < 16 && !placed; ++q) {
        Polygon& owner = cells[order[q]];
        BPolygon bowner = to_boost(owner);
        bg::correct(bowner);
        BMulti merged;
        bg::union_(bowner, piece, merged);
        if (merged.size() != 1 || !merged.front().inners().empty()) continue;
        std::vector<Vec2> joint = owner;
        for (const auto& p : piece.outer()) joint.emplace_back(p.x(), p.y());
        owner = snap_vertices(merged.front(), joint, 1e-6 * domain.diameter());
        placed = true;
      }
      if (!placed) throw Error(ErrorKind::TessellationFailure, "mirror overlap touches no seed cell");
    }
  }
  double total = 0.0;
  for (const auto& c : cells) total += signed_area(c);
  if (std::abs(total - domain.area()) > 1e-8 * domain.area())
    throw Error(ErrorKind::TessellationFailure,
                fmt::format("cells cover area {} of domain area {}", total, domain.area()));
  return cells;
}

// Clipped cells for every seed. Mirror seeds shape the cells near the
// boundary; if that fails the plain clipped diagram is tried.
std::vector<Polygon> bounded_cells(const std::vector<Vec2>& seeds, const Domain& domain, bool reflect, double alpha) {
  if (seeds.size() < 3) throw Error(ErrorKind::TessellationFailure, "need at least three seeds");
  if (reflect) {
    try {
      return bounded_cells_impl(seeds, domain, true, alpha);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TessellationFailure) throw;
    }
  }
  return bounded_cells_impl(seeds, domain, false, alpha);
}

double snap_coordinate(double v, const std::vector<double>& lines, double tol) {
  auto it = std::lower_bound(lines.begin(), lines.end(), v);
  double best = v, dist = tol;
  if (it != lines.end() && std::abs(*it - v) <= dist) best = *it, dist = std::abs(*it - v);
  if (it != lines.begin() && std::abs(*std::prev(it) - v) <= dist) best = *std::prev(it);
  return best;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Inserts every node lying strictly inside an element edge into that edge.
void repair_t_junctions(PolyMesh& mesh, double tol) {
  const int nv = mesh.num_nodes();
  double cell = 0.0;
  std::size_t count = 0;
  for (const auto& el : mesh.elements)
    for (std::size_t i = 0; i < el.vertices.size(); ++i) {
      cell += (mesh.nodes[el.vertices[i]].pos - mesh.nodes[el.vertices[(i + 1) % el.vertices.size()]].pos).norm();
      ++count;
    }
  cell = std::max(cell / std::max<std::size_t>(count, 1), 1e-12);
  std::unordered_map<long long, std::vector<int>> buckets;
  auto key = [](long i, long j) { return (static_cast<long long>(i) << 32) ^ (j & 0xffffffffLL); };
  for (int i = 0; i < nv; ++i)
    buckets[key(std::floor(mesh.nodes[i].pos.x() / cell), std::floor(mesh.nodes[i].pos.y() / cell))].push_back(i);

  for (auto& el : mesh.elements) {
    std::vector<int> out;
    const auto& v = el.vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const int a = v[k], b = v[(k + 1) % v.size()];
      out.push_back(a);
      const Vec2 pa = mesh.nodes[a].pos, pb = mesh.nodes[b].pos;
      const Vec2 lo = pa.cwiseMin(pb).array() - tol, hi = pa.cwiseMax(pb).array() + tol;
      std::vector<std::pair<double, int>> inner;
      for (long i = std::floor(lo.x() / cell); i <= std::floor(hi.x() / cell); ++i)
        for (long j = std::floor(lo.y() / cell); j <= std::floor(hi.y() / cell); ++j) {
          auto it = buckets.find(key(i, j));
          if (it == buckets.end()) continue;
          for (int id : it->second) {
            if (id == a || id == b) continue;
            const Vec2& p = mesh.nodes[id].pos;
            if (distance_to_segment(p, pa, pb) > tol) continue;
            const double t = (p - pa).dot(pb - pa) / (pb - pa).squaredNorm();
            if (t > 0.0 && t < 1.0) inner.emplace_back(t, id);
          }
        }
      std::sort(inner.begin(), inner.end());
      for (const auto& [t, id] : inner) out.push_back(id);
    }
    el.vertices = std::move(out);
  }
}

PolyMesh assemble(std::vector<Polygon> cells, const Domain& domain, const VoronoiOptions& opt) {
  const double tol = domain.eps();
  if (opt.snap_to_grid) {
    std::vector<double> xs, ys;
    const Vec2 lo = domain.bbox_min(), hi = domain.bbox_max();
    for (int k = 0; k <= opt.grid_nx; ++k) xs.push_back(lo.x() + k * (hi.x() - lo.x()) / opt.grid_nx);
    for (int k = 0; k <= opt.grid_ny; ++k) ys.push_back(lo.y() + k * (hi.y() - lo.y()) / opt.grid_ny);
    for (const auto& c : domain.corners()) xs.push_back(c.x()), ys.push_back(c.y());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    for (auto& cell : cells)
      for (auto& p : cell) p = Vec2(snap_coordinate(p.x(), xs, 1e3 * tol), snap_coordinate(p.y(), ys, 1e3 * tol));
  }

  // Merge coincident vertices across cells.
  std::vector<Vec2> pts;
  std::vector<std::vector<int>> raw(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (const auto& p : cells[c]) {
      raw[c].push_back(static_cast<int>(pts.size()));
      pts.push_back(p);
    }
  // Domain corners are merged in first so they keep their exact positions.
  std::vector<Vec2> all = domain.corners();
  const int n_corner = static_cast<int>(all.size());
  all.insert(all.end(), pts.begin(), pts.end());
  UnionFind uf(static_cast<int>(all.size()));
  std::unordered_map<long long, std::vector<int>> buckets;
  auto key = [](long i, long j) { return (static_cast<long long>(i) << 32) ^ (j & 0xffffffffLL); };
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    const long bx = std::floor(all[i].x() / tol), by = std::floor(all[i].y() / tol);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find(key(bx + dx, by + dy));
        if (it == buckets.end()) continue;
        for (int j : it->second)
          if ((all[i] - all[j]).norm() <= tol) uf.unite(i, j);
      }
    buckets[key(bx, by)].push_back(i);
  }

  PolyMesh mesh;
  std::vector<int> node_of(all.size(), -1);
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    const int root = uf.find(i);
    if (i < n_corner && root == i) continue;  // corner not touched by any cell yet
    if (node_of[root] < 0) {
      node_of[root] = mesh.num_nodes();
      mesh.nodes.push_back({all[root], false, false});
    }
    node_of[i] = node_of[root];
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Element el;
    for (int idx : raw[c]) {
      const int id = node_of[idx + n_corner];
      if (el.vertices.empty() || el.vertices.back() != id) el.vertices.push_back(id);
    }
    while (el.vertices.size() > 1 && el.vertices.front() == el.vertices.back()) el.vertices.pop_back();
    if (el.vertices.size() < 3)
      throw Error(ErrorKind::TessellationFailure, fmt::format("cell {} collapsed during vertex merge", c));
    mesh.elements.push_back(std::move(el));
  }
  repair_t_junctions(mesh, tol);

  for (auto& n : mesh.nodes) {
    n.on_boundary = std::abs(domain.sdf(n.pos)) <= tol;
    for (const auto& c : domain.corners())
      if ((n.pos - c).norm() <= tol) n.is_corner = true;
  }
  build_adjacency(mesh);
  return mesh;
}

bool incident_elements_valid(const PolyMesh& mesh, int node) {
  for (int e : mesh.node_elements[node]) {
    const Polygon poly = mesh.polygon(e);
    if (signed_area(poly) <= 0.0 || !is_simple(poly)) return false;
  }
  return true;
}

}  // namespace

void insert_corner_nodes(PolyMesh& mesh, const Domain& domain, double snap_radius) {
  const double tol = domain.eps();
  for (const auto& c : domain.corners()) {
    bool found = false;
    for (auto& n : mesh.nodes)
      if ((n.pos - c).norm() <= tol) {
        n.is_corner = n.on_boundary = true;
        found = true;
      }
    if (found) continue;

    // Locate the boundary edge carrying the point.
    int owner = -1, a = -1, b = -1;
    for (const auto& loop : boundary_loops(mesh)) {
      for (std::size_t i = 0; i < loop.size() && owner < 0; ++i) {
        const int p = loop[i], q = loop[(i + 1) % loop.size()];
        if (distance_to_segment(c, mesh.nodes[p].pos, mesh.nodes[q].pos) > tol) continue;
        a = p, b = q;
        for (int e : mesh.node_elements[p]) {
          const auto& v = mesh.elements[e].vertices;
          for (std::size_t k = 0; k < v.size(); ++k)
            if (v[k] == p && v[(k + 1) % v.size()] == q) owner = e;
        }
      }
      if (owner >= 0) break;
    }
    if (owner < 0) throw Error(ErrorKind::TessellationFailure, "corner point not on the mesh boundary");

    const double da = (mesh.nodes[a].pos - c).norm(), db = (mesh.nodes[b].pos - c).norm();
    int cand = da <= db ? a : b;
    if (mesh.nodes[cand].is_corner) cand = cand == a ? b : a;
    if (!mesh.nodes[cand].is_corner && (mesh.nodes[cand].pos - c).norm() <= snap_radius) {
      const Vec2 old = mesh.nodes[cand].pos;
      mesh.nodes[cand].pos = c;
      if (incident_elements_valid(mesh, cand)) {
        mesh.nodes[cand].is_corner = mesh.nodes[cand].on_boundary = true;
        continue;
      }
      mesh.nodes[cand].pos = old;
    }
    const int id = mesh.num_nodes();
    mesh.nodes.push_back({c, true, true});
    auto& v = mesh.elements[owner].vertices;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] == a) {
        v.insert(v.begin() + static_cast<long>(k) + 1, id);
        break;
      }
    build_adjacency(mesh);
  }
}

PolyMesh bounded_voronoi(const SeedSet& seeds, const Domain& domain, const VoronoiOptions& options) {
  PolyMesh mesh = assemble(bounded_cells(seeds.seeds, domain, options.reflect, options.alpha), domain, options);
  const double h = std::sqrt(domain.area() / static_cast<double>(seeds.seeds.size()));
  insert_corner_nodes(mesh, domain, 0.5 * h);
  return mesh;
}

double area_cv(const PolyMesh& mesh) {
  const int n = mesh.num_elements();
  if (n == 0) return 0.0;
  std::vector<double> a(n);
  for (int e = 0; e < n; ++e) a[e] = signed_area(mesh.polygon(e));
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  return std::sqrt(var / n) / mean;
}

LloydResult lloyd_smooth(const SeedSet& seeds, const Domain& domain, const LloydOptions& options) {
  LloydResult res;
  res.seeds = seeds;
  const double h = std::sqrt(domain.area() / static_cast<double>(seeds.seeds.size()));
  auto cv_of = [](const std::vector<Polygon>& cells) {
    std::vector<double> a;
    for (const auto& c : cells) a.push_back(signed_area(c));
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(a.size())) / mean;
  };

  VoronoiOptions vopt;
  std::vector<Polygon> cells = bounded_cells(res.seeds.seeds, domain, vopt.reflect, vopt.alpha);
  res.area_cv.push_back(cv_of(cells));
  for (int it = 0; it < options.max_iter; ++it) {
    double moved = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Vec2 c = centroid_area(cells[i]).centroid;
      moved = std::max(moved, (c - res.seeds.seeds[i]).norm());
      res.seeds.seeds[i] = c;
    }
    res.max_movement.push_back(moved);
    ++res.iterations;
    cells = bounded_cells(res.seeds.seeds, domain, vopt.reflect, vopt.alpha);
    res.area_cv.push_back(cv_of(cells));
    if (moved <= options.tol * h) break;
  }
  res.mesh = assemble(std::move(cells), domain, vopt);
  insert_corner_nodes(res.mesh, domain, 0.5 * h);
  return res;
}

PolyMesh structured_mesh(const Domain& domain, int nx, int ny) {
  VoronoiOptions opt;
  opt.snap_to_grid = domain.axis_aligned();
  opt.grid_nx = nx;
  opt.grid_ny = ny;
  return bounded_voronoi(structured_seeds(domain, nx, ny), domain, opt);
}

PolyMesh voronoi_mesh(const Domain& domain, int n_seeds, std::uint64_t rng_seed, const LloydOptions& options) {
  return lloyd_smooth(random_seeds(domain, n_seeds, rng_seed), domain, options).mesh;
}

}  // namespace vemc
