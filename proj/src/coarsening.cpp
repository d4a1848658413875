#include "vemc/coarsening.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "vemc/error.hpp"

namespace vemc {

namespace {

[[noreturn]] void abort_patch(int node, const std::string& why) {
  throw Error(ErrorKind::CoarseningAborted, fmt::format("patch {}: {}", node, why));
}

struct Box {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = Vec2::Constant(-std::numeric_limits<double>::infinity());

  void add(const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool contains(const Vec2& p, double pad) const {
    return p.x() >= lo.x() - pad && p.x() <= hi.x() + pad && p.y() >= lo.y() - pad && p.y() <= hi.y() + pad;
  }
};

Box box_of(std::span<const Vec2> pts) {
  Box b;
  for (const auto& p : pts) b.add(p);
  return b;
}

bool proper_crossing(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
  const double o1 = orient(a, b, c) / std::max((b - a).norm(), 1e-300);
  const double o2 = orient(a, b, d) / std::max((b - a).norm(), 1e-300);
  const double o3 = orient(c, d, a) / std::max((d - c).norm(), 1e-300);
  const double o4 = orient(c, d, b) / std::max((d - c).norm(), 1e-300);
  return ((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) && ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol));
}

// v is a straight-through vertex between p and n.
bool collinear_at(const Vec2& p, const Vec2& v, const Vec2& n, double eps) {
  return distance_to_segment(v, p, n) <= eps && (v - p).dot(n - v) > 0.0;
}

bool same_points(std::vector<Vec2> a, std::vector<Vec2> b, double eps) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] - b[i]).norm() > eps) return false;
  return true;
}

}  // namespace

bool check_eligibility(const PolyMesh& mesh, const Patch& patch, double eps) {
  if (patch.elements.size() < 2) return false;
  std::vector<Vec2> pts;
  bool touches_boundary = false;
  for (int id : patch.nodes) {
    pts.push_back(mesh.nodes[id].pos);
    touches_boundary = touches_boundary || mesh.nodes[id].on_boundary || mesh.nodes[id].is_corner;
  }
  if (!touches_boundary) return true;
  Polygon hull;
  try {
    hull = convex_hull(pts, eps);
  } catch (const Error&) {
    return false;
  }
  for (int id : patch.nodes) {
    const Node& n = mesh.nodes[id];
    if ((n.on_boundary || n.is_corner) && distance_to_boundary(n.pos, hull) > eps) return false;
  }
  return true;
}

std::vector<PatchRecord> resolve_overlaps(const PolyMesh& mesh, std::vector<PatchRecord> records) {
  std::sort(records.begin(), records.end(), [](const PatchRecord& a, const PatchRecord& b) {
    return a.indicator < b.indicator || (a.indicator == b.indicator && a.defining_node < b.defining_node);
  });
  std::vector<PatchRecord> kept;
  std::vector<bool> removed(records.size(), false);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (removed[i]) continue;
    kept.push_back(records[i]);
    const Patch p = make_patch(mesh, records[i].defining_node);
    for (std::size_t j = i + 1; j < records.size(); ++j)
      if (!removed[j] && std::binary_search(p.nodes.begin(), p.nodes.end(), records[j].defining_node))
        removed[j] = true;
  }
  return kept;
}

std::vector<PatchRecord> mark_patches(const std::vector<PatchRecord>& resolved, double threshold_percent) {
  if (resolved.empty()) return {};
  const std::size_t n = resolved.size();
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(threshold_percent / 100.0 * static_cast<double>(n))));
  const double t_val = resolved[std::min(k, n) - 1].indicator;
  std::vector<PatchRecord> marked;
  for (const auto& r : resolved)
    if (r.indicator <= t_val) marked.push_back(r);
  return marked;
}

std::vector<Vec2> straighten_group(std::span<const Vec2> chain, double eps) {
  const std::size_t n = chain.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) s[i] = s[i - 1] + (chain[i] - chain[i - 1]).norm();
  const double total = s.back();
  if (n < 2 || total <= eps) throw Error(ErrorKind::ZeroLengthChain, "straightening chain has zero length");
  const Vec2 a = chain.front(), b = chain.back();
  std::vector<Vec2> out(chain.begin(), chain.end());
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = a + (s[i] / total) * (b - a);
  return out;
}

Vec2 mvc_transfer(const Vec2& node, std::span<const Vec2> neighbors_initial,
                  std::span<const Vec2> neighbors_projected) {
  const std::size_t n = neighbors_initial.size();
  if (n < 3) throw Error(ErrorKind::TooFewNeighbors, fmt::format("{} neighbours", n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> angle(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = neighbors_initial[i] - node;
    angle[i] = std::atan2(d.y(), d.x());
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
  Polygon fict;
  for (std::size_t i : order) fict.push_back(neighbors_initial[i]);
  const std::vector<double> w = mean_value_coordinates(node, fict);
  Vec2 result = Vec2::Zero();
  for (std::size_t k = 0; k < n; ++k) result += w[k] * neighbors_projected[order[k]];
  return result;
}

Vec2 untangle_mvc(const Vec2& node, std::span<const Vec2> neighbors_initial, std::span<const Vec2> neighbors_projected,
                  std::span<const Vec2> hull, double eps) {
  if (point_in_polygon(node, hull, eps) != Location::inside) return node;

  auto nearest_on_hull = [&]() {
    Vec2 best = hull[0];
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec2 c = closest_point_on_segment(node, hull[i], hull[(i + 1) % hull.size()]);
      if ((c - node).norm() < d) {
        d = (c - node).norm();
        best = c;
      }
    }
    return best;
  };

  Vec2 result;
  try {
    result = mvc_transfer(node, neighbors_initial, neighbors_projected);
  } catch (const Error&) {
    result = nearest_on_hull();
  }
  if (point_in_polygon(result, hull, eps) == Location::inside)
    throw Error(ErrorKind::CoarseningAborted, "trapped node is still inside the hull after projection");
  return result;
}

CoarsenResult coarsen_patch(PolyMesh& mesh, const Patch& patch, double eps) {
  const int def = patch.defining_node;
  PolyMesh work = mesh;
  const int ne = work.num_elements();
  const int nv = work.num_nodes();
  const double area_before = work.total_area();
  const std::vector<Vec2> outline_before = boundary_corner_points(work, eps);

  std::vector<Vec2> centroid(ne);
  for (int e = 0; e < ne; ++e) centroid[e] = centroid_area(work.polygon(e)).centroid;

  // (1)-(2) hull and absorption to a fixpoint.
  std::vector<char> merged(ne, 0);
  for (int e : patch.elements) merged[e] = 1;
  std::vector<int> members(patch.elements.begin(), patch.elements.end());
  std::vector<int> mnodes;
  Polygon hull;
  for (;;) {
    mnodes = nodes_of(work, members);
    std::vector<Vec2> pts;
    for (int id : mnodes) pts.push_back(work.nodes[id].pos);
    try {
      hull = convex_hull(pts, eps);
    } catch (const Error& err) {
      abort_patch(def, err.what());
    }
    const Box hb = box_of(hull);
    std::set<int> grow;
    for (int id : mnodes)
      for (int e : work.node_elements[id])
        if (!merged[e] && hb.contains(centroid[e], eps) && point_in_polygon(centroid[e], hull, eps) == Location::inside)
          grow.insert(e);
    if (grow.empty()) break;
    for (int e : grow) {
      merged[e] = 1;
      members.push_back(e);
    }
    std::sort(members.begin(), members.end());
  }

  // (3) classification.
  std::map<int, NodeClass> cls;
  for (int id : mnodes) {
    const Node& n = work.nodes[id];
    bool all_merged = true;
    for (int e : work.node_elements[id]) all_merged = all_merged && merged[e];
    if (!n.on_boundary && all_merged)
      cls[id] = NodeClass::red;
    else if (distance_to_boundary(n.pos, hull) <= eps)
      cls[id] = NodeClass::blue;
    else
      cls[id] = NodeClass::green;
    if (cls[id] == NodeClass::green && (n.on_boundary || n.is_corner)) abort_patch(def, "boundary node inside hull");
  }

  // Boundary loop of the merged region.
  std::set<std::pair<int, int>> directed;
  for (int e : members) {
    const auto& v = work.elements[e].vertices;
    for (std::size_t i = 0; i < v.size(); ++i) directed.emplace(v[i], v[(i + 1) % v.size()]);
  }
  std::map<int, int> next;
  for (const auto& [a, b] : directed) {
    if (directed.count({b, a})) continue;
    if (next.count(a)) abort_patch(def, "merged region is pinched");
    next[a] = b;
  }
  std::vector<int> loop;
  {
    int start = -1;
    for (const auto& [a, b] : next)
      if (cls[a] == NodeClass::blue) {
        start = a;
        break;
      }
    if (start < 0) abort_patch(def, "no boundary node on hull");
    int cur = start;
    do {
      loop.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end() || loop.size() > next.size()) abort_patch(def, "open boundary loop");
      cur = it->second;
    } while (cur != start);
    if (loop.size() != next.size()) abort_patch(def, "merged region is not simply connected");
    std::size_t non_red = 0;
    for (const auto& [id, c] : cls) non_red += c != NodeClass::red;
    if (non_red != loop.size()) abort_patch(def, "interior node survives classification");
  }

  // (4) straighten green chains between consecutive blue nodes.
  const std::vector<Node> initial = work.nodes;
  std::vector<int> moved;
  for (std::size_t i = 0; i < loop.size();) {
    std::size_t j = i + 1;
    while (cls[loop[j % loop.size()]] != NodeClass::blue) ++j;
    if (j > i + 1) {
      std::vector<Vec2> chain;
      for (std::size_t k = i; k <= j; ++k) chain.push_back(work.nodes[loop[k % loop.size()]].pos);
      std::vector<Vec2> straight;
      try {
        straight = straighten_group(chain, eps);
      } catch (const Error& err) {
        abort_patch(def, err.what());
      }
      for (std::size_t k = i + 1; k < j; ++k) {
        work.nodes[loop[k]].pos = straight[k - i];
        moved.push_back(loop[k]);
      }
    }
    i = j;
  }

  // (5) untangle nodes of other elements trapped inside the hull.
  std::vector<char> in_merge(nv, 0);
  for (int id : mnodes) in_merge[id] = 1;
  const Box hb = box_of(hull);
  std::vector<int> yellow;
  for (int id = 0; id < nv; ++id) {
    if (in_merge[id] || work.node_elements[id].empty()) continue;
    const Vec2& p = work.nodes[id].pos;
    if (hb.contains(p, eps) && point_in_polygon(p, hull, eps) == Location::inside) yellow.push_back(id);
  }
  for (int y : yellow) {
    if (work.nodes[y].on_boundary) abort_patch(def, "boundary node trapped inside hull");
    std::vector<Vec2> init, proj;
    for (int nb : edge_neighbors(work, y)) {
      init.push_back(initial[nb].pos);
      proj.push_back(work.nodes[nb].pos);
    }
    try {
      work.nodes[y].pos = untangle_mvc(initial[y].pos, init, proj, hull, eps);
    } catch (const Error& err) {
      abort_patch(def, err.what());
    }
    moved.push_back(y);
  }

  // (6) replace merged elements by the loop polygon.
  std::set<int> touched;
  for (int id : mnodes) touched.insert(id);
  for (int id : moved)
    for (int e : work.node_elements[id])
      for (int v : work.elements[e].vertices) touched.insert(v);

  std::vector<bool> alive(ne + 1, true);
  for (int e : members) alive[e] = false;
  work.elements.push_back(Element{loop});
  CompactionMap map = compact(work, alive);
  const int new_el = map.element_map[ne];

  // (7) drop non-corner nodes of the new element that are straight-through
  // vertices of every element they belong to.
  int removed_unnecessary = 0;
  for (int id : std::vector<int>(work.elements[new_el].vertices)) {
    const Node& n = work.nodes[id];
    if (n.is_corner) continue;
    bool straight = true;
    for (int e : work.node_elements[id]) {
      const auto& v = work.elements[e].vertices;
      const std::size_t k = v.size();
      const std::size_t i = static_cast<std::size_t>(std::find(v.begin(), v.end(), id) - v.begin());
      straight = straight && k > 3 &&
                 collinear_at(work.nodes[v[(i + k - 1) % k]].pos, n.pos, work.nodes[v[(i + 1) % k]].pos, eps);
    }
    if (!straight) continue;
    for (int e : work.node_elements[id]) {
      auto& v = work.elements[e].vertices;
      v.erase(std::find(v.begin(), v.end(), id));
    }
    build_adjacency(work);
    ++removed_unnecessary;
  }
  if (removed_unnecessary > 0) {
    const CompactionMap second = compact(work, std::vector<bool>(work.num_elements(), true));
    for (int& m : map.node_map)
      if (m >= 0) m = second.node_map[m];
  }

  // Post-conditions.
  const Polygon newpoly = work.polygon(new_el);
  if (signed_area(newpoly) <= 0.0 || !is_simple(newpoly, 0.0)) abort_patch(def, "new element is not simple");
  std::set<int> check;
  for (int id : work.elements[new_el].vertices)
    for (int e : work.node_elements[id]) check.insert(e);
  for (int id : moved)
    if (map.node_map[id] >= 0)
      for (int e : work.node_elements[map.node_map[id]]) check.insert(e);
  const Box nb = box_of(newpoly);
  const auto& nv_new = work.elements[new_el].vertices;
  for (int e : check) {
    if (e == new_el) continue;
    const Polygon poly = work.polygon(e);
    if (signed_area(poly) <= 0.0 || !is_simple(poly, 0.0)) abort_patch(def, "neighbour element invalid");
    const auto& v = work.elements[e].vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p = poly[i];
      if (std::find(nv_new.begin(), nv_new.end(), v[i]) == nv_new.end() && nb.contains(p, eps) &&
          point_in_polygon(p, newpoly, eps) != Location::outside)
        abort_patch(def, "neighbour overlaps new element");
      for (std::size_t k = 0; k < newpoly.size(); ++k)
        if (proper_crossing(p, poly[(i + 1) % poly.size()], newpoly[k], newpoly[(k + 1) % newpoly.size()], eps))
          abort_patch(def, "neighbour edge crosses new element");
    }
  }
  const double area_after = work.total_area();
  if (std::abs(area_after - area_before) > 1e-8 * std::abs(area_before)) abort_patch(def, "area not preserved");
  for (int i = 0; i < nv; ++i)
    if (initial[i].on_boundary && map.node_map[i] >= 0 &&
        (work.nodes[map.node_map[i]].pos - initial[i].pos).norm() > 0.0)
      abort_patch(def, "boundary node moved");
  if (!same_points(outline_before, boundary_corner_points(work, eps), eps)) abort_patch(def, "domain outline changed");
  if (work.num_nodes() >= nv || work.num_elements() >= ne) abort_patch(def, "no reduction");

  CoarsenResult res;
  res.map = std::move(map);
  res.new_element = new_el;
  res.merged_elements = members;
  res.touched_nodes.assign(touched.begin(), touched.end());
  res.moved_nodes = static_cast<int>(moved.size());
  res.removed_nodes = nv - work.num_nodes();
  mesh = std::move(work);
  return res;
}

StepReport coarsen_step(PolyMesh& mesh, const SolutionField& solution, const Material& material,
                        const CoarseningConfig& config, double eps) {
  StepReport rep;
  rep.nodes_before = mesh.num_nodes();
  rep.elements_before = mesh.num_elements();
  const int nv = mesh.num_nodes();

  RecoveredStress rec;
  if (config.indicator == IndicatorKind::energy) {
    try {
      rec = recover_stress(mesh, solution);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::RecoveryFailure) throw;
      throw Error(ErrorKind::NoEligiblePatches, fmt::format("no patch can be rated: {}", err.what()));
    }
  }
  rep.indicators.assign(nv, 0.0);
  std::vector<PatchRecord> eligible;
  std::vector<Patch> patches(nv);
  for (int i = 0; i < nv; ++i) {
    patches[i] = make_patch(mesh, i);
    PatchRecord r{i, 0.0, false};
    try {
      r.indicator = config.indicator == IndicatorKind::displacement
                        ? displacement_indicator(mesh, patches[i], solution.u)
                        : energy_indicator(mesh, patches[i], solution, rec, material);
      r.eligible = check_eligibility(mesh, patches[i], eps);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::SingularFit) throw;
    }
    rep.indicators[i] = r.indicator;
    if (r.eligible) eligible.push_back(r);
  }
  rep.eligible = static_cast<int>(eligible.size());
  if (eligible.empty()) throw Error(ErrorKind::NoEligiblePatches, "no eligible patches");

  const auto marked = mark_patches(resolve_overlaps(mesh, eligible), config.threshold);
  rep.marked = static_cast<int>(marked.size());

  // Ids of the input mesh <-> current mesh.
  std::vector<int> to_cur(nv), to_orig(nv);
  std::iota(to_cur.begin(), to_cur.end(), 0);
  std::iota(to_orig.begin(), to_orig.end(), 0);
  std::vector<char> touched(nv, 0);
  for (const auto& r : marked) {
    rep.marked_nodes.push_back(r.defining_node);
    const Patch& p = patches[r.defining_node];
    if (std::any_of(p.nodes.begin(), p.nodes.end(), [&](int id) { return touched[id]; })) {
      ++rep.stale;
      continue;
    }
    const Patch cur = make_patch(mesh, to_cur[r.defining_node]);
    CoarsenResult res;
    try {
      res = coarsen_patch(mesh, cur, eps);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::CoarseningAborted) throw;
      ++rep.aborted;
      continue;
    }
    ++rep.coarsened;
    for (int id : res.touched_nodes) touched[to_orig[id]] = 1;
    std::vector<int> next_orig(mesh.num_nodes(), -1);
    for (int o = 0; o < nv; ++o) {
      if (to_cur[o] < 0) continue;
      to_cur[o] = res.map.node_map[to_cur[o]];
      if (to_cur[o] >= 0) next_orig[to_cur[o]] = o;
    }
    to_orig = std::move(next_orig);
  }
  rep.nodes_after = mesh.num_nodes();
  rep.elements_after = mesh.num_elements();
  return rep;
}

}  // namespace vemc
