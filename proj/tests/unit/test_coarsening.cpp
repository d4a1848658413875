#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "support.hpp"
#include "vemc/benchmark.hpp"
#include "vemc/coarsening.hpp"
#include "vemc/error.hpp"

using namespace vemc;

namespace {

const Material kMat = Material::from_young_poisson(1.0, 0.3);

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::IoError;
}

std::vector<Vec2> positions(const PolyMesh& m, const std::vector<int>& ids) {
  std::vector<Vec2> out;
  for (int id : ids) out.push_back(m.nodes[id].pos);
  return out;
}

// Element as a vertex cycle starting at its lexicographically smallest point.
std::vector<std::pair<double, double>> canonical(const Polygon& p) {
  std::size_t s = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (std::make_pair(p[i].x(), p[i].y()) < std::make_pair(p[s].x(), p[s].y())) s = i;
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < p.size(); ++k) out.emplace_back(p[(s + k) % p.size()].x(), p[(s + k) % p.size()].y());
  return out;
}

std::set<std::vector<std::pair<double, double>>> element_set(const PolyMesh& m) {
  std::set<std::vector<std::pair<double, double>>> out;
  for (int e = 0; e < m.num_elements(); ++e) out.insert(canonical(m.polygon(e)));
  return out;
}

Eigen::VectorXd nodal(const PolyMesh& m, const std::function<Vec2(const Vec2&)>& f) {
  Eigen::VectorXd d(2 * m.num_nodes());
  for (int i = 0; i < m.num_nodes(); ++i) d.segment<2>(2 * i) = f(m.nodes[i].pos);
  return d;
}

bool strictly_inside_hull(const Vec2& p, const std::vector<Vec2>& pts, double eps) {
  const Polygon h = convex_hull(pts, eps);
  return point_in_polygon(p, h, eps) == Location::inside;
}

// Absorption to a fixpoint, scanning every element of the mesh.
std::set<int> absorbed_oracle(const PolyMesh& m, const Patch& p, double eps) {
  std::set<int> members(p.elements.begin(), p.elements.end());
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<Vec2> pts;
    for (int e : members)
      for (int v : m.elements[e].vertices) pts.push_back(m.nodes[v].pos);
    for (int e = 0; e < m.num_elements(); ++e)
      if (!members.count(e) && strictly_inside_hull(m.geometry(e).centroid, pts, eps)) {
        members.insert(e);
        grew = true;
      }
  }
  return members;
}

void check_post(const PolyMesh& before, const PolyMesh& after, double eps) {
  const auto rep = validate_mesh(after, eps);
  CHECK_MESSAGE(rep.ok, rep.message);
  CHECK(std::abs(after.total_area() - before.total_area()) <= 1e-8 * before.total_area());
  const auto a = boundary_corner_points(before, eps), b = boundary_corner_points(after, eps);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() <= eps);
  CHECK(after.num_nodes() < before.num_nodes());
  CHECK(after.num_elements() < before.num_elements());
}

}  // namespace

TEST_CASE("eligibility") {
  const double eps = 1e-9;
  const PolyMesh g = test::unit_grid(3, 3);
  CHECK(check_eligibility(g, make_patch(g, test::find_node(g, {1, 1})), eps));
  // two squares along the bottom edge: boundary nodes on the hull edge
  const PolyMesh strip = test::unit_grid(3, 2);
  const Patch bottom = make_patch(strip, test::find_node(strip, {1, 0}));
  CHECK(bottom.elements.size() == 2);
  CHECK(check_eligibility(strip, bottom, eps));
  // a single element can not be merged
  CHECK_FALSE(check_eligibility(g, make_patch(g, test::find_node(g, {0, 0})), eps));

  const Domain l = Domain::l_shape(1, 1, 0.25);
  const PolyMesh lm = structured_mesh(l, 4, 4);
  const int re = test::find_node(lm, {0.25, 0.25}, 1e-12);
  REQUIRE(re >= 0);
  CHECK(lm.nodes[re].is_corner);
  CHECK_FALSE(check_eligibility(lm, make_patch(lm, re), l.eps()));

  const Domain plate = Domain::plate_with_hole(1, 1, 0.3);
  const PolyMesh pm = structured_mesh(plate, 20, 20);
  const int hc = test::find_node(pm, {0.35, 0.35}, 1e-12);
  REQUIRE(hc >= 0);
  CHECK_FALSE(check_eligibility(pm, make_patch(pm, hc), plate.eps()));
  CHECK(check_eligibility(pm, make_patch(pm, test::find_node(pm, {0.5, 0.35}, 1e-12)), plate.eps()));
}

TEST_CASE("overlap removal") {
  const PolyMesh g = test::unit_grid(3, 3);
  const int a = test::find_node(g, {1, 1}), b = test::find_node(g, {2, 1});
  auto kept = resolve_overlaps(g, {{b, 2.0, true}, {a, 1.0, true}});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].defining_node == a);

  const PolyMesh g5 = test::unit_grid(5, 5);
  const int p = test::find_node(g5, {1, 1}), q = test::find_node(g5, {3, 3});
  kept = resolve_overlaps(g5, {{q, 1.0, true}, {p, 2.0, true}});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].defining_node == q);
  CHECK(kept[1].defining_node == p);

  // On a grid a node's patch holds exactly the nodes within one step in x
  // and y, which gives a greedy oracle without patches.
  auto oracle = [&](std::vector<PatchRecord> recs) {
    std::stable_sort(recs.begin(), recs.end(), [](const PatchRecord& x, const PatchRecord& y) {
      return x.indicator < y.indicator || (x.indicator == y.indicator && x.defining_node < y.defining_node);
    });
    std::vector<int> out;
    for (const auto& r : recs) {
      const Vec2 x = g5.nodes[r.defining_node].pos;
      bool covered = false;
      for (int k : out) {
        const Vec2 d = (g5.nodes[k].pos - x).cwiseAbs();
        covered = covered || (d.x() <= 1 && d.y() <= 1);
      }
      if (!covered) out.push_back(r.defining_node);
    }
    return out;
  };
  auto ids = [](const std::vector<PatchRecord>& r) {
    std::vector<int> out;
    for (const auto& x : r) out.push_back(x.defining_node);
    return out;
  };

  std::vector<PatchRecord> by_index;
  for (int i = 0; i < g5.num_nodes(); ++i) by_index.push_back({i, double(i), true});
  CHECK(ids(resolve_overlaps(g5, by_index)) == oracle(by_index));

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PatchRecord> recs;
    for (int i = 0; i < g5.num_nodes(); ++i)
      if (rng() % 4 != 0) recs.push_back({i, double(coarse(rng)), true});  // many ties
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto got = resolve_overlaps(g5, recs);
    CHECK(ids(got) == oracle(recs));
    for (std::size_t i = 0; i < got.size(); ++i) {
      const Patch pi = make_patch(g5, got[i].defining_node);
      for (std::size_t j = i + 1; j < got.size(); ++j)
        CHECK_FALSE(std::binary_search(pi.nodes.begin(), pi.nodes.end(), got[j].defining_node));
    }
  }
}

TEST_CASE("threshold marking") {
  std::vector<PatchRecord> recs;
  for (int i = 1; i <= 10; ++i) recs.push_back({i, double(i), true});
  auto marked_ids = [](const std::vector<PatchRecord>& r) {
    std::vector<int> out;
    for (const auto& x : r) out.push_back(x.defining_node);
    return out;
  };
  CHECK(marked_ids(mark_patches(recs, 20)) == std::vector<int>{1, 2});
  CHECK(marked_ids(mark_patches(recs, 25)) == std::vector<int>{1, 2});
  CHECK(marked_ids(mark_patches(recs, 5)) == std::vector<int>{1});
  CHECK(mark_patches(recs, 100).size() == 10);
  CHECK(mark_patches({}, 20).empty());

  std::vector<PatchRecord> flat;
  for (int i = 0; i < 10; ++i) flat.push_back({i, 0.5, true});
  for (double t : {1.0, 20.0, 100.0}) CHECK(mark_patches(flat, t).size() == 10);

  std::vector<PatchRecord> tie{{0, 1, true}, {1, 2, true}, {2, 2, true}, {3, 3, true}, {4, 4, true},
                               {5, 5, true}, {6, 6, true}, {7, 7, true}, {8, 8, true}, {9, 9, true}};
  CHECK(marked_ids(mark_patches(tie, 20)) == std::vector<int>{0, 1, 2});
}

TEST_CASE("edge straightening") {
  SUBCASE("points already on the segment stay") {
    const std::vector<Vec2> c{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    const auto out = straighten_group(c, 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK((out[i] - c[i]).norm() < 1e-15);
  }
  SUBCASE("right angle") {
    const std::vector<Vec2> c{{0, 0}, {0, 1}, {2, 1}};
    const auto out = straighten_group(c, 1e-12);
    CHECK((out[0] - c[0]).norm() == 0.0);
    CHECK((out[2] - c[2]).norm() == 0.0);
    CHECK((out[1] - Vec2(2.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);
  }
  SUBCASE("symmetric zig-zag") {
    const std::vector<Vec2> c{{0, 0}, {0.5, 0.7}, {1.2, -0.3}, {1.8, 0.3}, {2.5, -0.7}, {3, 0}};
    const auto out = straighten_group(c, 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(std::abs(out[i].y()) < 1e-15);
      CHECK(out[i].x() + out[c.size() - 1 - i].x() == doctest::Approx(3.0).epsilon(1e-14));
    }
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(out[i].x() > out[i - 1].x());
  }
  SUBCASE("zero length") {
    const std::vector<Vec2> c{{1, 1}, {1, 1}, {1, 1}};
    CHECK(kind_of([&] { straighten_group(c, 1e-12); }) == ErrorKind::ZeroLengthChain);
  }
}

TEST_CASE("mean value untangling") {
  const Polygon box{{-0.1, -0.1}, {0.1, -0.1}, {0.1, 0.1}, {-0.1, 0.1}};
  std::mt19937_64 rng(5);

  SUBCASE("unmoved neighbours reproduce the node") {
    for (int t = 0; t < 20; ++t) {
      Polygon star = test::random_star(rng, 7);
      std::shuffle(star.begin(), star.end(), rng);
      CHECK((mvc_transfer(Vec2::Zero(), star, star)).norm() < 1e-12);
    }
    // so a node left where it was is still trapped
    const Polygon star = test::regular_polygon(5);
    CHECK(kind_of([&] { untangle_mvc(Vec2::Zero(), star, star, box, 1e-12); }) == ErrorKind::CoarseningAborted);
  }
  SUBCASE("rigid translation") {
    const Vec2 t(0.5, 0.3);
    for (int k = 0; k < 20; ++k) {
      Polygon star = test::random_star(rng, 6);
      std::shuffle(star.begin(), star.end(), rng);
      Polygon moved = star;
      for (auto& p : moved) p += t;
      CHECK((untangle_mvc(Vec2::Zero(), star, moved, box, 1e-12) - t).norm() < 1e-12);
    }
  }
  SUBCASE("hexagon of neighbours") {
    // centre weights are 1/6 each, so the node follows the mean displacement
    Polygon hex = test::regular_polygon(6);
    const std::vector<Vec2> disp{{0.4, 0.1}, {0.3, 0.3}, {0.0, 0.2}, {0.0, 0.0}, {0.1, -0.2}, {0.5, 0.0}};
    Polygon moved = hex;
    Vec2 mean = Vec2::Zero();
    for (std::size_t i = 0; i < 6; ++i) {
      moved[i] += disp[i];
      mean += disp[i] / 6.0;
    }
    // neighbours arrive in arbitrary order
    const std::vector<int> perm{3, 0, 5, 1, 4, 2};
    Polygon hi, mi;
    for (int i : perm) {
      hi.push_back(hex[i]);
      mi.push_back(moved[i]);
    }
    const Vec2 got = untangle_mvc(Vec2::Zero(), hi, mi, box, 1e-12);
    CHECK((got - mean).norm() < 1e-14);
  }
  SUBCASE("fallback and no-op") {
    const std::vector<Vec2> two{{1, 0}, {-1, 0}};
    CHECK(kind_of([&] { mvc_transfer(Vec2(0.05, 0.0), two, two); }) == ErrorKind::TooFewNeighbors);
    CHECK((untangle_mvc(Vec2(0.05, 0.0), two, two, box, 1e-12) - Vec2(0.1, 0.0)).norm() < 1e-15);
    const Vec2 out(0.5, 0.5);
    CHECK(untangle_mvc(out, two, two, box, 1e-12) == out);
  }
}

TEST_CASE("coarsening a 2x2 block") {
  SUBCASE("corner block of a 3x3 grid") {
    PolyMesh m = test::unit_grid(3, 3);
    const PolyMesh before = m;
    const CoarsenResult r = coarsen_patch(m, make_patch(m, test::find_node(m, {1, 1})), 1e-9);
    CHECK(r.merged_elements == std::vector<int>{0, 1, 3, 4});
    CHECK(r.moved_nodes == 0);
    // the centre goes; (1,0) and (0,1) are straight-through points of their
    // only element and go as well; (2,1) and (1,2) stay as hanging nodes
    CHECK(m.num_nodes() == 13);
    CHECK(m.num_elements() == 6);
    for (const Vec2 gone : {Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)}) CHECK(test::find_node(m, gone) < 0);
    CHECK(canonical(m.polygon(r.new_element)) == canonical(Polygon{{0, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}}));
    auto expect = element_set(before);
    for (int e : {0, 1, 3, 4}) expect.erase(canonical(before.polygon(e)));
    expect.insert(canonical(m.polygon(r.new_element)));
    CHECK(element_set(m) == expect);
    CHECK(r.removed_nodes == 3);
    check_post(before, m, 1e-9);
  }
  SUBCASE("interior block keeps every midside node") {
    PolyMesh m = test::unit_grid(4, 4);
    const PolyMesh before = m;
    const CoarsenResult r = coarsen_patch(m, make_patch(m, test::find_node(m, {2, 2})), 1e-9);
    CHECK(r.moved_nodes == 0);
    CHECK(m.num_nodes() == 24);
    CHECK(canonical(m.polygon(r.new_element)) ==
          canonical(Polygon{{1, 1}, {2, 1}, {3, 1}, {3, 2}, {3, 3}, {2, 3}, {1, 3}, {1, 2}}));
    check_post(before, m, 1e-9);
  }
}

TEST_CASE("coarsening non-convex Voronoi patches") {
  const Domain d = Domain::rectangle(1, 1);
  const double eps = d.eps();
  int done = 0, straightened = 0, grew = 0;
  const std::vector<PolyMesh> meshes{voronoi_mesh(d, 80, 4), bounded_voronoi(random_seeds(d, 150, 2), d)};
  for (const PolyMesh& base : meshes) {
    for (int n = 0; n < base.num_nodes(); ++n) {
      if (base.nodes[n].on_boundary) continue;
      const Patch p = make_patch(base, n);
      std::vector<Vec2> pts = positions(base, p.nodes);
      const Polygon hull = convex_hull(pts, eps);
      bool convex_union = true;
      for (int id : p.nodes) {
        if (id == n) continue;
        // a member node strictly inside the hull that is not interior to the patch
        const bool interior = std::all_of(base.node_elements[id].begin(), base.node_elements[id].end(), [&](int e) {
          return std::binary_search(p.elements.begin(), p.elements.end(), e);
        });
        if (!interior && point_in_polygon(base.nodes[id].pos, hull, eps) == Location::inside) convex_union = false;
      }
      if (convex_union) continue;

      PolyMesh m = base;
      CoarsenResult r;
      try {
        r = coarsen_patch(m, p, eps);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CoarseningAborted);
        CHECK(m.num_nodes() == base.num_nodes());
        continue;
      }
      ++done;
      CAPTURE(n);
      const std::set<int> oracle = absorbed_oracle(base, p, eps);
      CHECK(std::set<int>(r.merged_elements.begin(), r.merged_elements.end()) == oracle);
      grew += oracle.size() > p.elements.size();
      straightened += r.moved_nodes > 0;
      check_post(base, m, eps);
      // the new element is convex and spans the hull of the merged nodes
      const Polygon np = m.polygon(r.new_element);
      std::vector<int> merged_nodes = nodes_of(base, r.merged_elements);
      const Polygon final_hull = convex_hull(positions(base, merged_nodes), eps);
      CHECK(signed_area(np) == doctest::Approx(signed_area(final_hull)).epsilon(1e-10));
      for (const auto& v : np) CHECK(distance_to_boundary(v, final_hull) <= eps);
      CHECK(r.merged_elements.size() == static_cast<std::size_t>(base.num_elements() - m.num_elements() + 1));
    }
  }
  CHECK(done >= 5);
  CHECK(straightened >= 1);
  CHECK(grew >= 1);
  MESSAGE("coarsened ", done, " non-convex patches, ", grew, " grew by absorption");
}

TEST_CASE("coarsening step") {
  SUBCASE("grid under a linear field with T = 100") {
    PolyMesh m = test::unit_grid(3, 3);
    const PolyMesh before = m;
    SolutionField s;
    s.u = nodal(m, [](const Vec2& x) { return Vec2(0.01 * x.x(), -0.003 * x.y()); });
    compute_element_fields(m, kMat, s);
    CoarseningConfig cfg;
    cfg.threshold = 100;
    const StepReport rep = coarsen_step(m, s, kMat, cfg, 1e-9);
    CHECK(rep.coarsened >= 1);
    CHECK(rep.nodes_after < rep.nodes_before);
    check_post(before, m, 1e-9);
  }

  SUBCASE("too few elements to rate patches") {
    PolyMesh m = test::unit_grid(2, 1);
    SolutionField s;
    s.u = nodal(m, [](const Vec2& x) { return Vec2(0.01 * x.x() * x.x(), 0.0); });
    compute_element_fields(m, kMat, s);
    CoarseningConfig cfg;
    cfg.indicator = IndicatorKind::energy;
    CHECK(kind_of([&] { coarsen_step(m, s, kMat, cfg, 1e-9); }) == ErrorKind::NoEligiblePatches);
    CHECK(m.num_elements() == 2);
  }

  BenchmarkSpec spec;
  spec.problem = Problem::punch;
  spec.density = 20;
  const Benchmark b = build_benchmark(spec);
  const PolyMesh base = initial_mesh(spec, b.bvp.domain, spec.density);
  const SolutionField sol = solve(base, b.material, b.bvp);
  const double eps = b.bvp.domain.eps();

  SUBCASE("report agrees with the mesh diff") {
    for (auto kind : {IndicatorKind::displacement, IndicatorKind::energy}) {
      PolyMesh m = base;
      CoarseningConfig cfg;
      cfg.indicator = kind;
      cfg.threshold = 20;
      const StepReport rep = coarsen_step(m, sol, b.material, cfg, eps);
      CHECK(rep.nodes_before == base.num_nodes());
      CHECK(rep.elements_before == base.num_elements());
      CHECK(rep.nodes_after == m.num_nodes());
      CHECK(rep.elements_after == m.num_elements());
      CHECK(rep.coarsened + rep.aborted + rep.stale == rep.marked);
      CHECK(static_cast<int>(rep.marked_nodes.size()) == rep.marked);
      CHECK(rep.coarsened > 0);
      CHECK(rep.elements_after <= rep.elements_before - rep.coarsened);
      CHECK(static_cast<int>(rep.indicators.size()) == base.num_nodes());
      check_post(base, m, eps);
      // elements that did not change keep their exact vertex cycles
      const auto old_set = element_set(base);
      int fresh = 0;
      for (const auto& c : element_set(m)) fresh += !old_set.count(c);
      CHECK(fresh >= rep.coarsened);
      // marked nodes are in ascending indicator order
      for (std::size_t i = 1; i < rep.marked_nodes.size(); ++i)
        CHECK(rep.indicators[rep.marked_nodes[i - 1]] <= rep.indicators[rep.marked_nodes[i]]);
    }
  }

  SUBCASE("scaling the load leaves the marked set unchanged") {
    for (auto kind : {IndicatorKind::displacement, IndicatorKind::energy}) {
      for (double c : {0.01, 7.5}) {
        SolutionField scaled = sol;
        scaled.u *= c;
        for (auto& v : scaled.element_strain) v *= c;
        for (auto& v : scaled.element_stress) v *= c;
        PolyMesh m1 = base, m2 = base;
        CoarseningConfig cfg;
        cfg.indicator = kind;
        const StepReport r1 = coarsen_step(m1, sol, b.material, cfg, eps);
        const StepReport r2 = coarsen_step(m2, scaled, b.material, cfg, eps);
        // mirror-image nodes tie up to rounding, so compare as sets
        CHECK(std::set<int>(r1.marked_nodes.begin(), r1.marked_nodes.end()) ==
              std::set<int>(r2.marked_nodes.begin(), r2.marked_nodes.end()));
        CHECK(element_set(m1) == element_set(m2));
      }
    }
  }
}
