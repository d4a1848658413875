// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
#include <fmt/format.h>

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "support.hpp"
#include "vemc/benchmark.hpp"
#include "vemc/coarsening.hpp"
#include "vemc/error.hpp"
#include "vemc/indicators.hpp"
#include "vemc/vem.hpp"

using namespace vemc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<Problem> kProblems{Problem::punch, Problem::plate_hole, Problem::l_domain};

std::string cache_dir() {
  return (fs::current_path() / "acceptance_cache").string();
}

BenchmarkSpec quiet_spec(Problem p, MeshKind kind, int density) {
  BenchmarkSpec s;
  s.problem = p;
  s.mesh = kind;
  s.density = density;
  s.write_files = false;
  s.uniform_curve = false;
  s.cache_dir = cache_dir();
  return s;
}

// ---------------------------------------------------------------- 1
Vec2 patch_field(const Vec2& x) {
  return {0.3 + 0.1 * x.x() - 0.2 * x.y(), -0.1 + 0.05 * x.x() + 0.4 * x.y()};
}

Outcome patch_test() {
  Outcome o;
  double worst_u = 0, worst_h1 = 0, worst_t = 0;
  Eigen::Matrix2d g;
  g << 0.1, -0.2, 0.05, 0.4;
  const ReferenceFn exact = [g](const Vec2& x) { return ReferenceValue{patch_field(x), g}; };
  for (Problem p : kProblems)
    for (MeshKind kind : {MeshKind::structured, MeshKind::voronoi})
      for (int density : {8, 16}) {
        const auto t0 = Clock::now();
        const BenchmarkSpec spec = quiet_spec(p, kind, density);
        const Domain domain = build_benchmark(spec).bvp.domain;
        const Material mat = build_benchmark(spec).material;
        BvpSpec bvp{domain, {}, {}, {}};
        for (const auto& s : domain.segments()) bvp.dirichlet.push_back({s, {true, true}, patch_field});
        const PolyMesh m = initial_mesh(spec, domain, density);
        const SolutionField sol = solve(m, mat, bvp);
        double err = 0;
        for (int i = 0; i < m.num_nodes(); ++i)
          err = std::max(err, (nodal_displacement(sol.u, i) - patch_field(m.nodes[i].pos)).norm());
        const double h1 = h1_error(m, sol.u, exact).total;
        const double t = seconds_since(t0);
        worst_u = std::max(worst_u, err);
        worst_h1 = std::max(worst_h1, h1);
        worst_t = std::max(worst_t, t);
        if (err > 1e-9 || h1 > 1e-8 || t > 5.0) {
          o.pass = false;
          o.detail += fmt::format(" [{} {} {}: u {:.2e}, H1 {:.2e}, {:.2f}s]", to_string(p), to_string(kind), density,
                                  err, h1, t);
        }
      }
  o.detail =
      fmt::format("12 meshes, max nodal error {:.2e}, max H1 {:.2e}, slowest {:.3f}s", worst_u, worst_h1, worst_t) +
      o.detail;
  return o;
}

// ---------------------------------------------------------------- 2
Outcome stiffness_spectrum() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nv(3, 12);
  const Material mat = Material::from_young_poisson(1.0, 0.3);
  double worst_sym = 0, worst_ks = 0;
  int bad_rank = 0;
  for (int t = 0; t < 200; ++t) {
    const Polygon poly = test::random_star(rng, nv(rng), 0.3);
    PolyMesh m;
    for (const auto& p : poly) m.nodes.push_back({p, false, false});
    Element e;
    for (int i = 0; i < static_cast<int>(poly.size()); ++i) e.vertices.push_back(i);
    m.elements.push_back(e);
    build_adjacency(m);
    const ElementStiffness k = element_stiffness(m, 0, mat);
    worst_sym = std::max(worst_sym, (k.K - k.K.transpose()).norm() / k.K.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (k.K + k.K.transpose()));
    const double top = es.eigenvalues().maxCoeff();
    int small = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) small += es.eigenvalues()[i] < 1e-10 * top;
    bad_rank += small != 3;
    // the six linear fields
    const int n = static_cast<int>(poly.size());
    for (int f = 0; f < 6; ++f) {
      Eigen::VectorXd d(2 * n);
      for (int i = 0; i < n; ++i) {
        const Vec2& x = poly[i];
        const double val = f % 3 == 0 ? 1.0 : (f % 3 == 1 ? x.x() : x.y());
        d[2 * i] = f < 3 ? val : 0.0;
        d[2 * i + 1] = f < 3 ? 0.0 : val;
      }
      worst_ks = std::max(worst_ks, (k.Ks * d).norm() / (mat.mu * d.norm()));
    }
  }
  o.pass = worst_sym <= 1e-13 && bad_rank == 0 && worst_ks <= 1e-12;
  o.detail = fmt::format("200 polygons, max asymmetry {:.2e}, wrong null-space size {}, max |Ks lin| {:.2e}", worst_sym,
                         bad_rank, worst_ks);
  return o;
}

// ---------------------------------------------------------------- 3
Outcome geometry_preservation() {
  Outcome o;
  int runs = 0, meshes = 0;
  double slowest = 0;
  for (Problem p : kProblems)
    for (IndicatorKind ind : {IndicatorKind::displacement, IndicatorKind::energy})
      for (double T : {5.0, 20.0})
        for (auto [kind, density] : {std::pair{MeshKind::structured, 20}, std::pair{MeshKind::voronoi, 400}}) {
          BenchmarkSpec spec = quiet_spec(p, kind, density);
          spec.indicator = ind;
          spec.threshold = T;
          spec.reference_density = 0;
          spec.max_steps = 100000;
          const Domain domain = build_benchmark(spec).bvp.domain;
          const double eps = domain.eps();
          const auto t0 = Clock::now();
          const RunResult res = run(spec, nullptr);
          const double t = seconds_since(t0);
          slowest = std::max(slowest, t);
          ++runs;
          const std::string tag = fmt::format("{} {} {} {} T={}", to_string(p), to_string(kind), density,
                                              ind == IndicatorKind::energy ? "EB" : "DB", T);
          if (t > 60.0) {
            o.pass = false;
            o.detail += fmt::format(" [{}: {:.1f}s]", tag, t);
          }
          const double area0 = res.meshes.front().total_area();
          const auto outline0 = boundary_corner_points(res.meshes.front(), eps);
          for (std::size_t k = 0; k < res.meshes.size(); ++k) {
            ++meshes;
            const PolyMesh& m = res.meshes[k];
            std::string why;
            const auto v = validate_mesh(m, eps);
            if (!v.ok) why = v.message;
            if (std::abs(m.total_area() - area0) > 1e-8 * area0) why = "area changed";
            if (std::abs(area0 - domain.area()) > 1e-8 * domain.area()) why = "initial mesh does not cover the domain";
            const auto outline = boundary_corner_points(m, eps);
            bool same = outline.size() == outline0.size();
            for (std::size_t i = 0; same && i < outline.size(); ++i) same = (outline[i] - outline0[i]).norm() <= eps;
            if (!same) why = "outline changed";
            if (k > 0 && (m.num_nodes() >= res.meshes[k - 1].num_nodes() ||
                          m.num_elements() >= res.meshes[k - 1].num_elements()))
              why = "no reduction";
            if (!why.empty()) {
              o.pass = false;
              o.detail += fmt::format(" [{} step {}: {}]", tag, k, why);
              break;
            }
          }
        }
  o.detail =
      fmt::format("{} runs to exhaustion, {} meshes checked, slowest run {:.2f}s", runs, meshes, slowest) + o.detail;
  return o;
}

// ---------------------------------------------------------------- 4-7
struct CoarseningRuns {
  RunResult punch20, punch5, ldomain20;
};

RunResult trend_run(Problem p, double T, const RefField& ref, bool uniform) {
  BenchmarkSpec spec = quiet_spec(p, MeshKind::structured, 40);
  spec.threshold = T;
  spec.max_steps = 100000;
  spec.uniform_curve = uniform;
  return run(spec, &ref);
}

// Fraction of initial nodes removed by the last record whose H1 error
// stays within `factor` of the initial one.
double removable_fraction(const RunResult& r, double factor) {
  const double e0 = r.records.front().h1_error;
  const double n0 = r.records.front().n_v;
  double frac = 0;
  for (const auto& rec : r.records) {
    if (rec.h1_error > factor * e0) break;
    frac = 1.0 - rec.n_v / n0;
  }
  return frac;
}

Outcome efficiency_trend(const CoarseningRuns& runs) {
  Outcome o;
  const RunResult& r = runs.punch20;
  const double e0 = r.records.front().h1_error, n0 = r.records.front().n_v;
  double worst_growth = 0;
  for (const auto& rec : r.records)
    if (rec.n_v >= 0.6 * n0) worst_growth = std::max(worst_growth, rec.h1_error / e0 - 1.0);
  int compared = 0, worse = 0;
  std::string cmp;
  for (const auto& u : r.uniform)
    for (const auto& rec : r.records)
      if (std::abs(rec.n_v - u.n_v) <= 0.1 * u.n_v) {
        ++compared;
        if (rec.h1_error > u.h1_error) {
          ++worse;
          cmp += fmt::format(" [n_v {} H1 {:.4e} > uniform {} H1 {:.4e}]", rec.n_v, rec.h1_error, u.n_v, u.h1_error);
        }
      }
  // Not part of the verdict: the uniform curve interpolated log-log at each
  // step's own n_v.
  int inside = 0, above = 0;
  for (const auto& rec : r.records)
    for (std::size_t k = 1; k < r.uniform.size(); ++k) {
      const auto &a = r.uniform[k - 1], &b = r.uniform[k];
      if (rec.n_v > a.n_v || rec.n_v < b.n_v) continue;
      const double t = std::log(double(a.n_v) / rec.n_v) / std::log(double(a.n_v) / b.n_v);
      const double ref = std::exp((1 - t) * std::log(a.h1_error) + t * std::log(b.h1_error));
      ++inside;
      above += rec.h1_error > ref;
      break;
    }
  o.pass = worst_growth <= 0.15 && worse == 0;
  o.detail = fmt::format("H1 growth over first 40% removal {:.1f}% (limit 15%); {} steps near uniform data, {} worse",
                         100 * worst_growth, compared, worse) +
             cmp + fmt::format("; against the interpolated uniform curve {} of {} steps lie above it", above, inside);
  return o;
}

Outcome challenge_ordering(const CoarseningRuns& runs) {
  Outcome o;
  const double fl = removable_fraction(runs.ldomain20, 2.0), fp = removable_fraction(runs.punch20, 2.0);
  o.pass = fl > fp;
  o.detail = fmt::format("nodes removable before H1 doubles: l_domain {:.3f}, punch {:.3f}", fl, fp);
  return o;
}

double log_spread(const std::vector<double>& contributions) {
  std::vector<double> v;
  for (double c : contributions)
    if (c > 0 && std::isfinite(c)) v.push_back(std::log10(c));
  double mean = 0;
  for (double x : v) mean += x / v.size();
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean) / v.size();
  return std::sqrt(var);
}

Outcome error_evening(const CoarseningRuns& runs) {
  Outcome o;
  const RunResult& r = runs.punch20;
  const double n0 = r.records.front().n_v;
  std::size_t half = 0;
  while (half < r.records.size() && r.records[half].n_v > 0.5 * n0) ++half;
  if (half == r.records.size()) return {false, "run never removed half of the nodes"};
  // "step 1" read both as the initial mesh and as the mesh after one step
  const double s0 = log_spread(r.element_h1[0]), s1 = log_spread(r.element_h1[1]);
  const double sh = log_spread(r.element_h1[half]);
  o.pass = sh < s0 && sh < s1;
  o.detail =
      fmt::format("std of log10 element H1: initial mesh {:.4f}, after one step {:.4f}, step {} (n_v {} of {}) {:.4f}",
                  s0, s1, half, r.records[half].n_v, static_cast<int>(n0), sh);
  return o;
}

double interpolate(const RunResult& r, double nv) {
  // records run from many nodes to few
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    const double a = r.records[k - 1].n_v, b = r.records[k].n_v;
    if (nv <= a && nv >= b) {
      const double t = a == b ? 0.0 : (a - nv) / (a - b);
      return (1 - t) * r.records[k - 1].h1_error + t * r.records[k].h1_error;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Outcome threshold_insensitivity(const CoarseningRuns& runs) {
  Outcome o;
  const double n0 = runs.punch20.records.front().n_v;
  double worst = 0;
  for (int i = 0; i <= 100; ++i) {
    const double nv = n0 - 0.4 * n0 * i / 100.0;
    const double a = interpolate(runs.punch5, nv), b = interpolate(runs.punch20, nv);
    if (!std::isfinite(a) || !std::isfinite(b)) return {false, fmt::format("curve does not reach n_v {:.0f}", nv)};
    worst = std::max(worst, std::abs(a - b) / b);
  }
  o.pass = worst <= 0.20;
  o.detail =
      fmt::format("max relative H1 gap between T=5% and T=20% over first 40% removal {:.2f}% (limit 20%)", 100 * worst);
  return o;
}

// ---------------------------------------------------------------- 8
Outcome recovery_exactness() {
  Outcome o;
  const Material mat = Material::from_young_poisson(1.0, 0.3);
  const Domain d = Domain::l_shape(1, 1, 0.25);
  const PolyMesh m = voronoi_mesh(d, 200, 3);

  // a solved problem whose exact stress is uniform
  BvpSpec bvp{d, {}, {}, {}};
  for (const auto& s : d.segments()) bvp.dirichlet.push_back({s, {true, true}, patch_field});
  const SolutionField sol = solve(m, mat, bvp);
  const Voigt exact = mat.D * Voigt(0.1, 0.4, -0.2 + 0.05);
  const RecoveredStress rec = recover_stress(m, sol);
  double worst_a = 0, worst_eb = 0;
  for (const auto& s : rec.sigma) worst_a = std::max(worst_a, (s - exact).norm() / exact.norm());
  for (int n = 0; n < m.num_nodes(); ++n)
    worst_eb = std::max(worst_eb, energy_indicator(m, make_patch(m, n), sol, rec, mat));

  // a linear stress field given exactly at the sampling points
  auto linear_stress = [](const Vec2& x) -> Voigt {
    return {0.2 + 0.3 * x.x() - 0.1 * x.y(), -0.4 * x.x() + 0.6 * x.y(), 0.05 + 0.2 * x.x()};
  };
  SolutionField lin;
  lin.u = Eigen::VectorXd::Zero(2 * m.num_nodes());
  for (int e = 0; e < m.num_elements(); ++e) {
    lin.element_stress.push_back(linear_stress(m.geometry(e).centroid));
    lin.element_strain.push_back(mat.compliance() * lin.element_stress.back());
  }
  const RecoveredStress rl = recover_stress(m, lin);
  double worst_b = 0, eb_linear = 0;
  for (int n = 0; n < m.num_nodes(); ++n) {
    const Voigt ex = linear_stress(m.nodes[n].pos);
    worst_b = std::max(worst_b, (rl.sigma[n] - ex).norm() / ex.norm());
    eb_linear = std::max(eb_linear, energy_indicator(m, make_patch(m, n), lin, rl, mat));
  }
  o.pass = worst_a <= 1e-8 && worst_eb <= 1e-10 && worst_b <= 1e-8;
  o.detail = fmt::format(
      "uniform-stress solve: max rel sigma* error {:.2e}, max EB {:.2e}; linear stress at centroids: max rel sigma* "
      "error "
      "{:.2e} (EB there is {:.2e}, nonzero by construction)",
      worst_a, worst_eb, worst_b, eb_linear);
  return o;
}

// ---------------------------------------------------------------- 9
bool left_of_all(const std::vector<Vec2>& pts, const Vec2& a, const Vec2& b) {
  for (const auto& p : pts)
    if (orient(a, b, p) < -1e-12) return false;
  return true;
}

std::set<std::pair<double, double>> cubic_hull(const std::vector<Vec2>& pts) {
  std::set<std::pair<double, double>> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j || (pts[i] - pts[j]).norm() == 0 || !left_of_all(pts, pts[i], pts[j])) continue;
      // hull edge: keep only the extreme points of the supporting line
      const Vec2 dir = (pts[j] - pts[i]).normalized();
      double lo = 1e300, hi = -1e300;
      Vec2 plo, phi;
      for (const auto& p : pts)
        if (std::abs(orient(pts[i], pts[j], p)) <= 1e-12) {
          const double t = dir.dot(p - pts[i]);
          if (t < lo) lo = t, plo = p;
          if (t > hi) hi = t, phi = p;
        }
      out.insert({plo.x(), plo.y()});
      out.insert({phi.x(), phi.y()});
    }
  return out;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(99);

  // overlap removal on a 6x6 grid: a node's patch is its one-step neighbourhood
  const PolyMesh g = test::unit_grid(6, 6);
  int alg_bad = 0;
  std::uniform_int_distribution<int> level(0, 9);
  for (int t = 0; t < 50; ++t) {
    std::vector<PatchRecord> recs;
    for (int i = 0; i < g.num_nodes(); ++i) recs.push_back({i, double(level(rng)), true});
    std::shuffle(recs.begin(), recs.end(), rng);
    std::vector<PatchRecord> sorted = recs;
    std::sort(sorted.begin(), sorted.end(), [](const PatchRecord& a, const PatchRecord& b) {
      return a.indicator != b.indicator ? a.indicator < b.indicator : a.defining_node < b.defining_node;
    });
    std::vector<int> oracle;
    for (const auto& r : sorted) {
      bool covered = false;
      for (int k : oracle) {
        const Vec2 d = (g.nodes[k].pos - g.nodes[r.defining_node].pos).cwiseAbs();
        covered = covered || (d.x() <= 1 && d.y() <= 1);
      }
      if (!covered) oracle.push_back(r.defining_node);
    }
    std::vector<int> got;
    for (const auto& r : resolve_overlaps(g, recs)) got.push_back(r.defining_node);
    alg_bad += got != oracle;
  }

  int hull_bad = 0;
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_int_distribution<int> npts(3, 60);
  for (int t = 0; t < 200; ++t) {
    std::vector<Vec2> pts;
    const int n = npts(rng);
    for (int i = 0; i < n; ++i) {
      // every fourth set on a coarse lattice to force collinear and repeated points
      const Vec2 p(U(rng), U(rng));
      pts.push_back(t % 4 == 0 ? Vec2(std::round(4 * p.x()) / 4, std::round(4 * p.y()) / 4) : p);
    }
    try {
      const Polygon h = convex_hull(pts);
      std::set<std::pair<double, double>> got;
      for (const auto& p : h) got.insert({p.x(), p.y()});
      hull_bad += got != cubic_hull(pts) || got.size() != h.size();
    } catch (const Error& e) {
      // all points collinear is the only allowed failure
      hull_bad += cubic_hull(pts).size() >= 3 || e.kind() != ErrorKind::DegenerateInput;
    }
  }

  double worst_pu = 0, worst_lin = 0;
  int pairs = 0;
  std::uniform_int_distribution<int> nv(3, 12);
  while (pairs < 500) {
    const Polygon poly = test::random_star(rng, nv(rng), 0.3);
    const Vec2 p(U(rng), U(rng));
    if (point_in_polygon(p, poly, 0.0) != Location::inside || distance_to_boundary(p, poly) < 1e-6) continue;
    ++pairs;
    const std::vector<double> w = mean_value_coordinates(p, poly);
    double sum = 0;
    Vec2 rep = Vec2::Zero();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      sum += w[i];
      rep += w[i] * poly[i];
    }
    worst_pu = std::max(worst_pu, std::abs(sum - 1.0));
    worst_lin = std::max(worst_lin, (rep - p).norm());
  }
  o.pass = alg_bad == 0 && hull_bad == 0 && worst_pu <= 1e-10 && worst_lin <= 1e-10;
  o.detail = fmt::format(
      "overlap removal mismatches {}/50, hull mismatches {}/200, MVC over 500 pairs: partition of unity {:.2e}, linear "
      "reproduction {:.2e}",
      alg_bad, hull_bad, worst_pu, worst_lin);
  return o;
}

// ---------------------------------------------------------------- 10
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  int identical = 0, total = 0;
  const std::vector<std::tuple<Problem, MeshKind, int, IndicatorKind>> cases{
      {Problem::punch, MeshKind::voronoi, 300, IndicatorKind::displacement},
      {Problem::l_domain, MeshKind::structured, 20, IndicatorKind::energy},
      {Problem::plate_hole, MeshKind::voronoi, 200, IndicatorKind::energy}};
  for (const auto& [p, kind, density, ind] : cases) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = fs::current_path() / fmt::format("acceptance_det_{}", k);
      fs::remove_all(dir);
      BenchmarkSpec spec = quiet_spec(p, kind, density);
      spec.indicator = ind;
      spec.rng_seed = 17;
      spec.reference_density = 40;
      spec.max_steps = 15;
      spec.write_files = true;
      spec.output_dir = dir.string();
      run(spec);
      const std::string csv = slurp(dir / "convergence.csv");
      fs::remove_all(dir);
      if (k == 0)
        first = csv;
      else {
        ++total;
        identical += csv == first && !csv.empty();
      }
    }
  }
  o.pass = identical == total;
  o.detail = fmt::format("{}/{} repeated runs gave byte-identical convergence.csv", identical, total);
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("CRITERION %d %s: %s (%.1fs) %s\n", id, name, o.pass ? "PASS" : "FAIL", seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "patch test", patch_test);
  report(2, "stiffness spectrum", stiffness_spectrum);
  report(3, "geometry preservation", geometry_preservation);

  CoarseningRuns runs;
  bool runs_ok = true;
  std::string runs_error;
  const auto t0 = Clock::now();
  try {
    const RefField punch_ref = reference_for(quiet_spec(Problem::punch, MeshKind::structured, 40));
    const RefField l_ref = reference_for(quiet_spec(Problem::l_domain, MeshKind::structured, 40));
    runs.punch20 = trend_run(Problem::punch, 20, punch_ref, true);
    runs.punch5 = trend_run(Problem::punch, 5, punch_ref, false);
    runs.ldomain20 = trend_run(Problem::l_domain, 20, l_ref, false);
  } catch (const std::exception& e) {
    runs_ok = false;
    runs_error = e.what();
  }
  std::printf("(coarsening runs for criteria 4-7 with the cached Q2 reference: %.1fs)\n", seconds_since(t0));
  auto guarded = [&](Outcome (*f)(const CoarseningRuns&)) {
    return [&, f]() { return runs_ok ? f(runs) : Outcome{false, "runs failed: " + runs_error}; };
  };
  report(4, "efficiency trend", guarded(efficiency_trend));
  report(5, "challenge ordering", guarded(challenge_ordering));
  report(6, "error evening", guarded(error_evening));
  report(7, "threshold insensitivity", guarded(threshold_insensitivity));
  report(8, "recovery exactness", recovery_exactness);
  report(9, "oracle equivalence", oracle_equivalence);
  report(10, "determinism", determinism);

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
