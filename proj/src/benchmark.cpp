#include "vemc/benchmark.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "vemc/error.hpp"
#include "vemc/mesh_gen.hpp"
#include "vemc/mesh_io.hpp"
#include "vemc/vem.hpp"

namespace vemc {

namespace fs = std::filesystem;

Problem parse_problem(const std::string& name) {
  if (name == "punch") return Problem::punch;
  if (name == "plate_hole") return Problem::plate_hole;
  if (name == "l_domain") return Problem::l_domain;
  throw Error(ErrorKind::UnknownProblem, "unknown problem '" + name + "'");
}

std::string to_string(Problem p) {
  switch (p) {
    case Problem::punch:
      return "punch";
    case Problem::plate_hole:
      return "plate_hole";
    case Problem::l_domain:
      return "l_domain";
  }
  return "?";
}

MeshKind parse_mesh_kind(const std::string& name) {
  if (name == "structured") return MeshKind::structured;
  if (name == "voronoi") return MeshKind::voronoi;
  throw Error(ErrorKind::UnknownProblem, "unknown mesh kind '" + name + "'");
}

std::string to_string(MeshKind m) {
  return m == MeshKind::structured ? "structured" : "voronoi";
}

Benchmark build_benchmark(const BenchmarkSpec& spec) {
  Benchmark b{BvpSpec{Domain::rectangle(1.0, 1.0), {}, {}, {}}, Material::from_young_poisson(1.0, 0.3, spec.plane), ""};
  auto fix = [](Vec2 a, Vec2 c, bool ux, bool uy, Vec2 value = Vec2::Zero()) {
    return DirichletCondition{{a, c}, {ux, uy}, constant_field(value)};
  };
  switch (spec.problem) {
    case Problem::punch: {
      // Load edges of the punch and the fixed bottom midpoint are mandatory nodes.
      b.bvp.domain = Domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}, {{0.4, 1.0}, {0.6, 1.0}, {0.5, 0.0}});
      b.bvp.dirichlet = {fix({0, 0}, {1, 0}, false, true), fix({0.5, 0}, {0.5, 0}, true, true),
                         fix({0, 1}, {1, 1}, true, false)};
      b.bvp.neumann = {{{{0.4, 1.0}, {0.6, 1.0}}, constant_field({0.0, -0.675})}};
      b.key = "punch";
      break;
    }
    case Problem::plate_hole: {
      b.bvp.domain = Domain::plate_with_hole(1.0, 1.0, spec.hole_side);
      b.bvp.dirichlet = {fix({0, 0}, {0, 1}, true, false), fix({0, 0}, {0, 0}, true, true)};
      b.bvp.neumann = {{{{1, 0}, {1, 1}}, constant_field({0.2, 0.0})}};
      b.key = fmt::format("plate_hole|side={:.17g}", spec.hole_side);
      break;
    }
    case Problem::l_domain: {
      b.bvp.domain = Domain::l_shape(1.0, 1.0, 0.25);
      b.bvp.dirichlet = {fix({0, 0}, {1, 0}, false, true), fix({0, 0}, {0, 1}, true, false),
                         fix({0, 0}, {0, 0}, true, true), fix({0, 1}, {0.25, 1}, false, true, {0.0, 0.5}),
                         fix({1, 0}, {1, 0.25}, true, false, {0.5, 0.0})};
      b.key = "l_domain";
      break;
    }
  }
  return b;
}

PolyMesh initial_mesh(const BenchmarkSpec& spec, const Domain& domain, int density) {
  if (spec.mesh == MeshKind::structured) return structured_mesh(domain, density, density);
  return voronoi_mesh(domain, density, spec.rng_seed);
}

RefField reference_for(const BenchmarkSpec& spec) {
  const Benchmark b = build_benchmark(spec);
  return cached_reference(b.bvp, b.material, spec.reference_density, b.key, spec.cache_dir);
}

namespace {

std::vector<double> safe_indicators(const PolyMesh& mesh, const SolutionField& sol, const Material& mat,
                                    IndicatorKind kind) {
  std::vector<double> out(mesh.num_nodes(), 0.0);
  RecoveredStress rec;
  if (kind == IndicatorKind::energy) {
    try {
      rec = recover_stress(mesh, sol);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::RecoveryFailure) throw;
      return std::vector<double>(mesh.num_nodes(), std::numeric_limits<double>::quiet_NaN());
    }
  }
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Patch p = make_patch(mesh, i);
    try {
      out[i] = kind == IndicatorKind::displacement ? displacement_indicator(mesh, p, sol.u)
                                                   : energy_indicator(mesh, p, sol, rec, mat);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::SingularFit) throw;
    }
  }
  return out;
}

std::string number(double v) {
  return std::isfinite(v) ? fmt::format("{:.10e}", v) : std::string("nan");
}

void write_svg(const fs::path& path, const RunResult& res) {
  struct Pt {
    double x, y;
  };
  std::vector<Pt> coarse, uni;
  for (const auto& r : res.records)
    if (std::isfinite(r.h1_error) && r.h1_error > 0) coarse.push_back({std::log10(r.n_v), std::log10(r.h1_error)});
  for (const auto& u : res.uniform)
    if (std::isfinite(u.h1_error) && u.h1_error > 0) uni.push_back({std::log10(u.n_v), std::log10(u.h1_error)});
  if (coarse.empty()) return;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto* set : {&coarse, &uni})
    for (const auto& p : *set) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
  if (x1 - x0 < 1e-9) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) y1 = y0 + 1;
  const double W = 640, H = 480, m = 60;
  auto sx = [&](double x) { return m + (x - x0) / (x1 - x0) * (W - 2 * m); };
  auto sy = [&](double y) { return H - m - (y - y0) / (y1 - y0) * (H - 2 * m); };
  std::ofstream os(path);
  fmt::print(os, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", W, H);
  fmt::print(os, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  fmt::print(os, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", m, H - m, W - m);
  fmt::print(os, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", m, H - m, m);
  fmt::print(os, "<text x=\"{}\" y=\"{}\" font-size=\"14\">log10 n_v [{:.2f}, {:.2f}]</text>\n", W / 2 - 80, H - 20, x0,
             x1);
  fmt::print(os, "<text x=\"10\" y=\"30\" font-size=\"14\">log10 H1 error [{:.2f}, {:.2f}]</text>\n", y0, y1);
  auto polyline = [&](const std::vector<Pt>& pts, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : pts) fmt::print(os, "{:.2f},{:.2f} ", sx(p.x), sy(p.y));
    os << "\"/>\n";
    for (const auto& p : pts)
      fmt::print(os, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(p.x), sy(p.y), color);
  };
  polyline(coarse, "#c0392b");
  if (!uni.empty()) polyline(uni, "#2c3e50");
  fmt::print(os, "<text x=\"{}\" y=\"30\" fill=\"#c0392b\" font-size=\"14\">coarsened</text>\n", W - 160);
  fmt::print(os, "<text x=\"{}\" y=\"50\" fill=\"#2c3e50\" font-size=\"14\">uniform</text>\n", W - 160);
  os << "</svg>\n";
}

}  // namespace

RunResult run(const BenchmarkSpec& spec) {
  if (spec.reference_density > 0) {
    const RefField ref = reference_for(spec);
    return run(spec, &ref);
  }
  return run(spec, nullptr);
}

RunResult run(const BenchmarkSpec& spec, const RefField* reference) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const Benchmark bm = build_benchmark(spec);
  const Domain& domain = bm.bvp.domain;
  const double eps = domain.eps();
  const fs::path dir(spec.output_dir);
  if (spec.write_files) fs::create_directories(dir);

  ReferenceFn ref_fn;
  if (reference) ref_fn = reference->as_function();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  CoarseningConfig cfg;
  cfg.indicator = spec.indicator;
  cfg.threshold = spec.threshold;
  cfg.max_steps = spec.max_steps;

  RunResult res;
  PolyMesh mesh = initial_mesh(spec, domain, spec.density);

  std::ofstream conv;
  if (spec.write_files) {
    conv.open(dir / "convergence.csv");
    conv << "step,n_v,n_el,marked,coarsened,aborted,h1_error\n";
  }

  for (int step = 0;; ++step) {
    const SolutionField sol = solve(mesh, bm.material, bm.bvp);
    ConvergenceRecord rec;
    rec.step = step;
    rec.n_v = mesh.num_nodes();
    rec.n_el = mesh.num_elements();
    std::vector<double> el_h1(mesh.num_elements(), nan);
    rec.h1_error = nan;
    if (ref_fn) {
      const ErrorNorm h1 = h1_error(mesh, sol.u, ref_fn, spec.gradient);
      rec.h1_error = h1.total;
      for (int e = 0; e < mesh.num_elements(); ++e) el_h1[e] = std::sqrt(h1.element_sq[e]);
    }
    rec.energy_error = nan;
    try {
      rec.energy_error = global_energy_error(mesh, sol, recover_stress(mesh, sol), bm.material).total;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::RecoveryFailure) throw;
    }

    const PolyMesh before = mesh;
    std::vector<double> indicators;
    bool stop = false;
    if (step >= spec.max_steps) {
      res.stop_reason = "max_steps";
      stop = true;
    } else {
      try {
        const StepReport rep = coarsen_step(mesh, sol, bm.material, cfg, eps);
        rec.marked = rep.marked;
        rec.coarsened = rep.coarsened;
        rec.aborted = rep.aborted;
        indicators = rep.indicators;
        if (rep.coarsened == 0) {
          res.stop_reason = "no_patch_coarsened";
          stop = true;
        }
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::NoEligiblePatches) throw;
        res.stop_reason = "no_eligible_patches";
        stop = true;
      }
    }
    if (indicators.empty()) indicators = safe_indicators(before, sol, bm.material, spec.indicator);
    rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();

    res.records.push_back(rec);
    res.element_h1.push_back(el_h1);
    res.outlines.push_back(boundary_corner_points(before, eps));
    res.meshes.push_back(before);

    if (spec.write_files) {
      write_mesh((dir / fmt::format("mesh_step{}.txt", step)).string(), before);
      VtkFields f;
      std::vector<Vec2> u(before.num_nodes());
      for (int i = 0; i < before.num_nodes(); ++i) u[i] = nodal_displacement(sol.u, i);
      f.point_vectors.emplace_back("displacement", std::move(u));
      f.point_scalars.emplace_back("indicator", indicators);
      std::vector<double> log_h1(el_h1.size());
      for (std::size_t e = 0; e < el_h1.size(); ++e) log_h1[e] = el_h1[e] > 0 ? std::log10(el_h1[e]) : -300.0;
      f.cell_scalars.emplace_back("h1_error", el_h1);
      f.cell_scalars.emplace_back("log10_h1_error", std::move(log_h1));
      write_vtk((dir / fmt::format("mesh_step{}.vtk", step)).string(), before, f,
                fmt::format("{} step {}", to_string(spec.problem), step));
      fmt::print(conv, "{},{},{},{},{},{},{}\n", rec.step, rec.n_v, rec.n_el, rec.marked, rec.coarsened, rec.aborted,
                 number(rec.h1_error));
      conv.flush();
    }
    if (stop) break;
  }

  if (spec.uniform_curve && ref_fn) {
    const int floor_density = spec.mesh == MeshKind::structured ? 4 : 16;
    for (int d = spec.density; d >= floor_density; d /= 2) {
      const PolyMesh m = initial_mesh(spec, domain, d);
      const SolutionField s = solve(m, bm.material, bm.bvp);
      res.uniform.push_back({d, m.num_nodes(), m.num_elements(), h1_error(m, s.u, ref_fn, spec.gradient).total});
    }
  }

  if (spec.write_files) {
    std::ofstream rec_os(dir / "records.csv");
    rec_os << "step,n_v,n_el,h1_error,energy_error,wall_time\n";
    for (const auto& r : res.records)
      fmt::print(rec_os, "{},{},{},{},{},{:.3f}\n", r.step, r.n_v, r.n_el, number(r.h1_error), number(r.energy_error),
                 r.wall_time);
    std::ofstream uni_os(dir / "uniform.csv");
    uni_os << "density,n_v,n_el,h1_error\n";
    for (const auto& u : res.uniform) fmt::print(uni_os, "{},{},{},{}\n", u.density, u.n_v, u.n_el, number(u.h1_error));
    write_svg(dir / "error_curve.svg", res);

    nlohmann::json meta;
    meta["problem"] = to_string(spec.problem);
    meta["mesh"] = to_string(spec.mesh);
    meta["density"] = spec.density;
    meta["indicator"] = spec.indicator == IndicatorKind::displacement ? "db" : "eb";
    meta["threshold_percent"] = spec.threshold;
    meta["max_steps"] = spec.max_steps;
    meta["rng_seed"] = spec.rng_seed;
    meta["reference_density"] = spec.reference_density;
    meta["plane"] = spec.plane == PlaneMode::strain ? "strain" : "stress";
    meta["gradient_comparison"] = spec.gradient == GradientComparison::full ? "full" : "symmetric";
    if (spec.problem == Problem::plate_hole) meta["hole_side"] = spec.hole_side;
    meta["material"] = {{"E", bm.material.E}, {"nu", bm.material.nu}};
    const LloydOptions lloyd;
    meta["lloyd"] = {{"max_iter", lloyd.max_iter}, {"tol", lloyd.tol}};
    meta["geometric_tolerance"] = eps;
    meta["steps"] = res.records.size();
    meta["stop_reason"] = res.stop_reason;
    std::ofstream meta_os(dir / "run_meta.json");
    meta_os << meta.dump(2) << "\n";
  }
  return res;
}

}  // namespace vemc
