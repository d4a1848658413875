// Adaptive coarsening benchmark driver.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <map>
#include <string>

#include "vemc/benchmark.hpp"
#include "vemc/error.hpp"

int main(int argc, char** argv) {
  using namespace vemc;
  CLI::App app{"First-order VEM elasticity with adaptive mesh coarsening"};

  BenchmarkSpec spec;
  std::string problem = "punch", mesh = "structured", indicator = "db", plane = "strain", gradient = "full";
  bool no_uniform = false, quiet = false;
  app.add_option("--problem", problem, "punch | plate_hole | l_domain")
      ->check(CLI::IsMember({"punch", "plate_hole", "l_domain"}));
  app.add_option("--mesh", mesh, "structured | voronoi")->check(CLI::IsMember({"structured", "voronoi"}));
  app.add_option("--density", spec.density, "cells per side (structured) or seed count (voronoi)")
      ->check(CLI::PositiveNumber);
  app.add_option("--indicator", indicator, "db (displacement) | eb (energy)")->check(CLI::IsMember({"db", "eb"}));
  app.add_option("--threshold", spec.threshold, "coarsening threshold T in percent")->check(CLI::Range(1e-9, 100.0));
  app.add_option("--steps", spec.max_steps, "maximum coarsening steps")->check(CLI::NonNegativeNumber);
  app.add_option("--rng-seed", spec.rng_seed, "seed for Voronoi seed sampling");
  app.add_option("--out", spec.output_dir, "output directory");
  app.add_option("--reference-density", spec.reference_density,
                 "Q2 reference cells per side, multiple of 20 (0 disables the H1 error)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--cache-dir", spec.cache_dir, "reference solution cache");
  app.add_option("--plane", plane, "strain | stress")->check(CLI::IsMember({"strain", "stress"}));
  app.add_option("--hole-side", spec.hole_side, "plate_hole hole side length")->check(CLI::Range(0.05, 0.9));
  app.add_option("--gradient", gradient, "H1 gradient comparison: full | symmetric")
      ->check(CLI::IsMember({"full", "symmetric"}));
  app.add_flag("--no-uniform", no_uniform, "skip the uniform-mesh reference curve");
  app.add_flag("-q,--quiet", quiet, "no per-step output");
  CLI11_PARSE(app, argc, argv);

  spec.problem = parse_problem(problem);
  spec.mesh = parse_mesh_kind(mesh);
  spec.indicator = indicator == "db" ? IndicatorKind::displacement : IndicatorKind::energy;
  spec.plane = plane == "strain" ? PlaneMode::strain : PlaneMode::stress;
  spec.gradient = gradient == "full" ? GradientComparison::full : GradientComparison::symmetric;
  spec.uniform_curve = !no_uniform;

  try {
    const RunResult res = run(spec);
    if (!quiet) {
      fmt::print("{:>5} {:>7} {:>7} {:>7} {:>9} {:>8} {:>14}\n", "step", "n_v", "n_el", "marked", "coarsened",
                 "aborted", "h1_error");
      for (const auto& r : res.records)
        fmt::print("{:>5} {:>7} {:>7} {:>7} {:>9} {:>8} {:>14.6e}\n", r.step, r.n_v, r.n_el, r.marked, r.coarsened,
                   r.aborted, r.h1_error);
      fmt::print("stopped: {}; outputs in {}\n", res.stop_reason, spec.output_dir);
    }
  } catch (const Error& err) {
    fmt::print(stderr, "error ({}): {}\n", to_string(err.kind()), err.what());
    return 2;
  }
  return 0;
}
