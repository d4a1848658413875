#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vemc/bvp.hpp"
#include "vemc/coarsening.hpp"
#include "vemc/indicators.hpp"
#include "vemc/material.hpp"
#include "vemc/mesh.hpp"
#include "vemc/ref_fem.hpp"

namespace vemc {

enum class Problem { punch, plate_hole, l_domain };
enum class MeshKind { structured, voronoi };

Problem parse_problem(const std::string& name);  // throws UnknownProblem
std::string to_string(Problem p);
MeshKind parse_mesh_kind(const std::string& name);
std::string to_string(MeshKind m);

struct BenchmarkSpec {
  Problem problem = Problem::punch;
  MeshKind mesh = MeshKind::structured;
  int density = 20;  // cells per side (structured) or seed count (voronoi)
  IndicatorKind indicator = IndicatorKind::displacement;
  double threshold = 20.0;  // percent
  int max_steps = 1000;
  std::uint64_t rng_seed = 1;
  std::string output_dir = "out";
  int reference_density = 160;  // 0 disables the H1 error
  std::string cache_dir = "vemc_cache";
  PlaneMode plane = PlaneMode::strain;
  double hole_side = 0.3;
  GradientComparison gradient = GradientComparison::full;
  bool write_files = true;
  bool uniform_curve = true;
};

struct Benchmark {
  BvpSpec bvp;
  Material material;
  std::string key;  // identifies the boundary value problem for caching
};

/// Unit-square punch, plate with a centred square hole, or L of limb
/// thickness 0.25, with E = 1 and nu = 0.3.
Benchmark build_benchmark(const BenchmarkSpec& spec);

/// Initial uniform mesh for the spec (grid or Lloyd-smoothed Voronoi).
PolyMesh initial_mesh(const BenchmarkSpec& spec, const Domain& domain, int density);

struct ConvergenceRecord {
  int step = 0;
  int n_v = 0;
  int n_el = 0;
  int marked = 0;  // of the step applied to this mesh
  int coarsened = 0;
  int aborted = 0;
  double h1_error = 0.0;
  double energy_error = 0.0;
  double wall_time = 0.0;  // seconds since the run started
};

struct UniformRecord {
  int density = 0;
  int n_v = 0;
  int n_el = 0;
  double h1_error = 0.0;
};

struct RunResult {
  std::vector<ConvergenceRecord> records;
  std::vector<UniformRecord> uniform;
  std::vector<std::vector<double>> element_h1;  // per record: sqrt of element contributions
  std::vector<std::vector<Vec2>> outlines;      // per record: boundary corner points
  std::vector<PolyMesh> meshes;                 // per record
  std::string stop_reason;
};

/// Solve -> estimate -> mark -> coarsen until max_steps, no eligible patch,
/// or a step that merges nothing. When write_files is set, writes
/// mesh_step{k}.txt/.vtk per step plus convergence.csv, records.csv,
/// uniform.csv, error_curve.svg and run_meta.json to output_dir.
RunResult run(const BenchmarkSpec& spec);
/// Same with a reference field supplied by the caller.
RunResult run(const BenchmarkSpec& spec, const RefField* reference);

/// Reference field for the spec's problem, via the on-disk cache.
RefField reference_for(const BenchmarkSpec& spec);

}  // namespace vemc
