#pragma once

#include <cstdint>
#include <vector>

#include "vemc/domain.hpp"
#include "vemc/mesh.hpp"

namespace vemc {

struct SeedSet {
  std::vector<Vec2> seeds;
};

/// Cell-centre grid over the domain bounding box; centres outside the
/// domain are dropped. Throws EmptySeedSet if none remain.
SeedSet structured_seeds(const Domain& domain, int nx, int ny);

/// Rejection sampling from the bounding box, deterministic in `rng_seed`.
/// Throws SamplingExhausted after 10^6 rejections.
SeedSet random_seeds(const Domain& domain, int n, std::uint64_t rng_seed);

struct VoronoiOptions {
  double alpha = 1.5;         // reflection band, in units of mean seed spacing
  bool reflect = true;        // mirror near-boundary seeds across the boundary
  bool snap_to_grid = false;  // snap vertex coordinates to grid lines (structured)
  int grid_nx = 0, grid_ny = 0;
};

/// Voronoi cells of the seeds bounded by the domain. Near-boundary seeds are
/// mirrored across the nearest boundary feature (SDF gradient), then every
/// cell is clipped exactly against the domain polygon. Vertices are merged,
/// T-junctions repaired and mandatory corner points inserted, so the result
/// is a conforming mesh with one element per seed. Throws
/// TessellationFailure if a cell is empty, split or multiply connected.
PolyMesh bounded_voronoi(const SeedSet& seeds, const Domain& domain, const VoronoiOptions& options = {});

struct LloydOptions {
  int max_iter = 100;
  double tol = 1e-3;  // relative to mean seed spacing
};

struct LloydResult {
  PolyMesh mesh;
  SeedSet seeds;
  int iterations = 0;
  std::vector<double> area_cv;       // coefficient of variation, [0] = input
  std::vector<double> max_movement;  // per iteration, absolute
};

/// Moves seeds to cell centroids and re-tessellates until the largest move
/// is at most tol x spacing or max_iter is reached.
LloydResult lloyd_smooth(const SeedSet& seeds, const Domain& domain, const LloydOptions& options = {});

/// Coefficient of variation of element areas.
double area_cv(const PolyMesh& mesh);

/// Rectangular grid cells (exact grid coordinates) bounded by the domain.
PolyMesh structured_mesh(const Domain& domain, int nx, int ny);

/// Random seeds followed by Lloyd smoothing.
PolyMesh voronoi_mesh(const Domain& domain, int n_seeds, std::uint64_t rng_seed, const LloydOptions& options = {});

/// Makes every domain corner a mesh node flagged is_corner: an existing node
/// within tol is flagged; otherwise the nearest non-corner node of the
/// boundary edge containing the point is moved onto it when it is within
/// `snap_radius` and the move keeps incident elements valid; otherwise the
/// point is inserted into that edge.
void insert_corner_nodes(PolyMesh& mesh, const Domain& domain, double snap_radius);

}  // namespace vemc
