#pragma once

#include <span>
#include <vector>

#include "vemc/indicators.hpp"
#include "vemc/material.hpp"
#include "vemc/mesh.hpp"
#include "vemc/vem.hpp"

namespace vemc {

struct CoarseningConfig {
  IndicatorKind indicator = IndicatorKind::displacement;
  double threshold = 20.0;  // percent, (0, 100]
  int max_steps = 1000;
};

struct PatchRecord {
  int defining_node = -1;
  double indicator = 0.0;
  bool eligible = false;
};

/// A patch may be merged when it has at least two elements and, if it holds
/// boundary nodes, every one of them lies on its convex hull (within eps),
/// so the merge cannot change the domain outline.
bool check_eligibility(const PolyMesh& mesh, const Patch& patch, double eps);

/// Overlap removal: sort ascending by indicator (ties by node id), then walk
/// the list keeping each head and dropping every later record whose defining
/// node belongs to the kept patch.
std::vector<PatchRecord> resolve_overlaps(const PolyMesh& mesh, std::vector<PatchRecord> records);

/// Threshold marking on an ascending list: k = max(1, floor(T n / 100)),
/// every record with indicator <= that of the k-th record is marked.
std::vector<PatchRecord> mark_patches(const std::vector<PatchRecord>& resolved, double threshold_percent);

/// Straightens the polyline chain[0..n-1] onto the segment chain[0] ->
/// chain[n-1], keeping arc-length proportions. Throws ZeroLengthChain when
/// the chain length is <= eps.
std::vector<Vec2> straighten_group(std::span<const Vec2> chain, double eps);

/// Mean value weights of `node` w.r.t. its neighbours (ordered by angle,
/// initial positions) applied to the projected positions. Throws
/// TooFewNeighbors below three neighbours, OutsidePolygon or OnVertex when
/// the neighbour polygon does not strictly contain the node.
Vec2 mvc_transfer(const Vec2& node, std::span<const Vec2> neighbors_initial, std::span<const Vec2> neighbors_projected);

/// New position of a node trapped inside `hull`: mean value weights of the
/// node w.r.t. its edge neighbours (ordered by angle, initial positions)
/// applied to the neighbours' projected positions. With fewer than three
/// neighbours, or a neighbour polygon that does not contain the node, the
/// node is projected onto the nearest hull edge instead. Nodes not strictly
/// inside the hull are returned unchanged. Throws CoarseningAborted when the
/// result is still strictly inside.
Vec2 untangle_mvc(const Vec2& node, std::span<const Vec2> neighbors_initial, std::span<const Vec2> neighbors_projected,
                  std::span<const Vec2> hull, double eps);

enum class NodeClass { red, blue, green };

struct CoarsenResult {
  CompactionMap map;                 // pre-call ids -> post-call ids
  int new_element = -1;              // post-call id
  std::vector<int> merged_elements;  // pre-call ids, after absorption
  std::vector<int> touched_nodes;    // pre-call ids of every node of a changed element
  int moved_nodes = 0;               // straightened plus untangled
  int removed_nodes = 0;
};

/// Merges the patch (plus any neighbour whose centroid falls inside the
/// growing convex hull) into one convex element. Green boundary chains are
/// straightened onto the hull, trapped neighbour nodes are untangled, the
/// interior nodes are deleted, and collinear non-corner nodes of the new
/// element are dropped. On any failed post-condition throws
/// CoarseningAborted and leaves `mesh` untouched.
CoarsenResult coarsen_patch(PolyMesh& mesh, const Patch& patch, double eps);

struct StepReport {
  int eligible = 0;
  int marked = 0;
  int coarsened = 0;
  int aborted = 0;
  int stale = 0;
  int nodes_before = 0, nodes_after = 0;
  int elements_before = 0, elements_after = 0;
  std::vector<double> indicators;  // per node of the input mesh
  std::vector<int> marked_nodes;   // input-mesh ids, ascending indicator
};

/// One Estimate -> Mark -> Remesh pass. Marked patches are merged in
/// ascending indicator order; a patch sharing a node with anything changed
/// earlier in the step is skipped. Throws NoEligiblePatches when no patch
/// qualifies, including when the energy indicator has too few elements to
/// recover stresses from.
StepReport coarsen_step(PolyMesh& mesh, const SolutionField& solution, const Material& material,
                        const CoarseningConfig& config, double eps);

}  // namespace vemc
