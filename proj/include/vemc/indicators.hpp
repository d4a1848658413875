#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "vemc/material.hpp"
#include "vemc/mesh.hpp"
#include "vemc/vem.hpp"

namespace vemc {

enum class IndicatorKind { displacement, energy };

/// Least-squares linear fit u_k(x) ~ a_k . [1, x - c_x, y - c_y] per
/// displacement component k.
struct PlaneFit {
  Vec2 center = Vec2::Zero();
  Eigen::Matrix<double, 3, 2> coeffs = Eigen::Matrix<double, 3, 2>::Zero();

  Vec2 operator()(const Vec2& x) const;
};

/// Fits the nodal displacements of `nodes`. Throws SingularFit when the
/// nodes are collinear.
PlaneFit fit_displacement(const PolyMesh& mesh, const std::vector<int>& nodes, const Eigen::VectorXd& u);

/// sqrt(sum_j |u_p(x_j) - u_h(x_j)|^2) over the patch nodes.
double displacement_indicator(const PolyMesh& mesh, const Patch& patch, const Eigen::VectorXd& u);

struct RecoveredStress {
  std::vector<Voigt> sigma;  // per node
  std::vector<int> samples;  // sampling points used per node
};

/// Per-node linear least-squares fit of the element stresses sampled at
/// element centroids. The sampling set starts with the incident elements and
/// grows by edge-or-vertex neighbours until it holds three non-collinear
/// centroids. Throws RecoveryFailure when the whole mesh is not enough.
RecoveredStress recover_stress(const PolyMesh& mesh, const SolutionField& solution);

/// Predicted energy error of merging the patch:
/// sqrt(0.5 |E_p| / n_v sum_j (s*_j - s_bar)^T D^-1 (s*_j - s_bar)),
/// s_bar the plain mean of the member element stresses.
double energy_indicator(const PolyMesh& mesh, const Patch& patch, const SolutionField& solution,
                        const RecoveredStress& recovered, const Material& material);

/// Indicator for every node's patch, in node order.
std::vector<double> patch_indicators(const PolyMesh& mesh, const SolutionField& solution, const Material& material,
                                     IndicatorKind kind);

struct ErrorNorm {
  double total = 0.0;
  std::vector<double> element_sq;  // squared per-element contributions; total = sqrt(sum)
};

/// Node-based energy norm of s* - s_h.
ErrorNorm global_energy_error(const PolyMesh& mesh, const SolutionField& solution, const RecoveredStress& recovered,
                              const Material& material);

struct ReferenceValue {
  Vec2 u = Vec2::Zero();
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(i, j) = d u_i / d x_j
};

using ReferenceFn = std::function<ReferenceValue(const Vec2&)>;

enum class GradientComparison { full, symmetric };

/// Node-based H1 error: per element (|E| / n_v) sum_j [|u~ - u_h|^2 +
/// |grad u~ - G_E|^2] at the element nodes, G_E the element-mean gradient
/// (or only symmetric parts when `mode` is symmetric).
ErrorNorm h1_error(const PolyMesh& mesh, const Eigen::VectorXd& u, const ReferenceFn& reference,
                   GradientComparison mode = GradientComparison::full);

}  // namespace vemc
