#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "vemc/bvp.hpp"
#include "vemc/material.hpp"
#include "vemc/mesh.hpp"

namespace vemc {

using Voigt = Eigen::Vector3d;  // (xx, yy, xy); strains carry gamma_xy = 2 eps_xy
using SparseMatrix = Eigen::SparseMatrix<double>;

/// 3 x 2n matrix mapping element dofs (ux0, uy0, ux1, ...) to the Voigt
/// strain of the projected symmetric gradient. Built from edge integrals of
/// the linear traces against the outward normals, scaled by 1/|E|.
/// Throws DegenerateElement for (near) zero area.
Eigen::MatrixXd projection_matrix(const PolyMesh& mesh, int element);

/// Element-mean full displacement gradient G_ij = (1/|E|) int_dE u_i n_j ds.
/// Its symmetric part is the projected strain; the skew part is the mean
/// rotation.
Eigen::Matrix2d mean_gradient(const PolyMesh& mesh, int element, const Eigen::VectorXd& u);

struct ElementStiffness {
  Eigen::MatrixXd Kc;  // |E| P^T D P
  Eigen::MatrixXd Ks;  // mu (I - Dm (Dm^T Dm)^-1 Dm^T)
  Eigen::MatrixXd K;
};

/// Consistency plus stabilisation stiffness. The stabilisation uses the
/// scaled monomials {1, (x-xc)/hE, (y-yc)/hE} per component, with xc the
/// centroid and hE the element diameter. Throws SingularFit when the nodal
/// evaluation matrix is rank deficient.
ElementStiffness element_stiffness(const PolyMesh& mesh, int element, const Material& material);

/// Global stiffness and load before Dirichlet elimination.
struct AssembledSystem {
  SparseMatrix K;
  Eigen::VectorXd f;
  std::vector<int> fixed_dofs;       // sorted
  std::vector<double> fixed_values;  // parallel to fixed_dofs
};

/// Scatter-adds element stiffness, integrates Neumann tractions with the
/// trapezoidal rule on boundary edges and lumps body forces |E|/n_v per
/// node. Collects Dirichlet dofs from nodes lying on the condition
/// segments. Throws UnconstrainedSystem if rigid modes survive the
/// constraints.
AssembledSystem assemble(const PolyMesh& mesh, const Material& material, const BvpSpec& bvp);

/// Sparse SPD solve with a residual check ||K u - f|| <= 1e-10 ||f||.
/// Throws SolverBreakdown on factorisation failure or residual miss.
Eigen::VectorXd solve_spd(const SparseMatrix& K, const Eigen::VectorXd& f);

struct SolutionField {
  Eigen::VectorXd u;                  // 2 n_v, interleaved
  std::vector<Voigt> element_strain;  // projected strain
  std::vector<Voigt> element_stress;  // D * strain
};

/// Symmetric elimination of the Dirichlet dofs, solve, and element fields.
SolutionField solve(const PolyMesh& mesh, const Material& material, const AssembledSystem& system);
SolutionField solve(const PolyMesh& mesh, const Material& material, const BvpSpec& bvp);

/// Element strains and stresses for a given nodal displacement vector.
void compute_element_fields(const PolyMesh& mesh, const Material& material, SolutionField& field);

/// Nodal displacement of node i.
inline Vec2 nodal_displacement(const Eigen::VectorXd& u, int i) {
  return {u[2 * i], u[2 * i + 1]};
}

}  // namespace vemc
