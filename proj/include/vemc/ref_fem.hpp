#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vemc/bvp.hpp"
#include "vemc/indicators.hpp"
#include "vemc/material.hpp"

namespace vemc {

/// Biquadratic (Q2) displacement field on a uniform grid of nx x ny cells
/// covering the domain bounding box. Cells outside the domain are inactive.
/// Nodal values live on the (2nx+1) x (2ny+1) lattice of corner, mid-side and
/// centre nodes; inactive lattice nodes hold zero.
class RefField {
 public:
  RefField() = default;
  RefField(Vec2 origin, double hx, double hy, int nx, int ny, std::vector<char> active, Eigen::VectorXd u);

  /// Value and gradient at x. Near cell borders the floor cell is used when
  /// active, otherwise the next active cell within eps. Throws OutOfDomain.
  ReferenceValue evaluate(const Vec2& x) const;
  ReferenceFn as_function() const;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Vec2 origin() const { return origin_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  const std::vector<char>& active() const { return active_; }
  /// Interleaved lattice values, node (i, j) at 2 (j (2nx+1) + i).
  const Eigen::VectorXd& values() const { return u_; }
  Vec2 lattice_point(int i, int j) const;

 private:
  ReferenceValue eval_in_cell(int cx, int cy, const Vec2& x) const;

  Vec2 origin_ = Vec2::Zero();
  double hx_ = 1.0, hy_ = 1.0;
  int nx_ = 0, ny_ = 0;
  std::vector<char> active_;
  Eigen::VectorXd u_;
};

/// Q2 elasticity solve with 3x3 Gauss quadrature on `n` x `n` cells over the
/// domain bounding box. Dirichlet, traction and body-force data follow the
/// same segment matching as the VEM assembly. Throws ReferenceUnavailable if
/// the active cells do not tile the domain exactly (boundary off the grid),
/// a traction segment ends inside a cell side, or a Dirichlet segment ends
/// off the node lattice.
RefField solve_reference(const BvpSpec& bvp, const Material& material, int n);

void save_reference(const RefField& field, const std::string& path);
/// Throws IoError on a missing, truncated or wrong-version file.
RefField load_reference(const std::string& path);

std::uint64_t fnv1a(std::string_view data);

/// Loads `<dir>/ref_<hash(key)>.bin` when present, otherwise solves and
/// stores it. `key` must describe everything the solution depends on.
RefField cached_reference(const BvpSpec& bvp, const Material& material, int n, const std::string& key,
                          const std::string& dir);

}  // namespace vemc
