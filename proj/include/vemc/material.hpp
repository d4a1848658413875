#pragma once

#include <Eigen/Dense>

namespace vemc {

enum class PlaneMode { strain, stress };

/// Isotropic linear elastic material. D maps Voigt strain
/// (eps_xx, eps_yy, gamma_xy = 2 eps_xy) to Voigt stress (s_xx, s_yy, s_xy).
struct Material {
  double E = 1.0;
  double nu = 0.3;
  double lambda = 0.0;
  double mu = 0.0;
  PlaneMode mode = PlaneMode::strain;
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();

  static Material from_young_poisson(double E, double nu, PlaneMode mode = PlaneMode::strain);

  /// Compliance D^-1.
  Eigen::Matrix3d compliance() const { return D.inverse(); }
};

}  // namespace vemc
