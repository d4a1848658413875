#include "vemc/material.hpp"

namespace vemc {

Material Material::from_young_poisson(double E, double nu, PlaneMode mode) {
  Material m;
  m.E = E;
  m.nu = nu;
  m.mode = mode;
  m.mu = E / (2.0 * (1.0 + nu));
  m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  // Plane stress uses the reduced first Lame parameter in the same form.
  const double lam = mode == PlaneMode::strain ? m.lambda : 2.0 * m.lambda * m.mu / (m.lambda + 2.0 * m.mu);
  m.D << lam + 2.0 * m.mu, lam, 0.0, lam, lam + 2.0 * m.mu, 0.0, 0.0, 0.0, m.mu;
  return m;
}

}  // namespace vemc
