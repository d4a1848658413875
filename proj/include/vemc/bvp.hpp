#pragma once

#include <array>
#include <functional>
#include <vector>

#include "vemc/domain.hpp"

namespace vemc {

using VectorField = std::function<Vec2(const Vec2&)>;

inline VectorField constant_field(Vec2 v) {
  return [v](const Vec2&) { return v; };
}

/// Prescribed displacement on the nodes of a boundary segment (a point when
/// a == b). Only components with mask[c] set are constrained.
struct DirichletCondition {
  Segment segment;
  std::array<bool, 2> mask{true, true};
  VectorField value = constant_field(Vec2::Zero());
};

/// Traction (force per unit length, unit thickness) on a boundary segment.
struct NeumannCondition {
  Segment segment;
  VectorField traction;
};

struct BvpSpec {
  Domain domain;
  std::vector<DirichletCondition> dirichlet;
  std::vector<NeumannCondition> neumann;
  VectorField body_force;  // empty means zero
};

}  // namespace vemc
