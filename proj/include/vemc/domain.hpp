#pragma once

#include <vector>

#include "vemc/geometry.hpp"

namespace vemc {

struct Segment {
  Vec2 a, b;
};

/// Polygonal problem domain: an outer CCW boundary with optional CW holes.
/// The signed distance is exact (distance to the nearest boundary segment,
/// negative inside).
class Domain {
 public:
  Domain(Polygon outer, std::vector<Polygon> holes = {}, std::vector<Vec2> extra_corners = {});

  static Domain rectangle(double width, double height);
  /// L of the given limb thickness occupying [0,w]x[0,t] U [0,t]x[0,h].
  static Domain l_shape(double width, double height, double thickness);
  /// Rectangle with a centred square hole of side `hole_side`.
  static Domain plate_with_hole(double width, double height, double hole_side);

  double sdf(const Vec2& p) const;
  /// Central-difference gradient of sdf, step 1e-6 x diameter.
  Vec2 sdf_gradient(const Vec2& p) const;
  bool contains(const Vec2& p) const { return sdf(p) < 0.0; }

  const Polygon& outer() const { return outer_; }
  const std::vector<Polygon>& holes() const { return holes_; }
  /// Polygon vertices plus any extra mandatory boundary points.
  const std::vector<Vec2>& corners() const { return corners_; }
  const std::vector<Segment>& segments() const { return segments_; }
  Vec2 bbox_min() const { return lo_; }
  Vec2 bbox_max() const { return hi_; }
  double diameter() const { return (hi_ - lo_).norm(); }
  /// Global geometric tolerance, 1e-9 x diameter.
  double eps() const { return 1e-9 * diameter(); }
  double area() const;
  /// Whether every boundary segment is horizontal or vertical.
  bool axis_aligned() const;
  /// Index of the boundary segment containing p within tol, or -1.
  int segment_containing(const Vec2& p, double tol) const;

 private:
  Polygon outer_;
  std::vector<Polygon> holes_;
  std::vector<Vec2> corners_;
  std::vector<Segment> segments_;
  Vec2 lo_, hi_;
};

}  // namespace vemc
