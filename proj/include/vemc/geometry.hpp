#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace vemc {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

/// z-component of a x b.
inline double cross(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Twice the signed area of triangle (a, b, c); positive when CCW.
inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

double signed_area(std::span<const Vec2> poly);

struct CentroidArea {
  Vec2 centroid;
  double area;
};

/// Shoelace area and area-weighted centroid. Throws DegeneratePolygon when
/// |area| <= tol.
CentroidArea centroid_area(std::span<const Vec2> poly, double tol = 0.0);

/// Largest pairwise vertex distance.
double diameter(std::span<const Vec2> pts);

/// Returns `poly` in CCW order (reversed when its signed area is negative).
Polygon make_ccw(Polygon poly);

/// Convex hull by monotone chain. Output is CCW starting at the
/// lexicographic minimum; points within `tol` of a hull edge are dropped
/// from the vertex list. Throws DegenerateInput for fewer than three points
/// or an all-collinear set.
Polygon convex_hull(std::span<const Vec2> pts, double tol = 0.0);

enum class Location { inside, on_boundary, outside };

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double distance_to_boundary(const Vec2& p, std::span<const Vec2> poly);

/// Classification of p against a simple closed polygon. Points within `tol`
/// of any edge report on_boundary; otherwise the winding number decides.
Location point_in_polygon(const Vec2& p, std::span<const Vec2> poly, double tol);

/// Floater mean value coordinates of p with respect to `poly`. Throws OnVertex
/// when p is within `tol` of a vertex and OutsidePolygon when p is not inside.
std::vector<double> mean_value_coordinates(const Vec2& p, std::span<const Vec2> poly, double tol = 1e-14);

/// True when no two non-adjacent edges intersect and no vertex repeats.
bool is_simple(std::span<const Vec2> poly, double tol = 0.0);

/// Closest point to p on segment [a, b].
Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace vemc
