#include "vemc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "vemc/error.hpp"

namespace vemc {

double signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

CentroidArea centroid_area(std::span<const Vec2> poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) throw Error(ErrorKind::DegeneratePolygon, "fewer than three vertices");
  // Shift to the first vertex so large offsets do not cancel.
  const Vec2 o = poly[0];
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i] - o;
    const Vec2 q = poly[(i + 1) % n] - o;
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  const double area = 0.5 * a2;
  if (std::abs(area) <= tol || area == 0.0) throw Error(ErrorKind::DegeneratePolygon, "polygon area below tolerance");
  return {o + c / (3.0 * a2), area};
}

double diameter(std::span<const Vec2> pts) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d2 = std::max(d2, (pts[i] - pts[j]).squaredNorm());
  return std::sqrt(d2);
}

Polygon make_ccw(Polygon poly) {
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

Polygon convex_hull(std::span<const Vec2> pts, double tol) {
  if (pts.size() < 3) throw Error(ErrorKind::DegenerateInput, "convex hull needs at least three points");
  Polygon p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(),
            [](const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });

  // A middle point is dropped when it lies within tol of the chord (or
  // turns clockwise), so collinear boundary points never become vertices.
  auto keep_turn = [tol](const Vec2& a, const Vec2& b, const Vec2& c) {
    const double len = (c - a).norm();
    return orient(a, b, c) > tol * len;
  };

  Polygon hull;
  hull.reserve(2 * p.size());
  for (const Vec2& q : p) {
    while (hull.size() >= 2 && !keep_turn(hull[hull.size() - 2], hull.back(), q)) hull.pop_back();
    hull.push_back(q);
  }
  const std::size_t lower = hull.size() + 1;
  for (auto it = p.rbegin() + 1; it != p.rend(); ++it) {
    while (hull.size() >= lower && !keep_turn(hull[hull.size() - 2], hull.back(), *it)) hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  if (hull.size() < 3) throw Error(ErrorKind::DegenerateInput, "points are collinear");
  return hull;
}

Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  return (p - closest_point_on_segment(p, a, b)).norm();
}

double distance_to_boundary(const Vec2& p, std::span<const Vec2> poly) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
  return d;
}

Location point_in_polygon(const Vec2& p, std::span<const Vec2> poly, double tol) {
  if (distance_to_boundary(p, poly) <= tol) return Location::on_boundary;
  int winding = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && orient(a, b, p) > 0.0) ++winding;
    } else if (b.y() <= p.y() && orient(a, b, p) < 0.0) {
      --winding;
    }
  }
  return winding != 0 ? Location::inside : Location::outside;
}

std::vector<double> mean_value_coordinates(const Vec2& p, std::span<const Vec2> poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) throw Error(ErrorKind::DegenerateInput, "MVC needs at least three vertices");
  std::vector<Vec2> d(n);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = poly[i] - p;
    r[i] = d[i].norm();
    if (r[i] <= tol) throw Error(ErrorKind::OnVertex, "point coincides with a polygon vertex");
  }
  if (point_in_polygon(p, poly, 0.0) != Location::inside)
    throw Error(ErrorKind::OutsidePolygon, "point is not inside the polygon");

  // tan(alpha_i / 2) for the angle subtended at p by edge (i, i+1).
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double s = cross(d[i], d[j]);
    const double c = d[i].dot(d[j]);
    t[i] = (r[i] * r[j] - c) / s;
  }
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    w[i] = (t[prev] + t[i]) / r[i];
    sum += w[i];
  }
  for (double& wi : w) wi /= sum;
  return w;
}

namespace {

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  return distance_to_segment(c, a, b) <= tol || distance_to_segment(d, a, b) <= tol ||
         distance_to_segment(a, c, d) <= tol || distance_to_segment(b, c, d) <= tol;
}

}  // namespace

bool is_simple(std::span<const Vec2> poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2& c = poly[(i + 2) % n];
    if ((b - a).norm() <= tol) return false;
    // Spike: the polygon doubles back along the same line.
    if (std::abs(orient(a, b, c)) <= tol * (c - a).norm() && (b - a).dot(c - b) < 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n], tol)) return false;
    }
  }
  return true;
}

}  // namespace vemc
