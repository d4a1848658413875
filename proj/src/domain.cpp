#include "vemc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vemc {

Domain::Domain(Polygon outer, std::vector<Polygon> holes, std::vector<Vec2> extra_corners)
    : outer_(make_ccw(std::move(outer))), holes_(std::move(holes)) {
  for (auto& h : holes_) {
    h = make_ccw(std::move(h));
    std::reverse(h.begin(), h.end());
  }
  auto add_ring = [this](const Polygon& ring) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      segments_.push_back({ring[i], ring[(i + 1) % ring.size()]});
      corners_.push_back(ring[i]);
    }
  };
  add_ring(outer_);
  for (const auto& h : holes_) add_ring(h);
  for (const auto& c : extra_corners) corners_.push_back(c);

  lo_ = hi_ = outer_.front();
  for (const auto& p : outer_) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
}

Domain Domain::rectangle(double w, double h) {
  return Domain({{0, 0}, {w, 0}, {w, h}, {0, h}});
}

Domain Domain::l_shape(double w, double h, double t) {
  return Domain({{0, 0}, {w, 0}, {w, t}, {t, t}, {t, h}, {0, h}});
}

Domain Domain::plate_with_hole(double w, double h, double side) {
  const double x0 = 0.5 * (w - side), x1 = 0.5 * (w + side);
  const double y0 = 0.5 * (h - side), y1 = 0.5 * (h + side);
  return Domain({{0, 0}, {w, 0}, {w, h}, {0, h}}, {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}});
}

double Domain::sdf(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) d = std::min(d, distance_to_segment(p, s.a, s.b));
  bool inside = point_in_polygon(p, outer_, 0.0) == Location::inside;
  for (const auto& h : holes_)
    if (inside && point_in_polygon(p, h, 0.0) == Location::inside) inside = false;
  return inside ? -d : d;
}

Vec2 Domain::sdf_gradient(const Vec2& p) const {
  const double step = 1e-6 * diameter();
  const Vec2 dx(step, 0.0), dy(0.0, step);
  return Vec2(sdf(p + dx) - sdf(p - dx), sdf(p + dy) - sdf(p - dy)) / (2.0 * step);
}

double Domain::area() const {
  double a = signed_area(outer_);
  for (const auto& h : holes_) a += signed_area(h);  // holes are CW
  return a;
}

bool Domain::axis_aligned() const {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const Segment& s) { return s.a.x() == s.b.x() || s.a.y() == s.b.y(); });
}

int Domain::segment_containing(const Vec2& p, double tol) const {
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (distance_to_segment(p, segments_[i].a, segments_[i].b) <= tol) return static_cast<int>(i);
  return -1;
}

}  // namespace vemc
