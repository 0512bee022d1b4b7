#pragma once

// Planar footprints and exact collision / clearance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "samp/model.hpp"

namespace samp {

struct Circle {
  Vec2 c;
  double r = 0.0;
};

/// Convex polygon, counter-clockwise.
struct ConvexPolygon {
  std::vector<Vec2> v;
};

using Footprint = std::variant<Circle, ConvexPolygon>;

namespace geo {

inline Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = sub(b, a);
  double len2 = dot(ab, ab);
  double t = len2 > 0 ? std::clamp(dot(sub(p, a), ab) / len2, 0.0, 1.0) : 0.0;
  return norm(sub(p, {a.x + t * ab.x, a.y + t * ab.y}));
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(sub(q, p), sub(r, p)); };
  double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

/// Orders vertices counter-clockwise (input must already be convex).
inline ConvexPolygon make_ccw(std::vector<Vec2> v) {
  double area = 0;
  for (std::size_t i = 0; i < v.size(); ++i) area += cross(v[i], v[(i + 1) % v.size()]);
  if (area < 0) std::reverse(v.begin(), v.end());
  return {std::move(v)};
}

/// Strictly inside (boundary excluded).
inline bool point_strictly_inside(Vec2 p, const ConvexPolygon& poly) {
  const auto& v = poly.v;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (cross(sub(v[(i + 1) % v.size()], v[i]), sub(p, v[i])) <= 0) return false;
  return true;
}

inline double point_polygon_boundary_distance(Vec2 p, const ConvexPolygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.v.size(); ++i)
    d = std::min(d, point_segment_distance(p, poly.v[i], poly.v[(i + 1) % poly.v.size()]));
  return d;
}

inline void project(const ConvexPolygon& p, Vec2 axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& q : p.v) {
    double s = dot(q, axis);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
}

inline bool polygons_overlap(const ConvexPolygon& a, const ConvexPolygon& b) {
  for (const ConvexPolygon* p : {&a, &b}) {
    for (std::size_t i = 0; i < p->v.size(); ++i) {
      Vec2 e = sub(p->v[(i + 1) % p->v.size()], p->v[i]);
      Vec2 axis{-e.y, e.x};
      double alo, ahi, blo, bhi;
      project(a, axis, alo, ahi);
      project(b, axis, blo, bhi);
      if (ahi <= blo || bhi <= alo) return false;
    }
  }
  return true;
}

}  // namespace geo

/// Footprint of `o` placed at `q`.
inline Footprint occ(const GeometryModel& g, const Configuration& q) {
  if (const auto* d = std::get_if<Disk>(&g)) return Circle{{q.x, q.y}, d->radius};
  const auto& r = std::get<Rectangle>(g);
  double c = std::cos(q.heading), s = std::sin(q.heading);
  double hw = r.width / 2, hh = r.height / 2;
  ConvexPolygon p;
  p.v.reserve(4);
  for (auto [dx, dy] : {std::pair{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}})
    p.v.push_back({q.x + c * dx - s * dy, q.y + s * dx + c * dy});
  return p;
}

inline Footprint occ(const MovableObject& o, const Configuration& q) { return occ(o.geometry, q); }

/// True iff the interiors intersect; touching boundaries do not collide.
inline bool collides(const Footprint& fa, const Footprint& fb) {
  using namespace geo;
  if (const auto* a = std::get_if<Circle>(&fa)) {
    if (const auto* b = std::get_if<Circle>(&fb)) {
      double dx = a->c.x - b->c.x, dy = a->c.y - b->c.y, rr = a->r + b->r;
      return dx * dx + dy * dy < rr * rr;
    }
    const auto& p = std::get<ConvexPolygon>(fb);
    return point_strictly_inside(a->c, p) || point_polygon_boundary_distance(a->c, p) < a->r;
  }
  const auto& pa = std::get<ConvexPolygon>(fa);
  if (std::holds_alternative<Circle>(fb)) return collides(fb, fa);
  return polygons_overlap(pa, std::get<ConvexPolygon>(fb));
}

/// Euclidean gap between two footprints, 0 when they collide or touch.
inline double clearance(const Footprint& fa, const Footprint& fb) {
  using namespace geo;
  if (collides(fa, fb)) return 0.0;
  if (const auto* a = std::get_if<Circle>(&fa)) {
    if (const auto* b = std::get_if<Circle>(&fb))
      return std::max(0.0, norm(sub(a->c, b->c)) - a->r - b->r);
    return std::max(0.0, point_polygon_boundary_distance(a->c, std::get<ConvexPolygon>(fb)) - a->r);
  }
  if (std::holds_alternative<Circle>(fb)) return clearance(fb, fa);
  const auto& pa = std::get<ConvexPolygon>(fa);
  const auto& pb = std::get<ConvexPolygon>(fb);
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pa.v.size(); ++i)
    for (std::size_t j = 0; j < pb.v.size(); ++j)
      d = std::min(d, segment_segment_distance(pa.v[i], pa.v[(i + 1) % pa.v.size()], pb.v[j],
                                               pb.v[(j + 1) % pb.v.size()]));
  return d;
}

/// Axis-aligned bounding box of a footprint.
inline void footprint_bounds(const Footprint& f, double& xmin, double& ymin, double& xmax,
                             double& ymax) {
  if (const auto* c = std::get_if<Circle>(&f)) {
    xmin = c->c.x - c->r, xmax = c->c.x + c->r, ymin = c->c.y - c->r, ymax = c->c.y + c->r;
    return;
  }
  const auto& p = std::get<ConvexPolygon>(f);
  xmin = ymin = std::numeric_limits<double>::infinity();
  xmax = ymax = -xmin;
  for (const auto& v : p.v) {
    xmin = std::min(xmin, v.x), xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y), ymax = std::max(ymax, v.y);
  }
}

/// Gap between a footprint and the inside of the workspace boundary; negative when it sticks out.
inline double bounds_clearance(const Footprint& f, const Workspace& w) {
  double xmin, ymin, xmax, ymax;
  footprint_bounds(f, xmin, ymin, xmax, ymax);
  return std::min({xmin - w.min.x, ymin - w.min.y, w.max.x - xmax, w.max.y - ymax});
}

inline std::vector<ConvexPolygon> obstacle_polygons(const Workspace& w) {
  std::vector<ConvexPolygon> out;
  for (const auto& p : w.obstacles) out.push_back(geo::make_ccw(p));
  return out;
}

/// Largest distance from the reference point to the footprint boundary.
inline double bounding_radius(const GeometryModel& g) {
  if (const auto* d = std::get_if<Disk>(&g)) return d->radius;
  const auto& r = std::get<Rectangle>(g);
  return std::hypot(r.width, r.height) / 2;
}

}  // namespace samp
