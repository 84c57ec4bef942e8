#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace polymg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

/// Signed area of a polygon given as a vertex loop (positive if CCW).
inline double signed_area(std::span<const Point2> poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    s += cross(a, b);
  }
  return 0.5 * s;
}

/// Area-weighted centroid of a simple polygon.
inline Point2 polygon_centroid(std::span<const Point2> poly) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  a *= 0.5;
  if (std::abs(a) < 1e-300) {
    // fall back to the vertex mean for degenerate loops
    Point2 m{0, 0};
    for (const Point2& p : poly) m = m + p;
    return {m.x / double(n), m.y / double(n)};
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

/// Max pairwise vertex distance.
inline double polygon_diameter(std::span<const Point2> poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j)
      d = std::max(d, dist(poly[i], poly[j]));
  return d;
}

inline bool polygon_is_convex(std::span<const Point2> poly, double tol = 1e-14) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const Point2 c = poly[(i + 2) % n];
    if (cross(b - a, c - b) < -tol) return false;
  }
  return true;
}

/// Winding-number point-in-polygon test (boundary points unspecified).
inline bool point_in_polygon(Point2 p, std::span<const Point2> poly) {
  int winding = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) ++winding;
    } else {
      if (b.y <= p.y && cross(b - a, p - a) < 0) --winding;
    }
  }
  return winding != 0;
}

}  // namespace polymg
