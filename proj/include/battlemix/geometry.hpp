#pragma once

#include <span>
#include <vector>

namespace battlemix::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

/// Convex polygon with counter-clockwise vertices and no collinear vertices.
/// Degenerate hulls (one point, a segment) are valid.
class ConvexHull {
 public:
  ConvexHull() = default;
  static ConvexHull of(std::span<const Point> points);

  /// Hull of the current vertices plus `p`.
  ConvexHull with(Point p) const;

  const std::vector<Point>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }

  double area() const;
  /// Area centroid; vertex mean for degenerate hulls.
  Point centroid() const;
  /// Euclidean distance from p to the hull; 0 inside or on the boundary.
  double distance_to(Point p) const;
  bool contains(Point p, double tolerance = 1e-9) const { return distance_to(p) <= tolerance; }

 private:
  std::vector<Point> vertices_;
};

}  // namespace battlemix::geom
