#include "battlemix/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace battlemix::geom {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, Point{a.x + t * dx, a.y + t * dy});
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

ConvexHull ConvexHull::of(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  ConvexHull hull;
  if (pts.size() <= 2) {
    hull.vertices_ = std::move(pts);
    return hull;
  }
  // Andrew's monotone chain; strict turns drop collinear points.
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  hull.vertices_ = std::move(h);
  return hull;
}

ConvexHull ConvexHull::with(Point p) const {
  std::vector<Point> pts = vertices_;
  pts.push_back(p);
  return of(pts);
}

double ConvexHull::area() const {
  if (vertices_.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % vertices_.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

Point ConvexHull::centroid() const {
  if (vertices_.empty()) return {};
  const double a = area();
  if (vertices_.size() < 3 || a == 0.0) {
    Point c;
    for (const auto& v : vertices_) {
      c.x += v.x;
      c.y += v.y;
    }
    const double n = static_cast<double>(vertices_.size());
    return {c.x / n, c.y / n};
  }
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& p = vertices_[i];
    const auto& q = vertices_[(i + 1) % vertices_.size()];
    const double w = p.x * q.y - q.x * p.y;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

double ConvexHull::distance_to(Point p) const {
  const auto n = vertices_.size();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (n == 1) return distance(p, vertices_[0]);
  if (n == 2) return segment_distance(p, vertices_[0], vertices_[1]);

  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % n];
    if (cross(a, b, p) < 0) inside = false;
    best = std::min(best, segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

}  // namespace battlemix::geom
