#pragma once

// Exact 2-D primitives for quadrilateral boxes: areas, segment tests,
// simplicity, convex clipping and polygon IoU.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sbd {

/// Tolerance (pixels) for collinearity and on-segment tests.
inline constexpr double kGeomEps = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

/// Twice the signed area of triangle (a, b, c); positive when counterclockwise.
inline double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

inline int orient_sign(Point a, Point b, Point c) {
  const double o = orient(a, b, c);
  if (o > kGeomEps) return 1;
  if (o < -kGeomEps) return -1;
  return 0;
}

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Four vertices in listed order; edges are v0v1, v1v2, v2v3, v3v0.
struct Quadrilateral {
  std::array<Point, 4> vertices{};

  const Point& operator[](std::size_t i) const { return vertices[i]; }
  Point& operator[](std::size_t i) { return vertices[i]; }

  bool finite() const {
    return std::all_of(vertices.begin(), vertices.end(), is_finite);
  }

  friend bool operator==(const Quadrilateral&, const Quadrilateral&) = default;
};

/// Convex polygon with counterclockwise vertices. Used as the clipping
/// intermediate; may temporarily hold fewer than 3 vertices when empty.
struct ConvexPolygon {
  std::vector<Point> vertices;
};

namespace detail {

template <typename Range>
double shoelace(const Range& pts) {
  const std::size_t n = std::size(pts);
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) acc += cross(pts[j], pts[i]);
  return 0.5 * acc;
}

inline bool on_segment(Point p, Point q, Point r) {
  return r.x <= std::max(p.x, q.x) + kGeomEps && r.x >= std::min(p.x, q.x) - kGeomEps &&
         r.y <= std::max(p.y, q.y) + kGeomEps && r.y >= std::min(p.y, q.y) - kGeomEps;
}

inline bool near(Point a, Point b) {
  return std::abs(a.x - b.x) <= kGeomEps && std::abs(a.y - b.y) <= kGeomEps;
}

// Segments s->a and s->b share more than the point s.
inline bool adjacent_overlap(Point s, Point a, Point b) {
  if (near(s, a) || near(s, b)) return true;
  return orient_sign(s, a, b) == 0 && dot(a - s, b - s) > 0.0;
}

}  // namespace detail

/// Signed shoelace area; positive for counterclockwise order.
inline double signed_area(const Quadrilateral& q) { return detail::shoelace(q.vertices); }

inline double polygon_area(const Quadrilateral& q) { return std::abs(signed_area(q)); }

inline double polygon_area(const ConvexPolygon& p) {
  return std::abs(detail::shoelace(p.vertices));
}

/// True iff closed segments a1a2 and b1b2 share a point. When
/// `shared_endpoint` is given and is an endpoint of both segments, touching
/// only at that point does not count.
inline bool segments_intersect(Point a1, Point a2, Point b1, Point b2,
                               std::optional<Point> shared_endpoint = std::nullopt) {
  if (shared_endpoint) {
    const Point s = *shared_endpoint;
    const bool on_a = detail::near(s, a1) || detail::near(s, a2);
    const bool on_b = detail::near(s, b1) || detail::near(s, b2);
    if (on_a && on_b) {
      const Point a_far = detail::near(s, a1) ? a2 : a1;
      const Point b_far = detail::near(s, b1) ? b2 : b1;
      return detail::adjacent_overlap(s, a_far, b_far);
    }
  }

  const int d1 = orient_sign(b1, b2, a1);
  const int d2 = orient_sign(b1, b2, a2);
  const int d3 = orient_sign(a1, a2, b1);
  const int d4 = orient_sign(a1, a2, b2);

  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && detail::on_segment(b1, b2, a1)) return true;
  if (d2 == 0 && detail::on_segment(b1, b2, a2)) return true;
  if (d3 == 0 && detail::on_segment(a1, a2, b1)) return true;
  if (d4 == 0 && detail::on_segment(a1, a2, b2)) return true;
  return false;
}

/// A quad is simple when its two pairs of opposite edges are disjoint, its
/// adjacent edges meet only at their shared vertex, and it has positive area.
inline bool is_simple_quad(const Quadrilateral& q) {
  if (!q.finite()) return false;
  const auto& v = q.vertices;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      if (detail::near(v[i], v[j])) return false;

  if (segments_intersect(v[0], v[1], v[2], v[3])) return false;
  if (segments_intersect(v[1], v[2], v[3], v[0])) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point s = v[(i + 1) % 4];
    if (detail::adjacent_overlap(s, v[i], v[(i + 2) % 4])) return false;
  }
  return polygon_area(q) > kGeomEps;
}

/// Convexity of a simple quad (collinear triples allowed).
inline bool is_convex_quad(const Quadrilateral& q) {
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const int s = orient_sign(q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
    pos += s > 0;
    neg += s < 0;
  }
  return pos == 0 || neg == 0;
}

/// Vertices sorted clockwise in image coordinates (y down) around the vertex
/// mean, starting from the vertex with the smallest angle. Produces a simple
/// order for any four points in general position.
inline Quadrilateral canonical_clockwise(const Quadrilateral& q) {
  Point c{};
  for (const auto& p : q.vertices) c = c + 0.25 * p;
  std::array<std::pair<double, std::size_t>, 4> keyed{};
  for (std::size_t i = 0; i < 4; ++i)
    keyed[i] = {std::atan2(q[i].y - c.y, q[i].x - c.x), i};
  // With y pointing down, increasing atan2 sweeps clockwise on screen.
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Quadrilateral out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = q[keyed[i].second];
  return out;
}

/// Sutherland-Hodgman clip of a convex polygon by a convex polygon, both CCW.
inline ConvexPolygon clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip) {
  std::vector<Point> out = subject.vertices;
  const std::size_t m = clip.vertices.size();
  for (std::size_t e2 = 0, e1 = m - 1; e2 < m && !out.empty(); e1 = e2++) {
    const Point c1 = clip.vertices[e1];
    const Point c2 = clip.vertices[e2];
    std::vector<Point> in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t v2 = 0, v1 = n - 1; v2 < n; v1 = v2++) {
      const double o1 = orient(c1, c2, in[v1]);
      const double o2 = orient(c1, c2, in[v2]);
      const bool in1 = o1 >= 0.0;
      const bool in2 = o2 >= 0.0;
      if (in1 != in2) {
        const double t = o1 / (o1 - o2);
        out.push_back(in[v1] + t * (in[v2] - in[v1]));
      }
      if (in2) out.push_back(in[v2]);
    }
  }
  return {std::move(out)};
}

namespace detail {

inline ConvexPolygon make_ccw(std::vector<Point> pts) {
  if (shoelace(pts) < 0.0) std::reverse(pts.begin(), pts.end());
  return {std::move(pts)};
}

// Convex pieces whose union is the quad: the quad itself when convex,
// otherwise the two triangles on either side of the diagonal through the
// reflex vertex.
inline std::vector<ConvexPolygon> convex_pieces(const Quadrilateral& q) {
  if (is_convex_quad(q)) return {make_ccw({q.vertices.begin(), q.vertices.end()})};
  const int orientation = signed_area(q) > 0.0 ? 1 : -1;
  std::size_t reflex = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (orient_sign(q[(i + 3) % 4], q[i], q[(i + 1) % 4]) == -orientation) {
      reflex = i;
      break;
    }
  }
  const auto& r = reflex;
  return {make_ccw({q[r], q[(r + 1) % 4], q[(r + 2) % 4]}),
          make_ccw({q[r], q[(r + 2) % 4], q[(r + 3) % 4]})};
}

}  // namespace detail

/// Area of the intersection of two simple quads.
/// Throws std::invalid_argument if either quad is not simple.
inline double polygon_intersection_area(const Quadrilateral& a, const Quadrilateral& b) {
  if (!is_simple_quad(a) || !is_simple_quad(b))
    throw std::invalid_argument("polygon_intersection_area: non-simple quadrilateral");
  double total = 0.0;
  for (const auto& pa : detail::convex_pieces(a))
    for (const auto& pb : detail::convex_pieces(b)) total += polygon_area(clip_convex(pa, pb));
  return std::min(total, std::min(polygon_area(a), polygon_area(b)));
}

/// Intersection over union; 0 when the union is empty.
inline double polygon_iou(const Quadrilateral& a, const Quadrilateral& b) {
  const double inter = polygon_intersection_area(a, b);
  const double uni = polygon_area(a) + polygon_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace sbd
