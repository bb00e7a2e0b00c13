#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace vem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  /// z-component of the cross product (this x o).
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
  /// Counterclockwise rotation by 90 degrees.
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Symmetric 2x2 tensor (strain/stress style).
struct SymMat2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  double trace() const { return xx + yy; }
  /// Full double contraction a:b (off-diagonal counted twice).
  double contract(const SymMat2& o) const {
    return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy;
  }
  Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

/// Signed shoelace area; positive for counterclockwise polygons.
double polygon_signed_area(std::span<const Vec2> pts);

/// Area centroid of a simple polygon (not the vertex mean).
Vec2 polygon_centroid(std::span<const Vec2> pts);

/// Maximum pairwise vertex distance.
double polygon_diameter(std::span<const Vec2> pts);

/// Mean of the vertex positions.
Vec2 polygon_vertex_mean(std::span<const Vec2> pts);

bool polygon_is_simple(std::span<const Vec2> pts);

bool point_in_polygon(std::span<const Vec2> pts, const Vec2& p);

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Keeps the part of `poly` with n . (x - p0) <= 0. May return an empty polygon.
std::vector<Vec2> clip_halfplane(std::span<const Vec2> poly, const Vec2& p0, const Vec2& n);

/// Gauss-Legendre rule on [0,1]; exact through degree 2*npts-1.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int npts);

/// Three-point rule on [0,1]; exact through degree 5. Used for all edge integrals.
inline const GaussRule& edge_gauss3() { return gauss_rule(3); }

/// Degree-2 triangle rule (edge midpoints, weights |T|/3 each) applied to the
/// centroid fan of a simple polygon. Integrates the callable over the polygon.
template <class F>
double integrate_polygon(std::span<const Vec2> pts, F&& f) {
  const Vec2 c = polygon_centroid(pts);
  double sum = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    const double area2 = (b - a).cross(c - a);  // signed, twice the area
    const Vec2 mab = (a + b) * 0.5;
    const Vec2 mbc = (b + c) * 0.5;
    const Vec2 mca = (c + a) * 0.5;
    sum += area2 / 6.0 * (f(mab) + f(mbc) + f(mca));
  }
  return sum;
}

}  // namespace vem
