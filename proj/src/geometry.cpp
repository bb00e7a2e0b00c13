#include "vem/geometry.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace vem {

double polygon_signed_area(std::span<const Vec2> pts) {
  double a = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    a += p.cross(q);
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(std::span<const Vec2> pts) {
  double a = 0.0;
  Vec2 c;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    const double w = p.cross(q);
    a += w;
    c += (p + q) * w;
  }
  return c / (3.0 * a);
}

double polygon_diameter(std::span<const Vec2> pts) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      d2 = std::max(d2, (pts[i] - pts[j]).norm2());
  return std::sqrt(d2);
}

Vec2 polygon_vertex_mean(std::span<const Vec2> pts) {
  Vec2 m;
  for (const Vec2& p : pts) m += p;
  return m / static_cast<double>(pts.size());
}

namespace {

// Proper segment intersection test, endpoints excluded for shared vertices.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q - p).cross(r - p);
  };
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) &&
         o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

bool polygon_is_simple(std::span<const Vec2> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share a vertex).
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

bool point_in_polygon(std::span<const Vec2> pts, const Vec2& p) {
  bool inside = false;
  const std::size_t n = pts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((pts[i].y > p.y) != (pts[j].y > p.y)) {
      const double xc =
          pts[j].x + (p.y - pts[j].y) / (pts[i].y - pts[j].y) * (pts[i].x - pts[j].x);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp(ab.dot(p - a) / ab.norm2(), 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

std::vector<Vec2> clip_halfplane(std::span<const Vec2> poly, const Vec2& p0, const Vec2& n) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  out.reserve(m + 2);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = n.dot(a - p0);
    const double db = n.dot(b - p0);
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      out.push_back(a + (b - a) * (da / (da - db)));
    }
  }
  return out;
}

const GaussRule& gauss_rule(int npts) {
  static const std::map<int, GaussRule> rules = [] {
    std::map<int, GaussRule> r;
    // Non-negative abscissae/weights on [-1,1], mirrored and mapped to [0,1].
    auto add = [&r](int n, std::vector<double> x, std::vector<double> w) {
      GaussRule g;
      for (std::size_t i = 0; i < x.size(); ++i) {
        g.points.push_back(0.5 * (1.0 + x[i]));
        g.weights.push_back(0.5 * w[i]);
        if (x[i] != 0.0) {
          g.points.push_back(0.5 * (1.0 - x[i]));
          g.weights.push_back(0.5 * w[i]);
        }
      }
      if (static_cast<int>(g.points.size()) != n) throw std::logic_error("bad Gauss table");
      r[n] = std::move(g);
    };
    add(1, {0.0}, {2.0});
    add(2, {0.5773502691896257645091488}, {1.0});
    add(3, {0.0, 0.7745966692414833770358531},
        {0.8888888888888888888888889, 0.5555555555555555555555556});
    add(5, {0.0, 0.5384693101056830910363144, 0.9061798459386639927976269},
        {0.5688888888888888888888889, 0.4786286704993664680412915, 0.2369268850561890875142640});
    add(10,
        {0.1488743389816312108848260, 0.4333953941292471907992659,
         0.6794095682990244062343274, 0.8650633666889845107320967,
         0.9739065285171717200779640},
        {0.2955242247147528701738930, 0.2692667193099963550912269,
         0.2190863625159820439955349, 0.1494513491505805931457763,
         0.0666713443086881375935688});
    return r;
  }();
  auto it = rules.find(npts);
  if (it == rules.end()) throw std::invalid_argument("no such Gauss rule");
  return it->second;
}

}  // namespace vem
