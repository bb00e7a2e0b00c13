#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "vem/error.hpp"
#include "vem/mesh.hpp"
#include "vem/rng.hpp"

namespace vem {

namespace {

PolygonMesh make_t1(int n, const DomainParams& dom, const TagRule& rule) {
  const int nx = n;
  const int ny = std::max(1, static_cast<int>(std::lround(n * dom.height / dom.width)));
  std::vector<Vec2> verts;
  verts.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.push_back({dom.width * i / nx, dom.height * j / ny});
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return build_mesh(std::move(verts), std::move(cells), rule);
}

// n x n congruent trapezoids on the unit square, all similar to the prototype
// with vertices (0,0), (1/2,0), (1/2,2/3), (0,1/3). Columns of width 1/n; the
// vertical sides alternate lengths 2/(3n) and 4/(3n) with opposite phase on
// neighboring grid lines.
PolygonMesh make_t2(int n, const TagRule& rule) {
  VEM_REQUIRE(n >= 2 && n % 2 == 0, "T2 requires an even subdivision n >= 2, got ", n);
  const double a = 2.0 / (3.0 * n);
  const double b = 4.0 / (3.0 * n);
  std::vector<Vec2> verts((n + 1) * (n + 1));
  auto id = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i) {
    const double lo = (i % 2 == 0) ? a : b;  // first segment length on this line
    for (int j = 0; j <= n; ++j) {
      double y;
      if (j % 2 == 0)
        y = static_cast<double>(j) / n;
      else
        y = static_cast<double>(j - 1) / n + lo;
      verts[id(i, j)] = {static_cast<double>(i) / n, y};
    }
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return build_mesh(std::move(verts), std::move(cells), rule);
}

PolygonMesh make_t3(int n, const DomainParams& dom, std::uint64_t seed, const TagRule& rule) {
  const PolygonMesh base = make_t1(n, dom, tag_all(BoundaryTag::Free));
  Rng rng(seed);
  const double eps = 1e-12 * base.domain_diameter();

  std::vector<Vec2> midpoint(base.n_edges());
  auto draw = [&](int e) {
    const Vec2 pa = base.vertices[base.edges[e].a];
    const Vec2 pb = base.vertices[base.edges[e].b];
    const Vec2 m = (pa + pb) * 0.5;
    const double len = (pb - pa).norm();
    Vec2 disp;
    if (base.edges[e].on_boundary()) {
      // Tangential displacement only, so the boundary stays exact.
      disp = (pb - pa).normalized() * (0.2 * len * rng.uniform(-1.0, 1.0));
    } else {
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const double r = 0.2 * len * std::sqrt(rng.uniform());
      disp = Vec2{std::cos(ang), std::sin(ang)} * r;
      const Vec2 p = m + disp;
      if (p.x < eps || p.x > dom.width - eps || p.y < eps || p.y > dom.height - eps)
        disp = {0.0, 0.0};
    }
    midpoint[e] = m + disp;
  };
  for (int e = 0; e < base.n_edges(); ++e) draw(e);

  // A displaced cell must stay a simple positively-oriented polygon whose
  // vertex-mean fan weights are positive (keeps the load rule P1-exact).
  auto cell_ok = [&](int c) {
    const auto& cyc = base.cells[c];
    std::vector<Vec2> hex;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      hex.push_back(base.vertices[cyc[i]]);
      hex.push_back(midpoint[base.cell_edges[c][i]]);
    }
    if (polygon_signed_area(hex) <= 0 || !polygon_is_simple(hex)) return false;
    const Vec2 vm = polygon_vertex_mean(hex);
    const double area = polygon_signed_area(hex);
    std::vector<double> w(hex.size(), area / (3.0 * hex.size()));
    for (std::size_t i = 0; i < hex.size(); ++i) {
      const Vec2& a = hex[i];
      const Vec2& b = hex[(i + 1) % hex.size()];
      const double t_area = 0.5 * (b - a).cross(vm - a);
      w[i] += t_area / 3.0;
      w[(i + 1) % hex.size()] += t_area / 3.0;
    }
    for (double wi : w)
      if (wi <= 0) return false;
    return true;
  };

  for (int round = 0; round < 50; ++round) {
    bool all_ok = true;
    for (int c = 0; c < base.n_cells(); ++c) {
      if (cell_ok(c)) continue;
      all_ok = false;
      for (int e : base.cell_edges[c]) {
        if (round < 40) {
          draw(e);
        } else {  // deterministic last resort: undisplaced midpoints
          midpoint[e] = (base.vertices[base.edges[e].a] + base.vertices[base.edges[e].b]) * 0.5;
        }
      }
    }
    if (all_ok) break;
  }

  std::vector<Vec2> verts = base.vertices;
  std::vector<int> mid(base.n_edges());
  for (int e = 0; e < base.n_edges(); ++e) {
    mid[e] = static_cast<int>(verts.size());
    verts.push_back(midpoint[e]);
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(base.n_cells());
  for (int c = 0; c < base.n_cells(); ++c) {
    const auto& cyc = base.cells[c];
    std::vector<int> hex;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      hex.push_back(cyc[i]);
      hex.push_back(mid[base.cell_edges[c][i]]);
    }
    cells.push_back(std::move(hex));
  }
  return build_mesh(std::move(verts), std::move(cells), rule);
}

// Deduplicates vertices of a polygon soup by snapping, then builds the mesh.
PolygonMesh mesh_from_soup(const std::vector<std::vector<Vec2>>& polys, double snap_tol,
                           const TagRule& rule) {
  std::vector<Vec2> verts;
  std::map<std::pair<long long, long long>, std::vector<int>> grid;
  auto vertex_id = [&](const Vec2& p) {
    const long long kx = static_cast<long long>(std::floor(p.x / (4 * snap_tol)));
    const long long ky = static_cast<long long>(std::floor(p.y / (4 * snap_tol)));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({kx + dx, ky + dy});
        if (it == grid.end()) continue;
        for (int v : it->second)
          if ((verts[v] - p).norm() <= snap_tol) return v;
      }
    const int v = static_cast<int>(verts.size());
    verts.push_back(p);
    grid[{kx, ky}].push_back(v);
    return v;
  };
  std::vector<std::vector<int>> cells;
  for (const auto& poly : polys) {
    std::vector<int> cyc;
    for (const Vec2& p : poly) {
      const int v = vertex_id(p);
      if (!cyc.empty() && cyc.back() == v) continue;
      cyc.push_back(v);
    }
    while (cyc.size() > 1 && cyc.front() == cyc.back()) cyc.pop_back();
    VEM_REQUIRE(cyc.size() >= 3, "generator produced a degenerate cell");
    cells.push_back(std::move(cyc));
  }
  return build_mesh(std::move(verts), std::move(cells), rule);
}

std::vector<Vec2> clip_to_rect(std::vector<Vec2> poly, const DomainParams& dom) {
  poly = clip_halfplane(poly, {0, 0}, {-1, 0});
  poly = clip_halfplane(poly, {dom.width, 0}, {1, 0});
  poly = clip_halfplane(poly, {0, 0}, {0, -1});
  poly = clip_halfplane(poly, {0, dom.height}, {0, 1});
  return poly;
}

PolygonMesh make_t4(int n, const DomainParams& dom, const TagRule& rule) {
  // Pointy-top regular hexagons, n columns across the width.
  const double r = dom.width / (std::sqrt(3.0) * n);
  const double w = std::sqrt(3.0) * r;
  const int rows = static_cast<int>(std::ceil(dom.height / (1.5 * r))) + 1;
  std::vector<std::vector<Vec2>> polys;
  for (int k = 0; k <= rows; ++k) {
    const double cy = 1.5 * r * k;
    const int cols = (k % 2 == 0) ? n + 1 : n;
    for (int j = 0; j < cols; ++j) {
      const double cx = (k % 2 == 0) ? w * j : w * (j + 0.5);
      std::vector<Vec2> hex;
      for (int v = 0; v < 6; ++v) {
        const double ang = M_PI / 6.0 + v * M_PI / 3.0;
        hex.push_back({cx + r * std::cos(ang), cy + r * std::sin(ang)});
      }
      auto clipped = clip_to_rect(hex, dom);
      if (clipped.size() >= 3 && polygon_signed_area(clipped) > 1e-14 * dom.width * dom.height)
        polys.push_back(std::move(clipped));
    }
  }

  // Merge sliver cells (clipping artifacts) into the neighbor sharing their
  // longest interior edge.
  const double snap = 1e-9 * std::max(dom.width, dom.height);
  double mean_area = 0.0;
  for (const auto& p : polys) mean_area += polygon_signed_area(p);
  mean_area /= static_cast<double>(polys.size());
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t s = 0; s < polys.size(); ++s) {
      if (polygon_signed_area(polys[s]) >= 1e-3 * mean_area) continue;
      // Longest edge of the sliver that another polygon also carries.
      std::size_t host = polys.size();
      std::size_t s_edge = 0, h_edge = 0;
      double best_len = -1.0;
      for (std::size_t i = 0; i < polys[s].size(); ++i) {
        const Vec2 a = polys[s][i];
        const Vec2 b = polys[s][(i + 1) % polys[s].size()];
        for (std::size_t c = 0; c < polys.size(); ++c) {
          if (c == s) continue;
          for (std::size_t j = 0; j < polys[c].size(); ++j) {
            const Vec2 pa = polys[c][j];
            const Vec2 pb = polys[c][(j + 1) % polys[c].size()];
            if ((pa - b).norm() <= snap && (pb - a).norm() <= snap) {
              const double len = (b - a).norm();
              if (len > best_len) {
                best_len = len;
                host = c;
                s_edge = i;
                h_edge = j;
              }
            }
          }
        }
      }
      VEM_REQUIRE(host < polys.size(), "T4: isolated sliver cell");
      // Splice the sliver boundary (minus the shared edge) into the host cycle.
      // Shared edge: host runs pa -> pb, sliver runs b -> a with pa == b, pb == a.
      std::vector<Vec2> fused;
      const auto& hp = polys[host];
      const auto& sp = polys[s];
      for (std::size_t j = 0; j <= h_edge; ++j) fused.push_back(hp[j]);
      for (std::size_t i = 2; i < sp.size(); ++i)
        fused.push_back(sp[(s_edge + i) % sp.size()]);
      for (std::size_t j = h_edge + 1; j < hp.size(); ++j) fused.push_back(hp[j]);
      polys[host] = std::move(fused);
      polys.erase(polys.begin() + static_cast<long>(s));
      merged = true;
      break;
    }
  }
  return mesh_from_soup(polys, snap, rule);
}

PolygonMesh make_t5(int n, const DomainParams& dom, std::uint64_t seed, const TagRule& rule) {
  VEM_REQUIRE(n >= 3, "T5 needs at least 3 seed points");
  Rng rng(seed);
  std::vector<Vec2> seeds(n);
  for (Vec2& s : seeds) s = {dom.width * rng.uniform(), dom.height * rng.uniform()};

  const std::vector<Vec2> rect = {
      {0, 0}, {dom.width, 0}, {dom.width, dom.height}, {0, dom.height}};
  auto voronoi_cell = [&](int i) {
    std::vector<Vec2> cell = rect;
    for (int j = 0; j < n && cell.size() >= 3; ++j) {
      if (j == i) continue;
      const Vec2 mid = (seeds[i] + seeds[j]) * 0.5;
      const Vec2 dir = seeds[j] - seeds[i];
      cell = clip_halfplane(cell, mid, dir);
    }
    return cell;
  };

  for (int iter = 0; iter < 3; ++iter) {  // Lloyd relaxation
    std::vector<Vec2> next(n);
    for (int i = 0; i < n; ++i) {
      auto cell = voronoi_cell(i);
      VEM_REQUIRE(cell.size() >= 3, "T5: empty Voronoi cell during Lloyd iteration");
      next[i] = polygon_centroid(cell);
    }
    seeds = std::move(next);
  }

  std::vector<std::vector<Vec2>> polys;
  for (int i = 0; i < n; ++i) {
    auto cell = voronoi_cell(i);
    VEM_REQUIRE(cell.size() >= 3, "T5: empty Voronoi cell");
    polys.push_back(std::move(cell));
  }
  const double snap = 1e-9 * std::max(dom.width, dom.height);
  return mesh_from_soup(polys, snap, rule);
}

PolygonMesh make_t6(int n, const TagRule& rule) {
  // n x n squares on each of the three unit/2 squares composing the L-shape.
  const int m = 2 * n;
  const double h = 0.5 / n;
  std::vector<int> vid((m + 1) * (m + 1), -1);
  std::vector<Vec2> verts;
  auto id = [&](int i, int j) -> int& { return vid[j * (m + 1) + i]; };
  auto get = [&](int i, int j) {
    int& v = id(i, j);
    if (v < 0) {
      v = static_cast<int>(verts.size());
      verts.push_back({h * i, h * j});
    }
    return v;
  };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i >= n && j >= n) continue;  // removed quadrant
      cells.push_back({get(i, j), get(i + 1, j), get(i + 1, j + 1), get(i, j + 1)});
    }
  }
  return build_mesh(std::move(verts), std::move(cells), rule);
}

}  // namespace

MeshFamily family_from_string(const std::string& s) {
  if (s == "T1") return MeshFamily::T1;
  if (s == "T2") return MeshFamily::T2;
  if (s == "T3") return MeshFamily::T3;
  if (s == "T4") return MeshFamily::T4;
  if (s == "T5") return MeshFamily::T5;
  if (s == "T6") return MeshFamily::T6;
  if (s == "T7") return MeshFamily::T7;
  throw Error("unknown mesh family '" + s + "'");
}

std::string family_to_string(MeshFamily f) {
  switch (f) {
    case MeshFamily::T1: return "T1";
    case MeshFamily::T2: return "T2";
    case MeshFamily::T3: return "T3";
    case MeshFamily::T4: return "T4";
    case MeshFamily::T5: return "T5";
    case MeshFamily::T6: return "T6";
    case MeshFamily::T7: return "T7";
  }
  return "?";
}

PolygonMesh generate_mesh(MeshFamily family, int n, const DomainParams& dom,
                          std::uint64_t seed, const TagRule& rule) {
  // For T7 the parameter counts corner refinements of the n=8 base; 0 is the base.
  VEM_REQUIRE(n >= (family == MeshFamily::T7 ? 0 : 1),
              "generate_mesh: invalid subdivision parameter ", n);
  switch (family) {
    case MeshFamily::T1: return make_t1(n, dom, rule);
    case MeshFamily::T2: return make_t2(n, rule);
    case MeshFamily::T3: return make_t3(n, dom, seed, rule);
    case MeshFamily::T4: return make_t4(n, dom, rule);
    case MeshFamily::T5: return make_t5(n, dom, seed, rule);
    case MeshFamily::T6: return make_t6(n, rule);
    case MeshFamily::T7: {
      PolygonMesh mesh = make_t6(8, rule);
      for (int k = 0; k < n; ++k) mesh = refine_corner(mesh, {0.5, 0.5});
      return mesh;
    }
  }
  throw Error("generate_mesh: invalid family");
}

}  // namespace vem
