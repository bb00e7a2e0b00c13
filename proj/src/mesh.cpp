#include "vem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "vem/error.hpp"

namespace vem {

TagRule tag_all(BoundaryTag tag) {
  return [tag](const Vec2&) { return tag; };
}

double PolygonMesh::total_area() const {
  double a = 0.0;
  std::vector<Vec2> pts;
  for (const auto& cell : cells) {
    pts.clear();
    for (int v : cell) pts.push_back(vertices[v]);
    a += polygon_signed_area(pts);
  }
  return a;
}

double PolygonMesh::domain_diameter() const {
  Vec2 lo = vertices.empty() ? Vec2{} : vertices.front();
  Vec2 hi = lo;
  for (const Vec2& p : vertices) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  return (hi - lo).norm();
}

double PolygonMesh::mesh_size() const {
  double h = 0.0;
  std::vector<Vec2> pts;
  for (const auto& cell : cells) {
    pts.clear();
    for (int v : cell) pts.push_back(vertices[v]);
    h = std::max(h, polygon_diameter(pts));
  }
  return h;
}

int PolygonMesh::edge_orientation(int cell, int local_edge) const {
  const auto& cyc = cells[cell];
  const int a = cyc[local_edge];
  const int b = cyc[(local_edge + 1) % cyc.size()];
  return a < b ? 1 : -1;
}

int PolygonMesh::find_vertex(const Vec2& p, double tol) const {
  for (int i = 0; i < n_vertices(); ++i)
    if ((vertices[i] - p).norm() <= tol) return i;
  return -1;
}

PolygonMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                       const TagRule& rule) {
  PolygonMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  const int nv = mesh.n_vertices();
  VEM_REQUIRE(nv >= 3, "build_mesh: need at least 3 vertices");

  // Duplicate vertex detection via a snapping grid.
  double diam = mesh.domain_diameter();
  VEM_REQUIRE(diam > 0, "build_mesh: all vertices coincide");
  const double tol = 1e-12 * diam;
  {
    std::map<std::pair<long long, long long>, std::vector<int>> grid;
    auto key = [&](const Vec2& p) {
      return std::make_pair(static_cast<long long>(std::floor(p.x / (4 * tol))),
                            static_cast<long long>(std::floor(p.y / (4 * tol))));
    };
    for (int i = 0; i < nv; ++i) {
      auto [kx, ky] = key(mesh.vertices[i]);
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy) {
          auto it = grid.find({kx + dx, ky + dy});
          if (it == grid.end()) continue;
          for (int j : it->second)
            VEM_REQUIRE((mesh.vertices[i] - mesh.vertices[j]).norm() > tol,
                        "build_mesh: duplicate vertices ", j, " and ", i);
        }
      grid[{kx, ky}].push_back(i);
    }
  }

  std::vector<Vec2> pts;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    auto& cyc = mesh.cells[c];
    VEM_REQUIRE(cyc.size() >= 3, "build_mesh: cell ", c, " has fewer than 3 vertices");
    for (int v : cyc)
      VEM_REQUIRE(v >= 0 && v < nv, "build_mesh: cell ", c, " references invalid vertex ", v);
    pts.clear();
    for (int v : cyc) pts.push_back(mesh.vertices[v]);
    double area = polygon_signed_area(pts);
    if (area < 0) {
      std::reverse(cyc.begin(), cyc.end());
      area = -area;
    }
    VEM_REQUIRE(area > tol * tol, "build_mesh: cell ", c, " is degenerate (zero area)");
    pts.clear();
    for (int v : cyc) pts.push_back(mesh.vertices[v]);
    VEM_REQUIRE(polygon_is_simple(pts), "build_mesh: cell ", c, " is self-intersecting");
  }

  // Edge table, keyed by the (low, high) vertex pair.
  std::map<std::pair<int, int>, int> edge_ids;
  mesh.cell_edges.resize(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cyc = mesh.cells[c];
    const std::size_t k = cyc.size();
    mesh.cell_edges[c].resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const int a = cyc[i];
      const int b = cyc[(i + 1) % k];
      VEM_REQUIRE(a != b, "build_mesh: cell ", c, " repeats vertex ", a);
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_ids.try_emplace({key.first, key.second},
                                                 static_cast<int>(mesh.edges.size()));
      if (inserted) {
        MeshEdge e;
        e.a = key.first;
        e.b = key.second;
        mesh.edges.push_back(e);
      }
      MeshEdge& e = mesh.edges[it->second];
      int& slot = (a < b) ? e.cell_left : e.cell_right;
      VEM_REQUIRE(slot < 0, "build_mesh: non-manifold edge (", e.a, ",", e.b,
                  ") shared by more than two cells");
      slot = static_cast<int>(c);
      mesh.cell_edges[c][i] = it->second;
    }
  }

  for (MeshEdge& e : mesh.edges) {
    if (e.on_boundary()) {
      const Vec2 mid = (mesh.vertices[e.a] + mesh.vertices[e.b]) * 0.5;
      e.tag = rule(mid);
      VEM_REQUIRE(e.tag != BoundaryTag::None, "build_mesh: boundary edge (", e.a, ",", e.b,
                  ") received no tag");
    }
  }
  return mesh;
}

ElementGeometry element_geometry(const PolygonMesh& mesh, int cell) {
  VEM_REQUIRE(cell >= 0 && cell < mesh.n_cells(), "element_geometry: invalid cell ", cell);
  const auto& cyc = mesh.cells[cell];
  std::vector<Vec2> pts;
  pts.reserve(cyc.size());
  for (int v : cyc) pts.push_back(mesh.vertices[v]);

  ElementGeometry g;
  // Area and centroid in coordinates shifted to the first vertex: the shoelace
  // terms of a small far-off cell would otherwise cancel catastrophically.
  std::vector<Vec2> shifted(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) shifted[i] = pts[i] - pts[0];
  g.area = polygon_signed_area(shifted);
  VEM_REQUIRE(g.area > 0, "element_geometry: cell ", cell, " has non-positive area");
  g.centroid = polygon_centroid(shifted) + pts[0];
  g.diameter = polygon_diameter(pts);
  const std::size_t k = pts.size();
  g.sides.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& s = g.sides[i];
    s.a = pts[i];
    s.b = pts[(i + 1) % k];
    s.length = (s.b - s.a).norm();
    VEM_REQUIRE(s.length > 0, "element_geometry: zero-length edge in cell ", cell);
    s.tangent = (s.b - s.a) / s.length;
    s.normal = {s.tangent.y, -s.tangent.x};  // outward for a counterclockwise cycle
  }
  return g;
}

PolygonMesh refine_corner(const PolygonMesh& mesh, const Vec2& corner) {
  const double tol = 1e-12 * std::max(1.0, mesh.domain_diameter());
  const int corner_id = mesh.find_vertex(corner, tol);
  VEM_REQUIRE(corner_id >= 0, "refine_corner: (", corner.x, ",", corner.y,
              ") is not a mesh vertex");

  std::vector<char> split(mesh.n_cells(), 0);
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int v : mesh.cells[c])
      if (v == corner_id) split[c] = 1;

  std::vector<Vec2> verts = mesh.vertices;
  std::vector<int> edge_mid(mesh.n_edges(), -1);  // midpoint vertex of split edges
  auto midpoint_of = [&](int e) {
    if (edge_mid[e] < 0) {
      edge_mid[e] = static_cast<int>(verts.size());
      verts.push_back((mesh.vertices[mesh.edges[e].a] + mesh.vertices[mesh.edges[e].b]) * 0.5);
    }
    return edge_mid[e];
  };

  // Mark edges of split cells first so that unsplit neighbors see the midpoints.
  for (int c = 0; c < mesh.n_cells(); ++c)
    if (split[c])
      for (int e : mesh.cell_edges[c]) midpoint_of(e);

  std::vector<std::vector<int>> cells;
  std::vector<Vec2> pts;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cyc = mesh.cells[c];
    const int k = static_cast<int>(cyc.size());
    if (!split[c]) {
      // Insert hanging midpoints of shared split edges into the cycle.
      std::vector<int> newcyc;
      for (int i = 0; i < k; ++i) {
        newcyc.push_back(cyc[i]);
        const int e = mesh.cell_edges[c][i];
        if (edge_mid[e] >= 0) newcyc.push_back(edge_mid[e]);
      }
      cells.push_back(std::move(newcyc));
      continue;
    }
    pts.clear();
    for (int v : cyc) pts.push_back(mesh.vertices[v]);
    const int bary = static_cast<int>(verts.size());
    verts.push_back(polygon_centroid(pts));
    for (int i = 0; i < k; ++i) {
      const int m_prev = edge_mid[mesh.cell_edges[c][(i + k - 1) % k]];
      const int m_next = edge_mid[mesh.cell_edges[c][i]];
      cells.push_back({cyc[i], m_next, bary, m_prev});
    }
  }

  // Tags are inherited: a split boundary edge passes its tag to both halves.
  std::map<std::pair<int, int>, BoundaryTag> old_tags;
  for (int ei = 0; ei < mesh.n_edges(); ++ei) {
    const MeshEdge& e = mesh.edges[ei];
    if (!e.on_boundary()) continue;
    if (edge_mid[ei] >= 0) {
      old_tags[std::minmax(e.a, edge_mid[ei])] = e.tag;
      old_tags[std::minmax(edge_mid[ei], e.b)] = e.tag;
    } else {
      old_tags[{e.a, e.b}] = e.tag;
    }
  }
  PolygonMesh out = build_mesh(std::move(verts), std::move(cells), tag_all(BoundaryTag::Free));
  for (MeshEdge& e : out.edges) {
    if (!e.on_boundary()) continue;
    auto it = old_tags.find({e.a, e.b});
    VEM_REQUIRE(it != old_tags.end(), "refine_corner: lost boundary tag on edge (", e.a, ",",
                e.b, ")");
    e.tag = it->second;
  }
  return out;
}

namespace {

// Largest disc centered in `kernel` and contained in the polygon, by
// coarse-to-fine sampling. Good enough for a diagnostic.
std::pair<double, Vec2> max_inscribed_ball(std::span<const Vec2> poly,
                                           std::span<const Vec2> kernel) {
  if (kernel.size() < 3) return {0.0, {}};
  auto boundary_dist = [&poly](const Vec2& p) {
    double d = 1e300;
    for (std::size_t i = 0; i < poly.size(); ++i)
      d = std::min(d, dist_point_segment(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
  };
  Vec2 lo = kernel[0], hi = kernel[0];
  for (const Vec2& p : kernel) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  Vec2 best_c = polygon_centroid(kernel);
  double best = point_in_polygon(kernel, best_c) ? boundary_dist(best_c) : 0.0;
  Vec2 span = hi - lo;
  Vec2 center = (lo + hi) * 0.5;
  for (int round = 0; round < 5; ++round) {
    constexpr int grid = 16;
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        Vec2 p{center.x + span.x * (static_cast<double>(i) / grid - 0.5),
               center.y + span.y * (static_cast<double>(j) / grid - 0.5)};
        if (!point_in_polygon(kernel, p)) continue;
        const double d = boundary_dist(p);
        if (d > best) {
          best = d;
          best_c = p;
        }
      }
    }
    center = best_c;
    span = span * (2.5 / grid);
  }
  return {best, best_c};
}

}  // namespace

RegularityReport check_regularity(const PolygonMesh& mesh) {
  RegularityReport rep;
  rep.cells.resize(mesh.n_cells());
  rep.min_edge_ratio = 1.0;
  rep.min_ball_ratio = 1.0;
  std::vector<Vec2> pts;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    pts.clear();
    for (int v : mesh.cells[c]) pts.push_back(mesh.vertices[v]);
    const double h = polygon_diameter(pts);
    double min_edge = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i)
      min_edge = std::min(min_edge, (pts[(i + 1) % pts.size()] - pts[i]).norm());

    // Kernel of the polygon: intersection of the inner half-planes of all edges.
    std::vector<Vec2> kernel(pts.begin(), pts.end());
    for (std::size_t i = 0; i < pts.size() && kernel.size() >= 3; ++i) {
      const Vec2 a = pts[i];
      const Vec2 b = pts[(i + 1) % pts.size()];
      const Vec2 n = (b - a).perp() * -1.0;  // outward: keep n.(x-a) <= 0
      kernel = clip_halfplane(kernel, a, n);
    }
    auto [radius, center] = max_inscribed_ball(pts, kernel);

    auto& pc = rep.cells[c];
    pc.min_edge_ratio = min_edge / h;
    pc.ball_ratio = radius / h;
    pc.star_center = center;
    rep.min_edge_ratio = std::min(rep.min_edge_ratio, pc.min_edge_ratio);
    rep.min_ball_ratio = std::min(rep.min_ball_ratio, pc.ball_ratio);
    if (pc.min_edge_ratio < RegularityReport::flag_threshold ||
        pc.ball_ratio < RegularityReport::flag_threshold)
      rep.flagged.push_back(c);
  }
  return rep;
}

}  // namespace vem
