#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vem/geometry.hpp"

namespace vem {

enum class BoundaryTag : std::uint8_t { None, Clamped, SimplySupported, Free };

/// Maps an edge midpoint to its boundary condition. Applied to boundary edges only.
using TagRule = std::function<BoundaryTag(const Vec2&)>;

TagRule tag_all(BoundaryTag tag);

struct MeshEdge {
  int a = -1;           // endpoint with the lower vertex index
  int b = -1;           // endpoint with the higher vertex index
  int cell_left = -1;   // cell traversing a -> b
  int cell_right = -1;  // cell traversing b -> a, or -1 on the boundary
  BoundaryTag tag = BoundaryTag::None;

  bool on_boundary() const { return cell_left < 0 || cell_right < 0; }
};

/// Conforming polygonal mesh. Cells are counterclockwise vertex cycles; edges
/// are derived and oriented from the lower to the higher vertex index.
/// Immutable after construction.
struct PolygonMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;
  std::vector<MeshEdge> edges;
  /// edge id of cell c's side (cells[c][i], cells[c][i+1]).
  std::vector<std::vector<int>> cell_edges;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  double total_area() const;
  double domain_diameter() const;
  /// Mesh size label h = max over cells of the cell diameter.
  double mesh_size() const;
  /// +1 if cell traverses edge e from lower to higher vertex index, else -1.
  int edge_orientation(int cell, int local_edge) const;
  int find_vertex(const Vec2& p, double tol) const;
};

struct ElementGeometry {
  double area = 0.0;
  Vec2 centroid;
  double diameter = 0.0;
  struct Side {
    Vec2 a, b;        // endpoints in cell cycle order
    double length;
    Vec2 tangent;     // unit, counterclockwise along the cell
    Vec2 normal;      // unit, outward
  };
  std::vector<Side> sides;

  int n() const { return static_cast<int>(sides.size()); }
};

struct RegularityReport {
  struct PerCell {
    double min_edge_ratio = 0.0;  // shortest edge / h_E
    double ball_ratio = 0.0;      // inscribed star-ball radius / h_E
    Vec2 star_center;
  };
  std::vector<PerCell> cells;
  double min_edge_ratio = 0.0;
  double min_ball_ratio = 0.0;
  /// Cells with a ratio below `flag_threshold` (nearly degenerate geometry).
  std::vector<int> flagged;
  static constexpr double flag_threshold = 1e-3;
};

/// Builds a mesh from raw vertex/cell data. Clockwise cells are reoriented;
/// duplicate vertices, non-manifold edges and self-intersecting cells are
/// rejected. Boundary edges get their tag from `rule`.
PolygonMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                       const TagRule& rule);

ElementGeometry element_geometry(const PolygonMesh& mesh, int cell);

enum class MeshFamily { T1, T2, T3, T4, T5, T6, T7 };

MeshFamily family_from_string(const std::string& s);
std::string family_to_string(MeshFamily f);

struct DomainParams {
  double width = 1.0;   // a
  double height = 1.0;  // b
};

/// Mesh family generators.
///  T1  n x (n*b/a) grid on (0,a)x(0,b), each cell split into two triangles
///  T2  n x n congruent-trapezoid pattern on the unit square (n even)
///  T3  T1 with edge midpoints inserted and randomly displaced (hexagons)
///  T4  regular hexagon tiling clipped to (0,a)x(0,b), slivers merged
///  T5  Lloyd-relaxed (3 iterations) Voronoi diagram of n seeds in (0,a)x(0,b)
///  T6  uniform squares on the L-shape (0,1)^2 \ [1/2,1)^2, n x n per component
///  T7  T6 at n=8 with `refine_corner` applied n times at (1/2,1/2)
/// Deterministic given (family, n, seed); seed is used by T3 and T5 only.
PolygonMesh generate_mesh(MeshFamily family, int n, const DomainParams& domain,
                          std::uint64_t seed, const TagRule& rule);

/// Splits every cell incident to `corner` (a mesh vertex) into quadrilaterals
/// by connecting the cell centroid with the edge midpoints. Neighbors of split
/// cells keep the hanging midpoints as ordinary polygon vertices.
PolygonMesh refine_corner(const PolygonMesh& mesh, const Vec2& corner);

PolygonMesh read_mesh(std::istream& in);
PolygonMesh read_mesh_file(const std::string& path);
void write_mesh(const PolygonMesh& mesh, std::ostream& out);
void write_mesh_file(const PolygonMesh& mesh, const std::string& path);

RegularityReport check_regularity(const PolygonMesh& mesh);

}  // namespace vem
