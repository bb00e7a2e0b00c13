#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vem/error.hpp"
#include "vem/mesh.hpp"

namespace vem {

namespace {

constexpr const char* kMagic = "vem-mesh 1";

// Shortest decimal that round-trips the double.
std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  VEM_REQUIRE(ec == std::errc(), "number formatting failed");
  return std::string(buf, ptr);
}

struct LineReader {
  std::istream& in;
  int lineno = 0;
  std::string line;

  bool next() {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("mesh file, line " + std::to_string(lineno) + ": " + what);
  }
};

char tag_to_char(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Clamped: return 'C';
    case BoundaryTag::SimplySupported: return 'S';
    case BoundaryTag::Free: return 'F';
    default: return '?';
  }
}

BoundaryTag tag_from_char(char c) {
  switch (c) {
    case 'C': return BoundaryTag::Clamped;
    case 'S': return BoundaryTag::SimplySupported;
    case 'F': return BoundaryTag::Free;
    default: return BoundaryTag::None;
  }
}

}  // namespace

void write_mesh(const PolygonMesh& mesh, std::ostream& out) {
  out << kMagic << "\n";
  out << "vertices " << mesh.n_vertices() << "\n";
  for (const Vec2& p : mesh.vertices) out << fmt(p.x) << " " << fmt(p.y) << "\n";
  out << "cells " << mesh.n_cells() << "\n";
  for (const auto& cyc : mesh.cells) {
    out << cyc.size();
    for (int v : cyc) out << " " << v;
    out << "\n";
  }
  int nb = 0;
  for (const MeshEdge& e : mesh.edges)
    if (e.on_boundary()) ++nb;
  out << "boundary " << nb << "\n";
  for (const MeshEdge& e : mesh.edges)
    if (e.on_boundary()) out << e.a << " " << e.b << " " << tag_to_char(e.tag) << "\n";
}

void write_mesh_file(const PolygonMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  VEM_REQUIRE(out.good(), "cannot open '", path, "' for writing");
  write_mesh(mesh, out);
  VEM_REQUIRE(out.good(), "error while writing '", path, "'");
}

PolygonMesh read_mesh(std::istream& in) {
  LineReader rd{in, 0, {}};
  if (!rd.next() || rd.line != kMagic) rd.fail("expected header '" + std::string(kMagic) + "'");

  auto expect_count = [&rd](const char* keyword) {
    if (!rd.next()) rd.fail(std::string("expected '") + keyword + " N'");
    std::istringstream ss(rd.line);
    std::string kw;
    long count = -1;
    ss >> kw >> count;
    if (kw != keyword || count < 0) rd.fail(std::string("expected '") + keyword + " N'");
    return count;
  };

  const long nv = expect_count("vertices");
  std::vector<Vec2> verts;
  verts.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!rd.next()) rd.fail("unexpected end of file in vertex list");
    std::istringstream ss(rd.line);
    Vec2 p;
    if (!(ss >> p.x >> p.y)) rd.fail("malformed vertex line");
    verts.push_back(p);
  }

  const long nc = expect_count("cells");
  std::vector<std::vector<int>> cells;
  cells.reserve(nc);
  for (long c = 0; c < nc; ++c) {
    if (!rd.next()) rd.fail("unexpected end of file in cell list");
    std::istringstream ss(rd.line);
    int k = 0;
    if (!(ss >> k) || k < 3) rd.fail("malformed cell line (vertex count)");
    std::vector<int> cyc(k);
    for (int i = 0; i < k; ++i) {
      if (!(ss >> cyc[i])) rd.fail("malformed cell line (too few indices)");
      if (cyc[i] < 0 || cyc[i] >= nv)
        rd.fail("cell references vertex index " + std::to_string(cyc[i]) + " out of range");
    }
    cells.push_back(std::move(cyc));
  }

  const long nb = expect_count("boundary");
  struct TagEntry { int a, b; BoundaryTag tag; };
  std::vector<TagEntry> tags;
  tags.reserve(nb);
  for (long i = 0; i < nb; ++i) {
    if (!rd.next()) rd.fail("unexpected end of file in boundary list");
    std::istringstream ss(rd.line);
    int a = -1, b = -1;
    std::string t;
    if (!(ss >> a >> b >> t) || t.size() != 1) rd.fail("malformed boundary line");
    const BoundaryTag tag = tag_from_char(t[0]);
    if (tag == BoundaryTag::None) rd.fail("unknown boundary tag '" + t + "'");
    if (a < 0 || a >= nv || b < 0 || b >= nv) rd.fail("boundary vertex index out of range");
    if (a > b) std::swap(a, b);
    tags.push_back({a, b, tag});
  }

  PolygonMesh mesh = build_mesh(std::move(verts), std::move(cells), tag_all(BoundaryTag::Free));
  for (MeshEdge& e : mesh.edges)
    if (e.on_boundary()) e.tag = BoundaryTag::None;
  for (const TagEntry& t : tags) {
    bool found = false;
    for (MeshEdge& e : mesh.edges) {
      if (e.a == t.a && e.b == t.b) {
        VEM_REQUIRE(e.on_boundary(), "mesh file tags interior edge (", t.a, ",", t.b, ")");
        e.tag = t.tag;
        found = true;
        break;
      }
    }
    VEM_REQUIRE(found, "mesh file tags nonexistent edge (", t.a, ",", t.b, ")");
  }
  for (const MeshEdge& e : mesh.edges)
    VEM_REQUIRE(!e.on_boundary() || e.tag != BoundaryTag::None,
                "mesh file leaves boundary edge (", e.a, ",", e.b, ") untagged");
  return mesh;
}

PolygonMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  VEM_REQUIRE(in.good(), "cannot open mesh file '", path, "'");
  return read_mesh(in);
}

}  // namespace vem
