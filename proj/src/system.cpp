#include "vem/system.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "vem/error.hpp"

namespace vem {

GlobalDofMap number_dofs(const PolygonMesh& mesh) {
  return GlobalDofMap{mesh.n_vertices(), mesh.n_edges()};
}

Vector ConstraintSet::expand(const Vector& reduced) const {
  VEM_REQUIRE(reduced.size() == n_free, "ConstraintSet::expand: size mismatch");
  Vector full = Vector::Zero(n_full);
  for (int i = 0; i < n_full; ++i)
    for (const Term& t : rows[i]) full[i] += t.coef * reduced[t.col];
  return full;
}

Vector ConstraintSet::reduce(const Vector& full) const {
  VEM_REQUIRE(full.size() == n_full, "ConstraintSet::reduce: size mismatch");
  Vector out = Vector::Zero(n_free);
  for (int i = 0; i < n_full; ++i)
    for (const Term& t : rows[i]) out[t.col] += t.coef * full[i];
  return out;
}

ConstraintSet build_constraints(const PolygonMesh& mesh, const GlobalDofMap& dofmap) {
  const int nv = mesh.n_vertices();
  struct VertexState {
    bool w_zero = false;
    bool gamma_tied = false;          // gamma = -grad w
    std::vector<Vec2> tangents;       // directions with grad w . t = 0
  };
  std::vector<VertexState> vs(nv);
  std::vector<char> mean_zero(mesh.n_edges(), 0);

  auto add_tangent = [](VertexState& s, const Vec2& t) {
    for (const Vec2& u : s.tangents)
      if (std::abs(u.cross(t)) < 1e-12) return;
    s.tangents.push_back(t);
  };

  for (int e = 0; e < mesh.n_edges(); ++e) {
    const MeshEdge& edge = mesh.edges[e];
    if (!edge.on_boundary()) continue;
    if (edge.tag == BoundaryTag::Free) continue;
    const Vec2 t = (mesh.vertices[edge.b] - mesh.vertices[edge.a]).normalized();
    for (int v : {edge.a, edge.b}) {
      vs[v].w_zero = true;         // v_h = 0 on the edge: endpoint values ...
      add_tangent(vs[v], t);       // ... and endpoint tangential derivatives
      if (edge.tag == BoundaryTag::Clamped) vs[v].gamma_tied = true;
    }
    if (edge.tag == BoundaryTag::Clamped) mean_zero[e] = 1;
  }

  ConstraintSet cs;
  cs.n_full = dofmap.n_total();
  cs.rows.resize(cs.n_full);
  int col = 0;
  auto free_dof = [&](int dof) { cs.rows[dof] = {{col++, 1.0}}; };

  for (int v = 0; v < nv; ++v) {
    const VertexState& s = vs[v];
    if (!s.w_zero) free_dof(dofmap.w(v));

    // Gradient: 0 tangent constraints -> both components free; 1 -> the normal
    // component remains as a single parameter; 2 independent -> grad w = 0.
    std::vector<ConstraintSet::Term> gx_row, gy_row;
    if (s.tangents.empty()) {
      gx_row = {{col++, 1.0}};
      gy_row = {{col++, 1.0}};
    } else if (s.tangents.size() == 1) {
      const Vec2 n = s.tangents[0].perp();
      const int param = col++;
      if (std::abs(n.x) > 1e-14) gx_row = {{param, n.x}};
      if (std::abs(n.y) > 1e-14) gy_row = {{param, n.y}};
    }
    cs.rows[dofmap.wx(v)] = gx_row;
    cs.rows[dofmap.wy(v)] = gy_row;

    if (s.gamma_tied) {
      auto negate = [](std::vector<ConstraintSet::Term> row) {
        for (auto& t : row) t.coef = -t.coef;
        return row;
      };
      cs.rows[dofmap.gx(v)] = negate(gx_row);
      cs.rows[dofmap.gy(v)] = negate(gy_row);
    } else {
      free_dof(dofmap.gx(v));
      free_dof(dofmap.gy(v));
    }
  }
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (!mean_zero[e]) free_dof(dofmap.edge(e));

  cs.n_free = col;
  return cs;
}

CellGather cell_gather(const PolygonMesh& mesh, const GlobalDofMap& dofmap, int cell) {
  const auto& cyc = mesh.cells[cell];
  const int n = static_cast<int>(cyc.size());
  CellGather g;
  g.dofs.resize(6 * n);
  g.signs.assign(6 * n, 1.0);
  for (int i = 0; i < n; ++i) {
    g.dofs[i] = dofmap.w(cyc[i]);
    g.dofs[n + 2 * i] = dofmap.wx(cyc[i]);
    g.dofs[n + 2 * i + 1] = dofmap.wy(cyc[i]);
    g.dofs[3 * n + 2 * i] = dofmap.gx(cyc[i]);
    g.dofs[3 * n + 2 * i + 1] = dofmap.gy(cyc[i]);
  }
  for (int i = 0; i < n; ++i) {
    g.dofs[5 * n + i] = dofmap.edge(mesh.cell_edges[cell][i]);
    g.signs[5 * n + i] = mesh.edge_orientation(cell, i);
  }
  return g;
}

Vector LinearSystem::multiply(const Vector& x) const {
  Vector y = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const int j = cols[k];
      y[i] += vals[k] * x[j];
      if (j != i) y[j] += vals[k] * x[i];
    }
  }
  return y;
}

Matrix LinearSystem::to_dense() const {
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      A(i, cols[k]) = vals[k];
      A(cols[k], i) = vals[k];
    }
  }
  return A;
}

namespace {

// Expanded constraint terms of one cell's combined dofs, orientation included.
std::vector<std::vector<ConstraintSet::Term>> expand_gather(const CellGather& g,
                                                            const ConstraintSet& cs) {
  std::vector<std::vector<ConstraintSet::Term>> out(g.dofs.size());
  for (std::size_t i = 0; i < g.dofs.size(); ++i) {
    for (const auto& t : cs.rows[g.dofs[i]])
      out[i].push_back({t.col, t.coef * g.signs[i]});
  }
  return out;
}

}  // namespace

LinearSystem assemble(const PolygonMesh& mesh, const MaterialParams& material,
                      const LoadFunction& g, const GlobalDofMap& dofmap,
                      const ConstraintSet& constraints) {
  material.validate();
  LinearSystem sys;
  sys.n = constraints.n_free;
  sys.rhs = Vector::Zero(sys.n);

  // Sparsity pattern via mesh entities (vertices, then edges). Free columns of
  // distinct entities are disjoint, so entity pairs expand to unique dof pairs.
  const int nv = mesh.n_vertices();
  const int nent = nv + mesh.n_edges();
  std::vector<std::vector<int>> entity_cols(nent);
  for (int v = 0; v < nv; ++v) {
    std::vector<int>& cols = entity_cols[v];
    for (int d = 5 * v; d < 5 * v + 5; ++d)
      for (const auto& t : constraints.rows[d]) cols.push_back(t.col);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  }
  for (int e = 0; e < mesh.n_edges(); ++e)
    for (const auto& t : constraints.rows[dofmap.edge(e)])
      entity_cols[nv + e].push_back(t.col);

  std::vector<std::pair<int, int>> pairs;
  {
    std::vector<int> ent;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      ent.clear();
      for (int v : mesh.cells[c]) ent.push_back(v);
      for (int e : mesh.cell_edges[c]) ent.push_back(nv + e);
      for (std::size_t i = 0; i < ent.size(); ++i)
        for (std::size_t j = i; j < ent.size(); ++j)
          pairs.emplace_back(std::min(ent[i], ent[j]), std::max(ent[i], ent[j]));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  }

  std::vector<int> count(sys.n, 0);
  auto for_each_dof_pair = [&](auto&& fn) {
    for (const auto& [u, v] : pairs) {
      for (int a : entity_cols[u]) {
        for (int b : entity_cols[v]) {
          if (u == v && b < a) continue;
          fn(std::min(a, b), std::max(a, b));
        }
      }
    }
  };
  for_each_dof_pair([&](int r, int) { ++count[r]; });
  sys.row_ptr.assign(sys.n + 1, 0);
  for (int i = 0; i < sys.n; ++i) sys.row_ptr[i + 1] = sys.row_ptr[i] + count[i];
  sys.cols.resize(sys.row_ptr.back());
  {
    std::vector<int> fill = count;
    for_each_dof_pair([&](int r, int c) { sys.cols[sys.row_ptr[r + 1] - fill[r]--] = c; });
    for (int i = 0; i < sys.n; ++i)
      std::sort(sys.cols.begin() + sys.row_ptr[i], sys.cols.begin() + sys.row_ptr[i + 1]);
  }
  sys.vals.assign(sys.cols.size(), 0.0);

  auto entry = [&sys](int r, int c) -> double& {
    auto begin = sys.cols.begin() + sys.row_ptr[r];
    auto end = sys.cols.begin() + sys.row_ptr[r + 1];
    auto it = std::lower_bound(begin, end, c);
    VEM_REQUIRE(it != end && *it == c, "assemble: entry (", r, ",", c, ") not in pattern");
    return sys.vals[static_cast<std::size_t>(it - sys.cols.begin())];
  };

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalElement elem = local_element(mesh, c);
    const Matrix K = local_system(elem, material, c);
    const LocalLoad load = local_load(elem, g, c);
    const CellGather gather = cell_gather(mesh, dofmap, c);
    const auto terms = expand_gather(gather, constraints);
    const int nd = static_cast<int>(gather.dofs.size());
    for (int i = 0; i < nd; ++i) {
      for (const auto& ti : terms[i]) {
        if (i < 3 * elem.n()) sys.rhs[ti.col] += ti.coef * load.values[i];
        for (int j = 0; j < nd; ++j) {
          const double kij = K(i, j);
          if (kij == 0.0) continue;
          for (const auto& tj : terms[j]) {
            if (ti.col <= tj.col) entry(ti.col, tj.col) += ti.coef * tj.coef * kij;
          }
        }
      }
    }
  }
  return sys;
}

Vector apply_full_operator(const PolygonMesh& mesh, const MaterialParams& material,
                           const GlobalDofMap& dofmap, const Vector& x_full) {
  VEM_REQUIRE(x_full.size() == dofmap.n_total(), "apply_full_operator: size mismatch");
  Vector y = Vector::Zero(dofmap.n_total());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalElement elem = local_element(mesh, c);
    const Matrix K = local_system(elem, material, c);
    const CellGather g = cell_gather(mesh, dofmap, c);
    const int nd = static_cast<int>(g.dofs.size());
    Vector xloc(nd);
    for (int i = 0; i < nd; ++i) xloc[i] = g.signs[i] * x_full[g.dofs[i]];
    const Vector yloc = K * xloc;
    for (int i = 0; i < nd; ++i) y[g.dofs[i]] += g.signs[i] * yloc[i];
  }
  return y;
}

double full_operator_product(const PolygonMesh& mesh, const MaterialParams& material,
                             const GlobalDofMap& dofmap, const Vector& x_full,
                             const Vector& y_full) {
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalElement elem = local_element(mesh, c);
    const Matrix K = local_system(elem, material, c);
    const CellGather g = cell_gather(mesh, dofmap, c);
    const int nd = static_cast<int>(g.dofs.size());
    Vector xloc(nd), yloc(nd);
    for (int i = 0; i < nd; ++i) {
      xloc[i] = g.signs[i] * x_full[g.dofs[i]];
      yloc[i] = g.signs[i] * y_full[g.dofs[i]];
    }
    acc += xloc.dot(K * yloc);
  }
  return acc;
}

Vector solve(const LinearSystem& system) {
  if (system.n == 0) return Vector();

  // Symmetric Jacobi equilibration: the shear block scales like lambda/t^2 and
  // would otherwise dominate the bending block by many orders for thin plates.
  Vector scale = Vector::Ones(system.n);
  for (int i = 0; i < system.n; ++i) {
    for (int k = system.row_ptr[i]; k < system.row_ptr[i + 1]; ++k) {
      if (system.cols[k] == i && system.vals[k] > 0)
        scale[i] = 1.0 / std::sqrt(system.vals[k]);
    }
  }
  std::vector<double> scaled_vals(system.vals.size());
  for (int i = 0; i < system.n; ++i)
    for (int k = system.row_ptr[i]; k < system.row_ptr[i + 1]; ++k)
      scaled_vals[k] = scale[i] * system.vals[k] * scale[system.cols[k]];

  // The upper-triangle CSR arrays are exactly the lower-triangle CSC arrays of
  // the same symmetric matrix, which is what the solver wants.
  using SpMat = Eigen::SparseMatrix<double>;
  Eigen::Map<const SpMat> lower(system.n, system.n,
                                static_cast<Eigen::Index>(scaled_vals.size()),
                                system.row_ptr.data(), system.cols.data(),
                                scaled_vals.data());
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
  ldlt.compute(lower);
  VEM_REQUIRE(ldlt.info() == Eigen::Success,
              "solve: sparse factorization failed (matrix not SPD?)");

  auto scaled_solve = [&](const Vector& rhs) -> Vector {
    const Vector y = ldlt.solve((scale.array() * rhs.array()).matrix());
    VEM_REQUIRE(ldlt.info() == Eigen::Success, "solve: back substitution failed");
    return (scale.array() * y.array()).matrix();
  };

  Vector u = scaled_solve(system.rhs);
  const double fnorm = std::max(system.rhs.norm(), 1e-300);
  for (int pass = 0; pass < 3; ++pass) {  // iterative refinement
    const Vector r = system.rhs - system.multiply(u);
    if (r.norm() <= 1e-12 * fnorm) break;
    u += scaled_solve(r);
  }

  const double rnorm = (system.multiply(u) - system.rhs).norm();
  VEM_REQUIRE(rnorm <= 1e-8 * fnorm || rnorm <= 1e-14,
              "solve: residual check failed, |Au-f|/|f| = ", rnorm / fnorm);
  return u;
}

Solution expand_solution(const Vector& reduced, const ConstraintSet& constraints,
                         const GlobalDofMap& dofmap) {
  Solution sol;
  sol.full = constraints.expand(reduced);
  sol.theta.resize(dofmap.n_vertices);
  for (int v = 0; v < dofmap.n_vertices; ++v) {
    sol.theta[v] = Vec2{sol.full[dofmap.wx(v)] + sol.full[dofmap.gx(v)],
                        sol.full[dofmap.wy(v)] + sol.full[dofmap.gy(v)]};
  }
  return sol;
}

}  // namespace vem
