#pragma once

#include <functional>
#include <vector>

#include "vem/local_vem.hpp"
#include "vem/mesh.hpp"

namespace vem {

/// Global numbering: five dofs per vertex (w, w_x, w_y, gamma_x, gamma_y) in
/// vertex-major order, then one tangential-mean dof per edge.
struct GlobalDofMap {
  int n_vertices = 0;
  int n_edges = 0;

  int w(int v) const { return 5 * v; }
  int wx(int v) const { return 5 * v + 1; }
  int wy(int v) const { return 5 * v + 2; }
  int gx(int v) const { return 5 * v + 3; }
  int gy(int v) const { return 5 * v + 4; }
  int edge(int e) const { return 5 * n_vertices + e; }
  int n_total() const { return 5 * n_vertices + n_edges; }
};

GlobalDofMap number_dofs(const PolygonMesh& mesh);

/// Homogeneous constraints realized as a prolongation from free dofs to all
/// dofs. Each full dof is a (possibly empty) linear combination of free dofs;
/// couplings such as gamma = -grad w stay within one vertex.
struct ConstraintSet {
  struct Term {
    int col;
    double coef;
  };
  int n_full = 0;
  int n_free = 0;
  std::vector<std::vector<Term>> rows;  // one entry per full dof

  Vector expand(const Vector& reduced) const;  // P u
  Vector reduce(const Vector& full) const;     // P^T f
};

ConstraintSet build_constraints(const PolygonMesh& mesh, const GlobalDofMap& dofmap);

/// Reduced symmetric system in upper-triangle CSR storage.
struct LinearSystem {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> cols;
  std::vector<double> vals;
  Vector rhs;

  Vector multiply(const Vector& x) const;  // symmetric matvec
  Matrix to_dense() const;                 // tests only; small systems
};

/// Per-cell combined-dof gather: global ids and the +-1 orientation factor of
/// the edge-mean dofs (the tangential mean is odd under direction reversal).
struct CellGather {
  std::vector<int> dofs;
  std::vector<double> signs;
};
CellGather cell_gather(const PolygonMesh& mesh, const GlobalDofMap& dofmap, int cell);

using LoadFunction = std::function<double(Vec2)>;

LinearSystem assemble(const PolygonMesh& mesh, const MaterialParams& material,
                      const LoadFunction& g, const GlobalDofMap& dofmap,
                      const ConstraintSet& constraints);

/// A_full * x without forming the global matrix (element-wise apply).
Vector apply_full_operator(const PolygonMesh& mesh, const MaterialParams& material,
                           const GlobalDofMap& dofmap, const Vector& x_full);

/// x^T A_full y, element-wise.
double full_operator_product(const PolygonMesh& mesh, const MaterialParams& material,
                             const GlobalDofMap& dofmap, const Vector& x_full,
                             const Vector& y_full);

/// Sparse Cholesky (LDLT) solve; verifies the relative residual.
Vector solve(const LinearSystem& system);

struct Solution {
  Vector full;               // all 5 Nv + Ne dofs
  std::vector<Vec2> theta;   // postprocessed rotations at vertices

  Vec2 grad_w(const GlobalDofMap& d, int v) const { return {full[d.wx(v)], full[d.wy(v)]}; }
  Vec2 gamma(const GlobalDofMap& d, int v) const { return {full[d.gx(v)], full[d.gy(v)]}; }
};

Solution expand_solution(const Vector& reduced, const ConstraintSet& constraints,
                         const GlobalDofMap& dofmap);

}  // namespace vem
