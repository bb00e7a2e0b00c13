#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vem/material.hpp"
#include "vem/mesh.hpp"

namespace vem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One element of the mesh with its geometric quantities.
///
/// Local degree-of-freedom layout for an element with N vertices:
///   shear dofs (3N):       [tau_x(v0), tau_y(v0), ..., tau_y(v_{N-1}),
///                            edge mean of tau.t for edges (v0,v1) ... (v_{N-1},v0)]
///   deflection dofs (3N):  [v(v0), ..., v(v_{N-1}),
///                            dv/dx(v0), dv/dy(v0), ..., dv/dy(v_{N-1})]
///   combined (6N):         deflection dofs, then shear dofs.
/// Edge means use the counterclockwise (cycle) direction of the cell.
struct LocalElement {
  ElementGeometry geom;

  int n() const { return geom.n(); }
  int n_shear_dofs() const { return 3 * n(); }
  int n_combined_dofs() const { return 6 * n(); }

  const Vec2& vertex(int i) const { return geom.sides[i].a; }

  /// Scaled monomial basis of [P1]^2:
  /// {(1,0),(0,1),(xi,0),(0,xi),(eta,0),(0,eta)}, xi=(x-x_E)/h_E, eta=(y-y_E)/h_E.
  Vec2 p1_basis(int k, const Vec2& x) const;
  /// Constant strain tensor of the k-th basis field.
  SymMat2 p1_basis_strain(int k) const;
  /// Value of the [P1]^2 field with scaled-monomial coefficients c at x.
  Vec2 p1_eval(const Vector& coeffs, const Vec2& x) const;
};

LocalElement local_element(const PolygonMesh& mesh, int cell);
LocalElement local_element(std::vector<Vec2> polygon);

/// Boundary trace of the shear space: tau.t is the P2 matching the endpoint
/// tangential values and the edge mean; tau.n interpolates the endpoint normal
/// values linearly. `s` is the arclength parameter in [0, |e|].
Vec2 v_boundary_trace(const LocalElement& elem, const Vector& shear_dofs, int edge,
                      double s);

/// Shear dofs of the [P1]^2 scaled-monomial basis; columns are basis fields.
Matrix p1_dof_matrix(const LocalElement& elem);  // (3N x 6)

/// Map from deflection dofs to the shear dofs of the gradient. Vertex rows copy
/// the gradient values; edge rows use (v(b)-v(a))/|e|.
Matrix grad_dof_map(const LocalElement& elem);  // (3N x 3N)

/// Ritz-type projector onto [P1]^2 in the bending energy inner product with a
/// vertex-average side condition on the rigid modes.
struct ProjectorEps {
  Matrix coeffs_from_dofs;  // (6 x 3N), scaled-monomial coefficients
  Matrix dofs_from_coeffs;  // (3N x 6)
};
ProjectorEps pi_eps(const LocalElement& elem, const MaterialParams& material, int cell_id = -1);

/// L2 projector onto constant vector fields, computed from the boundary
/// tangential trace (members have constant rot).
Matrix pi_zero(const LocalElement& elem);  // (2 x 3N)

/// Dofs of constant fields (1,0) and (0,1).
Matrix p0_dof_matrix(const LocalElement& elem);  // (3N x 2)

/// Bending-energy Gram matrix of the scaled-monomial basis,
/// H_kl = |E| (C eps(m_k)) : eps(m_l).
Matrix p1_energy_matrix(const LocalElement& elem, const MaterialParams& material);  // 6x6

/// Row of boundary evaluations a^E(p, phi_j) for the polynomial with constant
/// strain `strain`, integrated by parts to the boundary. Shared by the
/// projector assembly and the consistency tests.
Vector a_boundary_row(const LocalElement& elem, const MaterialParams& material,
                      const SymMat2& strain);  // (3N)

/// Dof-space stabilization sigma_E * I with sigma_E the eigenvalue mean (trace
/// mean) of the projected consistency matrix.
Matrix stab_S(const LocalElement& elem, const ProjectorEps& proj,
              const MaterialParams& material);

/// Shear stabilization (lambda |E| / t^2) * I.
Matrix stab_S0(const LocalElement& elem, const MaterialParams& material);

/// a_h^E on shear dofs: consistency term plus stabilized complement.
Matrix local_a_h(const LocalElement& elem, const MaterialParams& material,
                 const ProjectorEps& proj, const Matrix& S);

/// b_h^E on shear dofs.
Matrix local_b_h(const LocalElement& elem, const MaterialParams& material,
                 const Matrix& P0, const Matrix& S0);

/// Combined local system on (deflection, shear) dofs.
Matrix local_system(const LocalElement& elem, const MaterialParams& material,
                    int cell_id = -1);

struct LocalLoad {
  Vector values;            // (3N) on deflection dofs; gradient entries are zero
  std::vector<double> weights;  // vertex quadrature weights
  double g_mean = 0.0;
  bool uniform_fallback = false;  // set when non-positive fan weights forced a fallback
};

/// Load vector <g_h, v_h>_h with P1-exact positive vertex weights. Falls back
/// to uniform weights (with a warning on stderr) if the fan construction
/// produces a non-positive weight on a strongly non-convex cell.
LocalLoad local_load(const LocalElement& elem, const std::function<double(Vec2)>& g,
                     int cell_id = -1);

}  // namespace vem
