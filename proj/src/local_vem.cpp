#include "vem/local_vem.hpp"
#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>

#include "vem/error.hpp"

namespace vem {

namespace {

// P2 on [0,1] from endpoint values and the mean: q(0)=va, q(1)=vb, int q = mu.
inline double p2_from_mean(double va, double vb, double mu, double s) {
  const double c2 = 3.0 * (va + vb) - 6.0 * mu;
  const double c1 = vb - va - c2;
  return va + c1 * s + c2 * s * s;
}

// Shape values of the P2 trace at parameter s: weights of (va, vb, mu).
inline void p2_shape(double s, double& wa, double& wb, double& wm) {
  wa = p2_from_mean(1, 0, 0, s);
  wb = p2_from_mean(0, 1, 0, s);
  wm = p2_from_mean(0, 0, 1, s);
}

}  // namespace

Vec2 LocalElement::p1_basis(int k, const Vec2& x) const {
  const double xi = (x.x - geom.centroid.x) / geom.diameter;
  const double eta = (x.y - geom.centroid.y) / geom.diameter;
  switch (k) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {xi, 0};
    case 3: return {0, xi};
    case 4: return {eta, 0};
    case 5: return {0, eta};
  }
  throw Error("p1_basis: index out of range");
}

SymMat2 LocalElement::p1_basis_strain(int k) const {
  const double ih = 1.0 / geom.diameter;
  switch (k) {
    case 0:
    case 1: return {};
    case 2: return {ih, 0, 0};
    case 3: return {0, 0, 0.5 * ih};
    case 4: return {0, 0, 0.5 * ih};
    case 5: return {0, ih, 0};
  }
  throw Error("p1_basis_strain: index out of range");
}

Vec2 LocalElement::p1_eval(const Vector& coeffs, const Vec2& x) const {
  Vec2 out;
  for (int k = 0; k < 6; ++k) out += p1_basis(k, x) * coeffs[k];
  return out;
}

LocalElement local_element(const PolygonMesh& mesh, int cell) {
  return LocalElement{element_geometry(mesh, cell)};
}

LocalElement local_element(std::vector<Vec2> polygon) {
  PolygonMesh m;
  m.vertices = polygon;
  std::vector<int> cyc(polygon.size());
  for (std::size_t i = 0; i < polygon.size(); ++i) cyc[i] = static_cast<int>(i);
  m.cells.push_back(cyc);
  return LocalElement{element_geometry(m, 0)};
}

Vec2 v_boundary_trace(const LocalElement& elem, const Vector& dofs, int edge, double s) {
  const int n = elem.n();
  VEM_REQUIRE(dofs.size() == 3 * n, "v_boundary_trace: dof vector has wrong size");
  const auto& side = elem.geom.sides[edge];
  VEM_REQUIRE(s >= -1e-12 && s <= side.length * (1 + 1e-12),
              "v_boundary_trace: parameter outside the edge");
  const int ia = edge;
  const int ib = (edge + 1) % n;
  const Vec2 ta{dofs[2 * ia], dofs[2 * ia + 1]};
  const Vec2 tb{dofs[2 * ib], dofs[2 * ib + 1]};
  const double mean = dofs[2 * n + edge];
  const double u = s / side.length;
  const double qt = p2_from_mean(ta.dot(side.tangent), tb.dot(side.tangent), mean, u);
  const double qn = (1.0 - u) * ta.dot(side.normal) + u * tb.dot(side.normal);
  return side.tangent * qt + side.normal * qn;
}

Matrix p1_dof_matrix(const LocalElement& elem) {
  const int n = elem.n();
  Matrix D(3 * n, 6);
  for (int k = 0; k < 6; ++k) {
    for (int i = 0; i < n; ++i) {
      const Vec2 v = elem.p1_basis(k, elem.vertex(i));
      D(2 * i, k) = v.x;
      D(2 * i + 1, k) = v.y;
    }
    for (int e = 0; e < n; ++e) {
      const auto& side = elem.geom.sides[e];
      // For a linear field the edge mean is the midpoint value.
      D(2 * n + e, k) = elem.p1_basis(k, (side.a + side.b) * 0.5).dot(side.tangent);
    }
  }
  return D;
}

Matrix grad_dof_map(const LocalElement& elem) {
  const int n = elem.n();
  Matrix G = Matrix::Zero(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    G(2 * i, n + 2 * i) = 1.0;      // grad_x value dof
    G(2 * i + 1, n + 2 * i + 1) = 1.0;
  }
  for (int e = 0; e < n; ++e) {
    // (1/|e|) int_e grad(v).t = (v(b) - v(a)) / |e|
    const int a = e;
    const int b = (e + 1) % n;
    G(2 * n + e, b) = 1.0 / elem.geom.sides[e].length;
    G(2 * n + e, a) = -1.0 / elem.geom.sides[e].length;
  }
  return G;
}

Vector a_boundary_row(const LocalElement& elem, const MaterialParams& material,
                      const SymMat2& strain) {
  const int n = elem.n();
  const BendingTensor C(material);
  const SymMat2 sigma = C.apply(strain);
  Vector row = Vector::Zero(3 * n);
  const GaussRule& gauss = edge_gauss3();
  for (int e = 0; e < n; ++e) {
    const auto& side = elem.geom.sides[e];
    const Vec2 traction = sigma.apply(side.normal);  // constant along the edge
    const double ct = traction.dot(side.tangent);
    const double cn = traction.dot(side.normal);
    const int ia = e;
    const int ib = (e + 1) % n;
    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      const double s = gauss.points[q];
      const double w = gauss.weights[q] * side.length;
      double wa, wb, wm;
      p2_shape(s, wa, wb, wm);
      // tau.t couples tangential endpoint values and the mean dof; tau.n is linear.
      row[2 * ia] += w * (ct * wa * side.tangent.x + cn * (1 - s) * side.normal.x);
      row[2 * ia + 1] += w * (ct * wa * side.tangent.y + cn * (1 - s) * side.normal.y);
      row[2 * ib] += w * (ct * wb * side.tangent.x + cn * s * side.normal.x);
      row[2 * ib + 1] += w * (ct * wb * side.tangent.y + cn * s * side.normal.y);
      row[2 * n + e] += w * ct * wm;
    }
  }
  return row;
}

Matrix p1_energy_matrix(const LocalElement& elem, const MaterialParams& material) {
  const BendingTensor C(material);
  Matrix H(6, 6);
  for (int k = 0; k < 6; ++k)
    for (int l = 0; l < 6; ++l)
      H(k, l) = elem.geom.area * C.contract(elem.p1_basis_strain(k), elem.p1_basis_strain(l));
  return H;
}

ProjectorEps pi_eps(const LocalElement& elem, const MaterialParams& material, int cell_id) {
  const int n = elem.n();
  const double h = elem.geom.diameter;
  const Vec2 xe = elem.geom.centroid;

  // Kernel of a^E on [P1]^2: translations and the rigid rotation.
  auto kernel_field = [&](int r, const Vec2& x) -> Vec2 {
    switch (r) {
      case 0: return {1, 0};
      case 1: return {0, 1};
      default: return {-(x.y - xe.y) / h, (x.x - xe.x) / h};
    }
  };
  // Complement basis with nonzero strain: (xi,0), (0,eta), (eta,xi).
  auto complement_strain = [&](int r) -> SymMat2 {
    const double ih = 1.0 / h;
    switch (r) {
      case 0: return {ih, 0, 0};
      case 1: return {0, ih, 0};
      default: return {0, 0, ih};
    }
  };

  Matrix G(6, 6);
  Matrix B(6, 3 * n);
  B.setZero();
  const BendingTensor C(material);
  for (int r = 0; r < 3; ++r) {
    // Vertex-average pairing rows against the kernel basis.
    for (int k = 0; k < 6; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += kernel_field(r, elem.vertex(i)).dot(elem.p1_basis(k, elem.vertex(i)));
      G(r, k) = acc / n;
    }
    for (int i = 0; i < n; ++i) {
      const Vec2 kv = kernel_field(r, elem.vertex(i));
      B(r, 2 * i) = kv.x / n;
      B(r, 2 * i + 1) = kv.y / n;
    }
    // Energy rows against the complement basis, boundary-integrated.
    const SymMat2 eps_q = complement_strain(r);
    for (int k = 0; k < 6; ++k)
      G(3 + r, k) = elem.geom.area * C.contract(eps_q, elem.p1_basis_strain(k));
    B.row(3 + r) = a_boundary_row(elem, material, eps_q).transpose();
  }

  Eigen::FullPivLU<Matrix> lu(G);
  VEM_REQUIRE(lu.isInvertible(), "pi_eps: singular projector system on cell ", cell_id);
  ProjectorEps proj;
  proj.coeffs_from_dofs = lu.solve(B);
  proj.dofs_from_coeffs = p1_dof_matrix(elem);
  return proj;
}

Matrix pi_zero(const LocalElement& elem) {
  const int n = elem.n();
  Matrix P0 = Matrix::Zero(2, 3 * n);
  const GaussRule& gauss = edge_gauss3();
  const Vec2 xe = elem.geom.centroid;
  for (int e = 0; e < n; ++e) {
    const auto& side = elem.geom.sides[e];
    const int ia = e;
    const int ib = (e + 1) % n;
    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      const double s = gauss.points[q];
      const double w = gauss.weights[q] * side.length;
      const Vec2 x = side.a + (side.b - side.a) * s;
      double wa, wb, wm;
      p2_shape(s, wa, wb, wm);
      // int_E tau . (1,0) = -int_bnd (tau.t)(y - y_E); second component with +(x - x_E).
      const double f0 = -(x.y - xe.y);
      const double f1 = (x.x - xe.x);
      const double ca = w * wa, cb = w * wb, cm = w * wm;
      P0(0, 2 * ia) += f0 * ca * side.tangent.x;
      P0(0, 2 * ia + 1) += f0 * ca * side.tangent.y;
      P0(0, 2 * ib) += f0 * cb * side.tangent.x;
      P0(0, 2 * ib + 1) += f0 * cb * side.tangent.y;
      P0(0, 2 * n + e) += f0 * cm;
      P0(1, 2 * ia) += f1 * ca * side.tangent.x;
      P0(1, 2 * ia + 1) += f1 * ca * side.tangent.y;
      P0(1, 2 * ib) += f1 * cb * side.tangent.x;
      P0(1, 2 * ib + 1) += f1 * cb * side.tangent.y;
      P0(1, 2 * n + e) += f1 * cm;
    }
  }
  return P0 / elem.geom.area;
}

Matrix p0_dof_matrix(const LocalElement& elem) {
  const int n = elem.n();
  Matrix D0 = Matrix::Zero(3 * n, 2);
  for (int i = 0; i < n; ++i) {
    D0(2 * i, 0) = 1.0;
    D0(2 * i + 1, 1) = 1.0;
  }
  for (int e = 0; e < n; ++e) {
    D0(2 * n + e, 0) = elem.geom.sides[e].tangent.x;
    D0(2 * n + e, 1) = elem.geom.sides[e].tangent.y;
  }
  return D0;
}

Matrix stab_S(const LocalElement& elem, const ProjectorEps& proj,
              const MaterialParams& material) {
  const Matrix H = p1_energy_matrix(elem, material);
  // sigma_E is the top eigenvalue of the consistency matrix P^T H P (which has
  // exactly three nonzero eigenvalues), so the stabilizing term scales like
  // a^E itself.
  const Matrix consistency =
      proj.coeffs_from_dofs.transpose() * H * proj.coeffs_from_dofs;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(consistency);
  VEM_REQUIRE(eig.info() == Eigen::Success, "stab_S: eigenvalue computation failed");
  const double sigma = eig.eigenvalues().maxCoeff();
  VEM_REQUIRE(sigma > 0, "stab_S: non-positive scaling factor");
  return sigma * Matrix::Identity(elem.n_shear_dofs(), elem.n_shear_dofs());
}

Matrix stab_S0(const LocalElement& elem, const MaterialParams& material) {
  // Area scaling matches the mass form b^E = lambda t^-2 (.,.)_{0,E}, which is
  // what the two-sided stability bounds on S0 require.
  const double t = material.thickness;
  const double s0 = material.lambda() * elem.geom.area / (t * t);
  return s0 * Matrix::Identity(elem.n_shear_dofs(), elem.n_shear_dofs());
}

Matrix local_a_h(const LocalElement& elem, const MaterialParams& material,
                 const ProjectorEps& proj, const Matrix& S) {
  const Matrix H = p1_energy_matrix(elem, material);
  const Matrix& P = proj.coeffs_from_dofs;
  const Matrix R = Matrix::Identity(elem.n_shear_dofs(), elem.n_shear_dofs()) -
                   proj.dofs_from_coeffs * P;
  return P.transpose() * H * P + R.transpose() * S * R;
}

Matrix local_b_h(const LocalElement& elem, const MaterialParams& material,
                 const Matrix& P0, const Matrix& S0) {
  const double t = material.thickness;
  const double coef = material.lambda() / (t * t) * elem.geom.area;
  const Matrix R = Matrix::Identity(elem.n_shear_dofs(), elem.n_shear_dofs()) -
                   p0_dof_matrix(elem) * P0;
  return coef * P0.transpose() * P0 + R.transpose() * S0 * R;
}

Matrix local_system(const LocalElement& elem, const MaterialParams& material, int cell_id) {
  const int nd = elem.n_shear_dofs();
  const ProjectorEps proj = pi_eps(elem, material, cell_id);
  const Matrix A = local_a_h(elem, material, proj, stab_S(elem, proj, material));
  const Matrix B = local_b_h(elem, material, pi_zero(elem), stab_S0(elem, material));
  const Matrix G = grad_dof_map(elem);

  Matrix K(2 * nd, 2 * nd);
  const Matrix AG = A * G;
  K.topLeftCorner(nd, nd) = G.transpose() * AG;
  K.topRightCorner(nd, nd) = AG.transpose();
  K.bottomLeftCorner(nd, nd) = AG;
  K.bottomRightCorner(nd, nd) = A + B;
  return K;
}

LocalLoad local_load(const LocalElement& elem, const std::function<double(Vec2)>& g,
                     int cell_id) {
  const int n = elem.n();
  LocalLoad load;
  load.values = Vector::Zero(3 * n);

  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = elem.vertex(i);
  load.g_mean = integrate_polygon(pts, g) / elem.geom.area;

  // Vertex-mean fan in centroid-shifted coordinates: each signed sub-triangle
  // (v_i, v_{i+1}, c) gives |T|/3 to its two polygon vertices, and the centroid
  // share spreads evenly because a linear function at the vertex mean equals
  // the mean of the vertex values.
  std::vector<Vec2> loc(n);
  for (int i = 0; i < n; ++i) loc[i] = pts[i] - elem.geom.centroid;
  const Vec2 c = polygon_vertex_mean(loc);
  load.weights.assign(n, 0.0);
  double fan_total = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = loc[i];
    const Vec2& b = loc[(i + 1) % n];
    const double t_area = 0.5 * (b - a).cross(c - a);  // signed
    load.weights[i] += t_area / 3.0;
    load.weights[(i + 1) % n] += t_area / 3.0;
    fan_total += t_area;
  }
  for (int i = 0; i < n; ++i) load.weights[i] += fan_total / (3.0 * n);

  bool positive = true;
  for (double w : load.weights) positive = positive && (w > 0);
  if (!positive) {
    std::cerr << "local_load: non-positive fan weight on cell " << cell_id
              << "; falling back to uniform weights (P1 exactness lost)\n";
    load.uniform_fallback = true;
    for (int i = 0; i < n; ++i) load.weights[i] = elem.geom.area / n;
  } else {
    // P1 exactness: total mass and the (centered) first moments.
    double s0 = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      s0 += load.weights[i];
      sx += load.weights[i] * loc[i].x;
      sy += load.weights[i] * loc[i].y;
    }
    const double tol = 1e-12 * n * elem.geom.area;
    const double h = elem.geom.diameter;
    VEM_REQUIRE(std::abs(s0 - elem.geom.area) <= tol && std::abs(sx) <= tol * h &&
                    std::abs(sy) <= tol * h,
                "local_load: weight exactness check failed on cell ", cell_id);
  }

  for (int i = 0; i < n; ++i) load.values[i] = load.g_mean * load.weights[i];
  return load;
}

}  // namespace vem
