#include "vem/analysis.hpp"

#include <cmath>

#include "vem/error.hpp"

namespace vem {

namespace {

// x^3 (x-1)^3 and its derivatives; the building block of the clamped benchmark.
double poly_a(double x) { return std::pow(x, 3) * std::pow(x - 1, 3); }
double poly_a1(double x) { return 3 * x * x * (x - 1) * (x - 1) * (2 * x - 1); }
double poly_a2(double x) { return 6 * x * (x - 1) * (5 * x * x - 5 * x + 1); }
double poly_a3(double x) { return 6 * (2 * x - 1) * (10 * x * x - 10 * x + 1); }

}  // namespace

ExactSolution test1_exact(double t, double young, double poisson) {
  VEM_REQUIRE(t >= 0, "test1_exact: negative thickness");
  const double ct = 2.0 * t * t / (5.0 * (1.0 - poisson));
  const double c0 = young / (12.0 * (1.0 - poisson * poisson));

  ExactSolution s;
  s.w = [ct](Vec2 p) {
    const double x = p.x, y = p.y;
    return poly_a(x) * poly_a(y) / 3.0 -
           ct * (poly_a(y) * x * (x - 1) * (5 * x * x - 5 * x + 1) +
                 poly_a(x) * y * (y - 1) * (5 * y * y - 5 * y + 1));
  };
  s.grad_w = [ct](Vec2 p) {
    const double x = p.x, y = p.y;
    // second term is (1/6)(A''(x) B(y) + A(x) B''(y)) in the A = x^3(x-1)^3 notation
    return Vec2{poly_a1(x) * poly_a(y) / 3.0 -
                    ct / 6.0 * (poly_a3(x) * poly_a(y) + poly_a1(x) * poly_a2(y)),
                poly_a(x) * poly_a1(y) / 3.0 -
                    ct / 6.0 * (poly_a2(x) * poly_a1(y) + poly_a(x) * poly_a3(y))};
  };
  s.theta = [](Vec2 p) {
    const double x = p.x, y = p.y;
    return Vec2{poly_a(y) * x * x * (x - 1) * (x - 1) * (2 * x - 1),
                poly_a(x) * y * y * (y - 1) * (y - 1) * (2 * y - 1)};
  };
  s.g = [c0](Vec2 p) {
    const double x = p.x, y = p.y;
    const double rx = 5 * x * x - 5 * x + 1;
    const double ry = 5 * y * y - 5 * y + 1;
    return c0 * (12 * y * (y - 1) * rx * (2 * y * y * (y - 1) * (y - 1) + x * (x - 1) * ry) +
                 12 * x * (x - 1) * ry * (2 * x * x * (x - 1) * (x - 1) + y * (y - 1) * rx));
  };
  return s;
}

ExactSolution test2_kirchhoff(double a, double b, double young, double poisson) {
  VEM_REQUIRE(a > 0 && b > 0, "test2_kirchhoff: invalid rectangle");
  const double pi = M_PI;
  const double k2 = pi * pi * (1.0 / (a * a) + 1.0 / (b * b));
  const double amp = 12.0 * (1.0 - poisson * poisson) / (young * k2 * k2);

  ExactSolution s;
  s.w = [=](Vec2 p) { return amp * std::sin(pi * p.x / a) * std::sin(pi * p.y / b); };
  s.grad_w = [=](Vec2 p) {
    return Vec2{amp * pi / a * std::cos(pi * p.x / a) * std::sin(pi * p.y / b),
                amp * pi / b * std::sin(pi * p.x / a) * std::cos(pi * p.y / b)};
  };
  s.theta = s.grad_w;  // Kirchhoff limit: no shear
  s.g = [=](Vec2 p) { return std::sin(pi * p.x / a) * std::sin(pi * p.y / b); };
  return s;
}

Vector interpolate_dofs(const ExactSolution& exact, const PolygonMesh& mesh,
                        const GlobalDofMap& dofmap) {
  Vector dofs = Vector::Zero(dofmap.n_total());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2 p = mesh.vertices[v];
    dofs[dofmap.w(v)] = exact.w(p);
    const Vec2 gw = exact.grad_w(p);
    const Vec2 gamma = exact.gamma(p);
    dofs[dofmap.wx(v)] = gw.x;
    dofs[dofmap.wy(v)] = gw.y;
    dofs[dofmap.gx(v)] = gamma.x;
    dofs[dofmap.gy(v)] = gamma.y;
  }
  const GaussRule& gauss = edge_gauss3();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Vec2 pa = mesh.vertices[mesh.edges[e].a];
    const Vec2 pb = mesh.vertices[mesh.edges[e].b];
    const Vec2 t = (pb - pa).normalized();
    double mean = 0.0;
    for (std::size_t q = 0; q < gauss.points.size(); ++q)
      mean += gauss.weights[q] * exact.gamma(pa + (pb - pa) * gauss.points[q]).dot(t);
    dofs[dofmap.edge(e)] = mean;
  }
  return dofs;
}

double error_discrete_l2(ErrorKind kind, const Vector& exact_dofs, const Vector& solution,
                         const PolygonMesh& mesh, const GlobalDofMap& dofmap) {
  VEM_REQUIRE(exact_dofs.size() == dofmap.n_total() && solution.size() == dofmap.n_total(),
              "error_discrete_l2: dof vector size mismatch");
  auto vertex_sq = [&](const Vector& dofs, int v, const Vector& ref, bool diff) {
    auto value = [&](const Vector& d) -> Vec2 {
      switch (kind) {
        case ErrorKind::Deflection: return {d[dofmap.w(v)], 0.0};
        case ErrorKind::GradDeflection: return {d[dofmap.wx(v)], d[dofmap.wy(v)]};
        case ErrorKind::Rotation:
          return {d[dofmap.wx(v)] + d[dofmap.gx(v)], d[dofmap.wy(v)] + d[dofmap.gy(v)]};
      }
      return {};
    };
    const Vec2 a = value(dofs);
    return diff ? (a - value(ref)).norm2() : a.norm2();
  };

  double num = 0.0, den = 0.0;
  std::vector<Vec2> pts;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    pts.clear();
    for (int v : mesh.cells[c]) pts.push_back(mesh.vertices[v]);
    const double area = polygon_signed_area(pts);
    for (int v : mesh.cells[c]) {
      num += area * vertex_sq(solution, v, exact_dofs, true);
      den += area * vertex_sq(exact_dofs, v, exact_dofs, false);
    }
  }
  VEM_REQUIRE(den > 0, "error_discrete_l2: exact solution vanishes at all vertices");
  return std::sqrt(num / den);
}

double energy_error(const Vector& exact_dofs, const Vector& solution,
                    const PolygonMesh& mesh, const MaterialParams& material,
                    const GlobalDofMap& dofmap) {
  const Vector d = exact_dofs - solution;
  const double num = full_operator_product(mesh, material, dofmap, d, d);
  const double den = full_operator_product(mesh, material, dofmap, exact_dofs, exact_dofs);
  VEM_REQUIRE(den > 0, "energy_error: exact solution has zero energy");
  return std::sqrt(num / den);
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& error) {
  VEM_REQUIRE(h.size() == error.size() && h.size() >= 2,
              "fitted_order: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    VEM_REQUIRE(h[i] > 0 && error[i] > 0, "fitted_order: nonpositive data");
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateTable convergence_rates(const std::vector<std::pair<double, double>>& rows) {
  VEM_REQUIRE(rows.size() >= 2, "convergence_rates: need at least two rows");
  RateTable table;
  for (const auto& [h, e] : rows) {
    table.h.push_back(h);
    table.error.push_back(e);
  }
  table.fitted_order = fitted_order(table.h, table.error);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    table.pairwise_orders.push_back(std::log(rows[i].second / rows[i + 1].second) /
                                    std::log(rows[i].first / rows[i + 1].first));
  return table;
}

double corner_value(const Solution& solution, const PolygonMesh& mesh,
                    const GlobalDofMap& dofmap, const Vec2& point) {
  const int v = mesh.find_vertex(point, 1e-12 * std::max(1.0, mesh.domain_diameter()));
  VEM_REQUIRE(v >= 0, "corner_value: (", point.x, ",", point.y, ") is not a mesh vertex");
  return solution.full[dofmap.w(v)];
}

}  // namespace vem
