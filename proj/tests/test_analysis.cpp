#include <doctest.h>

#include <cmath>

#include "vem/analysis.hpp"
#include "vem/error.hpp"
#include "vem/rng.hpp"

using namespace vem;

namespace {

// central finite differences of w against the hand-differentiated gradient
void check_gradient(const ExactSolution& s, double lo, double hi, double step) {
  Rng rng(123);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{rng.uniform(lo + 0.05, hi - 0.05), rng.uniform(lo + 0.05, hi - 0.05)};
    const Vec2 fd{(s.w({p.x + step, p.y}) - s.w({p.x - step, p.y})) / (2 * step),
                  (s.w({p.x, p.y + step}) - s.w({p.x, p.y - step})) / (2 * step)};
    const Vec2 an = s.grad_w(p);
    const double scale = std::max(1e-12, an.norm());
    CHECK((fd - an).norm() <= 1e-6 * std::max(scale, 1e-3));
  }
}

}  // namespace

TEST_CASE("test1 exact solution") {
  const auto s = test1_exact(0.1, 1.0, 0.0);

  // frozen oracle value: w(1/2, 1/2) = 137/1536000 for t = 0.1, nu = 0
  CHECK(s.w({0.5, 0.5}) == doctest::Approx(137.0 / 1536000.0).epsilon(1e-14));

  // clamped compatibility on the whole boundary
  for (double y : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(s.w({0.0, y}) == doctest::Approx(0.0));
    CHECK(s.theta({0.0, y}).norm() == doctest::Approx(0.0));
    CHECK(s.theta({y, 1.0}).norm() == doctest::Approx(0.0));
  }
  // first rotation component vanishes on the symmetry line x = 1/2
  for (double y : {0.2, 0.6}) CHECK(s.theta({0.5, y}).x == doctest::Approx(0.0));

  check_gradient(s, 0.0, 1.0, 1e-5);

  // the t = 0 limit keeps only the bending part of w
  const auto s0 = test1_exact(0.0, 1.0, 0.0);
  auto bending = [](Vec2 p) {
    return std::pow(p.x, 3) * std::pow(p.x - 1, 3) * std::pow(p.y, 3) * std::pow(p.y - 1, 3) /
           3.0;
  };
  for (const Vec2 p : {Vec2{0.3, 0.8}, Vec2{0.5, 0.5}})
    CHECK(s0.w(p) == doctest::Approx(bending(p)).epsilon(1e-14));

  // load reconstruction: g = -div(lambda t^-2 (grad w - theta)), via finite
  // differences of gamma; g itself is independent of t
  const MaterialParams m(1.0, 0.0, 5.0 / 6.0, 0.1);
  const double lt2 = m.lambda() / (0.1 * 0.1);
  Rng rng(7);
  const double step = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Vec2 p{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
    const double div_gamma =
        (s.gamma({p.x + step, p.y}).x - s.gamma({p.x - step, p.y}).x) / (2 * step) +
        (s.gamma({p.x, p.y + step}).y - s.gamma({p.x, p.y - step}).y) / (2 * step);
    CHECK(lt2 * div_gamma ==
          doctest::Approx(s.g(p)).epsilon(1e-4));
  }
  const auto s_thin = test1_exact(1e-3, 1.0, 0.0);
  CHECK(s_thin.g({0.3, 0.7}) == doctest::Approx(s.g({0.3, 0.7})).epsilon(1e-14));
}

TEST_CASE("test2 Kirchhoff reference") {
  const double a = 1.0, b = 2.0, E = 1.0, nu = 0.3;
  const auto s = test2_kirchhoff(a, b, E, nu);

  const double expected =
      12.0 * (1.0 - nu * nu) / E /
      std::pow(M_PI * M_PI * (1.0 / (a * a) + 1.0 / (b * b)), 2);
  CHECK(s.w({a / 2, b / 2}) == doctest::Approx(expected).epsilon(1e-14));
  for (double x : {0.0, 0.4, 1.0}) {
    CHECK(s.w({x, 0.0}) == doctest::Approx(0.0));
    CHECK(s.w({x, b}) == doctest::Approx(0.0).epsilon(1e-12));
  }

  check_gradient(s, 0.0, 1.0, 1e-5);

  // biharmonic identity: E/(12(1-nu^2)) Delta^2 w0 = g; for the sine product
  // Delta^2 w0 = (pi^2 (1/a^2 + 1/b^2))^2 w0
  Rng rng(9);
  const double k2 = M_PI * M_PI * (1.0 / (a * a) + 1.0 / (b * b));
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{rng.uniform(0.0, a), rng.uniform(0.0, b)};
    const double lhs = E / (12 * (1 - nu * nu)) * k2 * k2 * s.w(p);
    CHECK(lhs == doctest::Approx(s.g(p)).epsilon(1e-9));
  }
}

TEST_CASE("interpolate_dofs on a global polynomial") {
  auto mesh = generate_mesh(MeshFamily::T1, 2, {1, 1}, 0, tag_all(BoundaryTag::Clamped));
  const auto dofmap = number_dofs(mesh);
  ExactSolution s;
  s.w = [](Vec2 p) { return p.x * p.x; };
  s.grad_w = [](Vec2 p) { return Vec2{2 * p.x, 0.0}; };
  s.theta = s.grad_w;  // gamma = 0
  s.g = [](Vec2) { return 0.0; };
  const Vector dofs = interpolate_dofs(s, mesh, dofmap);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2 p = mesh.vertices[v];
    CHECK(dofs[dofmap.w(v)] == doctest::Approx(p.x * p.x));
    CHECK(dofs[dofmap.wx(v)] == doctest::Approx(2 * p.x));
    CHECK(dofs[dofmap.gx(v)] == doctest::Approx(0.0));
  }
  for (int e = 0; e < mesh.n_edges(); ++e)
    CHECK(dofs[dofmap.edge(e)] == doctest::Approx(0.0));

  // shifting w by a constant only changes the w-value dofs
  ExactSolution shifted = s;
  shifted.w = [](Vec2 p) { return p.x * p.x + 3.0; };
  const Vector dofs2 = interpolate_dofs(shifted, mesh, dofmap);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    CHECK(dofs2[dofmap.w(v)] == doctest::Approx(dofs[dofmap.w(v)] + 3.0));
    CHECK(dofs2[dofmap.wx(v)] == dofs[dofmap.wx(v)]);
  }
}

TEST_CASE("discrete error norms") {
  auto mesh = generate_mesh(MeshFamily::T3, 2, {1, 1}, 2, tag_all(BoundaryTag::Clamped));
  const auto dofmap = number_dofs(mesh);

  Vector exact = Vector::Zero(dofmap.n_total());
  for (int v = 0; v < mesh.n_vertices(); ++v) exact[dofmap.w(v)] = 1.0;
  Vector sol = exact;
  CHECK(error_discrete_l2(ErrorKind::Deflection, exact, sol, mesh, dofmap) == 0.0);

  for (int v = 0; v < mesh.n_vertices(); ++v) sol[dofmap.w(v)] = 0.9;
  CHECK(error_discrete_l2(ErrorKind::Deflection, exact, sol, mesh, dofmap) ==
        doctest::Approx(0.1).epsilon(1e-12));

  // scale invariance of the relative norm
  CHECK(error_discrete_l2(ErrorKind::Deflection, 7.0 * exact, 7.0 * sol, mesh, dofmap) ==
        doctest::Approx(0.1).epsilon(1e-12));

  Vector zero = Vector::Zero(dofmap.n_total());
  CHECK_THROWS_AS(error_discrete_l2(ErrorKind::Deflection, zero, sol, mesh, dofmap), Error);
}

TEST_CASE("energy error homogeneity") {
  auto mesh = generate_mesh(MeshFamily::T1, 2, {1, 1}, 0, tag_all(BoundaryTag::Clamped));
  const auto dofmap = number_dofs(mesh);
  const MaterialParams m(1.0, 0.0, 5.0 / 6.0, 0.1);
  const auto exact = test1_exact(0.1, 1.0, 0.0);
  const Vector xe = interpolate_dofs(exact, mesh, dofmap);

  CHECK(energy_error(xe, xe, mesh, m, dofmap) == doctest::Approx(0.0));

  Rng rng(15);
  Vector d(dofmap.n_total());
  for (int i = 0; i < d.size(); ++i) d[i] = rng.uniform(-1.0, 1.0) * 1e-3;
  const double e1 = energy_error(xe, xe - d, mesh, m, dofmap);
  const double e2 = energy_error(xe, xe - 2.0 * d, mesh, m, dofmap);
  CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));
}

TEST_CASE("convergence rates") {
  const auto quad = convergence_rates({{0.25, 0.0625}, {0.125, 0.015625}, {0.0625, 0.00390625}});
  CHECK(quad.fitted_order == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quad.pairwise_orders[0] == doctest::Approx(2.0).epsilon(1e-12));

  const auto lin = convergence_rates({{0.2, 0.6}, {0.1, 0.3}, {0.05, 0.15}});
  CHECK(lin.fitted_order == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(convergence_rates({{0.25, 0.1}}), Error);
}

TEST_CASE("corner value") {
  auto mesh = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}},
                         tag_all(BoundaryTag::Clamped));
  const auto dofmap = number_dofs(mesh);
  Solution sol;
  sol.full = Vector::Zero(dofmap.n_total());
  sol.theta.resize(4);
  CHECK(corner_value(sol, mesh, dofmap, {0.0, 0.0}) == 0.0);
  sol.full[dofmap.w(2)] = 0.25;
  CHECK(corner_value(sol, mesh, dofmap, {1.0, 1.0}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(corner_value(sol, mesh, dofmap, {0.5, 0.5}), Error);
}
