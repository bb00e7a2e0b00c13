#pragma once

#include <functional>
#include <vector>

#include "vem/system.hpp"

namespace vem {

/// Closed-form exact solution of a plate problem. gamma is always derived as
/// theta - grad w; it is not stored independently.
struct ExactSolution {
  std::function<double(Vec2)> w;
  std::function<Vec2(Vec2)> grad_w;
  std::function<Vec2(Vec2)> theta;
  std::function<double(Vec2)> g;

  Vec2 gamma(const Vec2& x) const { return theta(x) - grad_w(x); }
};

/// Clamped unit-square benchmark with a known Reissner-Mindlin solution.
/// The load is reconstructed from the strong form; it is independent of t.
ExactSolution test1_exact(double t, double young, double poisson);

/// Kirchhoff-Love limit solution on the simply supported rectangle
/// (0,a) x (0,b) under g = sin(pi x / a) sin(pi y / b). theta = grad w0.
ExactSolution test2_kirchhoff(double a, double b, double young, double poisson);

/// Samples the exact solution into a full dof vector: vertex values pointwise,
/// edge means of gamma . t by 3-point Gauss along the (canonical) edge.
Vector interpolate_dofs(const ExactSolution& exact, const PolygonMesh& mesh,
                        const GlobalDofMap& dofmap);

enum class ErrorKind { Deflection, GradDeflection, Rotation };

/// Relative vertex-based discrete L2 error: cells contribute |E| times the sum
/// of squared vertex differences (a vertex shared by k cells counts k times).
double error_discrete_l2(ErrorKind kind, const Vector& exact_dofs, const Vector& solution,
                         const PolygonMesh& mesh, const GlobalDofMap& dofmap);

/// Relative energy error through the assembled (unconstrained) discrete form.
double energy_error(const Vector& exact_dofs, const Vector& solution,
                    const PolygonMesh& mesh, const MaterialParams& material,
                    const GlobalDofMap& dofmap);

struct ErrorReport {
  double h = 0.0;
  int n_dof = 0;
  double e_w = 0.0;
  double e_grad_w = 0.0;
  double e_theta = 0.0;
  double e_energy = 0.0;
  double thickness = 0.0;
};

struct RateTable {
  std::vector<double> h;
  std::vector<double> error;
  double fitted_order = 0.0;            // least-squares slope of log e vs log h
  std::vector<double> pairwise_orders;  // log(e_i/e_{i+1}) / log(h_i/h_{i+1})
};

RateTable convergence_rates(const std::vector<std::pair<double, double>>& rows);

/// Least-squares slope of log(error) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& error);

/// The deflection dof at the given mesh vertex.
double corner_value(const Solution& solution, const PolygonMesh& mesh,
                    const GlobalDofMap& dofmap, const Vec2& point);

}  // namespace vem
