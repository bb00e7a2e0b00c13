#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vem/analysis.hpp"
#include "vem/system.hpp"

namespace vem {

/// Configuration of one CLI run. Defaults reproduce the benchmark setups:
/// test1: clamped unit square, E=1, nu=0, k=5/6, t in {1e-1, 1e-2, 1e-3};
/// test2: simply supported (0,1)x(0,2), E=1, nu=0.3, t in {1e-1 ... 1e-5};
/// test3: L-shaped plate, E=1, nu=0, k=5/6, t=1e-1.
struct RunConfig {
  std::string experiment;               // test1 | test2 | test3 | solve | meshgen
  std::vector<MeshFamily> families;
  std::vector<int> levels;              // empty = per-family defaults
  std::vector<double> thicknesses;      // empty = per-experiment defaults
  std::optional<double> young;
  std::optional<double> poisson;
  std::optional<double> shear_factor;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string mesh_path;                // solve only
  std::string load = "zero";            // solve: zero | one | test1 | test2
  std::string exact;                    // solve: "" | test1 | test2
  int level = 8;                        // meshgen only
  double width = 1.0;
  double height = 1.0;
  std::string bc = "clamped";           // meshgen: clamped | ss | free | test3
};

/// Per-family default refinement ladders for each experiment.
std::vector<int> default_levels(const std::string& experiment, MeshFamily family);

TagRule test3_boundary_rule();

MaterialParams config_material(const RunConfig& config, double E_def, double nu_def,
                               double k_def, double t);

/// Assemble-and-solve for one mesh.
Solution solve_problem(const PolygonMesh& mesh, const MaterialParams& material,
                       const LoadFunction& g);

ErrorReport compute_errors(const PolygonMesh& mesh, const MaterialParams& material,
                           const ExactSolution& exact, const Solution& solution,
                           const GlobalDofMap& dofmap);

struct Test1Result {
  MeshFamily family;
  double thickness;
  std::vector<ErrorReport> rows;
  // fitted orders for (e_w, e_grad_w, e_theta, energy); empty with one level
  std::vector<double> orders;
  std::string csv_path;
};
std::vector<Test1Result> run_test1(const RunConfig& config);

struct Test2Result {
  MeshFamily family;
  std::vector<double> h;                     // one column per level
  std::vector<double> thicknesses;           // one row per t
  std::vector<std::vector<double>> e_w;      // [t][h]
  std::string csv_path;
};
std::vector<Test2Result> run_test2(const RunConfig& config);

struct Test3Row {
  std::string mesh_id;
  int n_dof;        // raw count 5 Nv + Ne, no boundary elimination
  double corner_w;
  double error_vs_reference;
};
struct Test3Result {
  std::vector<Test3Row> rows;
  std::string csv_path;
};
/// Reference corner deflection from a fine conforming FE computation.
inline constexpr double kTest3Reference = 0.01974057;
Test3Result run_test3(const RunConfig& config);

/// Solves on a mesh file and writes solution.csv (and errors.csv when an exact
/// solution is named).
struct SolveOnceResult {
  std::string solution_csv;
  std::optional<ErrorReport> errors;
};
SolveOnceResult solve_once(const RunConfig& config);

/// Writes the mesh of config.families[0] at config.level to a mesh file.
std::string run_meshgen(const RunConfig& config);

/// Shortest round-trippable decimal representation (CSV and mesh writer).
std::string format_double(double v);

}  // namespace vem
