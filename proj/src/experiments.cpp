#include "vem/experiments.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "vem/error.hpp"

namespace vem {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  VEM_REQUIRE(ec == std::errc(), "number formatting failed");
  return std::string(buf, ptr);
}

std::vector<int> default_levels(const std::string& experiment, MeshFamily family) {
  if (experiment == "test1") {
    switch (family) {
      case MeshFamily::T2: return {10, 20, 40, 78, 136};
      default: return {8, 16, 32, 64, 128};
    }
  }
  if (experiment == "test2") {
    switch (family) {
      case MeshFamily::T4: return {4, 9, 17, 26, 35};
      case MeshFamily::T5: return {38, 150, 500, 1260, 2770};
      default: return {6, 11, 22, 44, 88};
    }
  }
  if (experiment == "test3") {
    if (family == MeshFamily::T7) return {0, 1, 2, 3, 4, 5};
    return {8, 10, 16, 20, 30, 32, 40};
  }
  return {8};
}

TagRule test3_boundary_rule() {
  return [](const Vec2& mid) {
    const double eps = 1e-9;
    const bool clamped = mid.x < eps || mid.y < eps ||
                         (mid.x > 1.0 - eps && mid.y < 0.5 + eps) ||
                         (mid.y > 1.0 - eps && mid.x < 0.5 + eps);
    return clamped ? BoundaryTag::Clamped : BoundaryTag::Free;
  };
}

MaterialParams config_material(const RunConfig& config, double E_def, double nu_def,
                               double k_def, double t) {
  return MaterialParams(config.young.value_or(E_def), config.poisson.value_or(nu_def),
                        config.shear_factor.value_or(k_def), t);
}

Solution solve_problem(const PolygonMesh& mesh, const MaterialParams& material,
                       const LoadFunction& g) {
  const GlobalDofMap dofmap = number_dofs(mesh);
  const ConstraintSet constraints = build_constraints(mesh, dofmap);
  const LinearSystem system = assemble(mesh, material, g, dofmap, constraints);
  const Vector reduced = solve(system);
  return expand_solution(reduced, constraints, dofmap);
}

ErrorReport compute_errors(const PolygonMesh& mesh, const MaterialParams& material,
                           const ExactSolution& exact, const Solution& solution,
                           const GlobalDofMap& dofmap) {
  const Vector exact_dofs = interpolate_dofs(exact, mesh, dofmap);
  ErrorReport rep;
  rep.h = mesh.mesh_size();
  rep.n_dof = dofmap.n_total();
  rep.thickness = material.thickness;
  rep.e_w = error_discrete_l2(ErrorKind::Deflection, exact_dofs, solution.full, mesh, dofmap);
  rep.e_grad_w =
      error_discrete_l2(ErrorKind::GradDeflection, exact_dofs, solution.full, mesh, dofmap);
  rep.e_theta =
      error_discrete_l2(ErrorKind::Rotation, exact_dofs, solution.full, mesh, dofmap);
  rep.e_energy = energy_error(exact_dofs, solution.full, mesh, material, dofmap);
  return rep;
}

namespace {

std::ofstream open_csv(const std::string& dir, const std::string& name, std::string& path) {
  fs::create_directories(dir);
  path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable line endings
  VEM_REQUIRE(out.good(), "cannot open '", path, "' for writing");
  return out;
}

std::vector<MeshFamily> families_or(const std::vector<MeshFamily>& given,
                                    std::initializer_list<MeshFamily> defaults) {
  return given.empty() ? std::vector<MeshFamily>(defaults) : given;
}

}  // namespace

std::vector<Test1Result> run_test1(const RunConfig& config) {
  const auto families = families_or(config.families,
                                    {MeshFamily::T1, MeshFamily::T2, MeshFamily::T3});
  const std::vector<double> ts =
      config.thicknesses.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3} : config.thicknesses;

  std::vector<Test1Result> results;
  for (MeshFamily family : families) {
    const std::vector<int> levels =
        config.levels.empty() ? default_levels("test1", family) : config.levels;
    for (double t : ts) {
      const MaterialParams material = config_material(config, 1.0, 0.0, 5.0 / 6.0, t);
      const ExactSolution exact =
          test1_exact(t, material.young, material.poisson);
      Test1Result res;
      res.family = family;
      res.thickness = t;
      for (int n : levels) {
        const PolygonMesh mesh = generate_mesh(family, n, {1.0, 1.0}, config.seed,
                                               tag_all(BoundaryTag::Clamped));
        const GlobalDofMap dofmap = number_dofs(mesh);
        const Solution sol = solve_problem(mesh, material, exact.g);
        res.rows.push_back(compute_errors(mesh, material, exact, sol, dofmap));
      }
      if (res.rows.size() >= 2) {
        std::vector<double> h;
        for (const auto& r : res.rows) h.push_back(r.h);
        for (auto get : {&ErrorReport::e_w, &ErrorReport::e_grad_w, &ErrorReport::e_theta,
                         &ErrorReport::e_energy}) {
          std::vector<double> e;
          for (const auto& r : res.rows) e.push_back(r.*get);
          res.orders.push_back(fitted_order(h, e));
        }
      }

      auto out = open_csv(config.out_dir,
                          "test1_" + family_to_string(family) + "_t" + format_double(t) +
                              ".csv",
                          res.csv_path);
      out << "h,n_dof,e_w,e_grad_w,e_theta,e_energy\n";
      for (const auto& r : res.rows) {
        out << format_double(r.h) << "," << r.n_dof << "," << format_double(r.e_w) << ","
            << format_double(r.e_grad_w) << "," << format_double(r.e_theta) << ","
            << format_double(r.e_energy) << "\n";
      }
      out << "order,";
      for (double o : res.orders) out << "," << format_double(o);
      if (res.orders.empty()) out << ",,,,";
      out << "\n";
      results.push_back(std::move(res));
    }
  }
  return results;
}

std::vector<Test2Result> run_test2(const RunConfig& config) {
  const auto families = families_or(config.families,
                                    {MeshFamily::T1, MeshFamily::T4, MeshFamily::T5});
  const std::vector<double> ts = config.thicknesses.empty()
                                     ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4, 1e-5}
                                     : config.thicknesses;
  const double a = 1.0, b = 2.0;

  std::vector<Test2Result> results;
  for (MeshFamily family : families) {
    const std::vector<int> levels =
        config.levels.empty() ? default_levels("test2", family) : config.levels;
    Test2Result res;
    res.family = family;
    res.thicknesses = ts;

    std::vector<PolygonMesh> meshes;
    for (int n : levels) {
      meshes.push_back(generate_mesh(family, n, {a, b}, config.seed,
                                     tag_all(BoundaryTag::SimplySupported)));
      res.h.push_back(meshes.back().mesh_size());
    }
    for (double t : ts) {
      const MaterialParams material = config_material(config, 1.0, 0.3, 5.0 / 6.0, t);
      const ExactSolution kirchhoff =
          test2_kirchhoff(a, b, material.young, material.poisson);
      std::vector<double> row;
      for (const PolygonMesh& mesh : meshes) {
        const GlobalDofMap dofmap = number_dofs(mesh);
        const Solution sol = solve_problem(mesh, material, kirchhoff.g);
        const Vector exact_dofs = interpolate_dofs(kirchhoff, mesh, dofmap);
        row.push_back(error_discrete_l2(ErrorKind::Deflection, exact_dofs, sol.full, mesh,
                                        dofmap));
      }
      res.e_w.push_back(std::move(row));
    }

    auto out = open_csv(config.out_dir, "test2_" + family_to_string(family) + ".csv",
                        res.csv_path);
    out << "t/h";
    for (double h : res.h) out << "," << format_double(h);
    out << "\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      out << format_double(ts[i]);
      for (double e : res.e_w[i]) out << "," << format_double(e);
      out << "\n";
    }
    results.push_back(std::move(res));
  }
  return results;
}

Test3Result run_test3(const RunConfig& config) {
  const auto families = families_or(config.families, {MeshFamily::T6, MeshFamily::T7});
  const double t = config.thicknesses.empty() ? 1e-1 : config.thicknesses.front();
  const MaterialParams material = config_material(config, 1.0, 0.0, 5.0 / 6.0, t);

  Test3Result res;
  for (MeshFamily family : families) {
    VEM_REQUIRE(family == MeshFamily::T6 || family == MeshFamily::T7,
                "test3 runs on families T6 and T7 only");
    const std::vector<int> levels =
        config.levels.empty() ? default_levels("test3", family) : config.levels;
    for (int n : levels) {
      const PolygonMesh mesh =
          generate_mesh(family, n, {1.0, 1.0}, config.seed, test3_boundary_rule());
      const GlobalDofMap dofmap = number_dofs(mesh);
      const Solution sol = solve_problem(mesh, material, [](Vec2) { return 1.0; });
      Test3Row row;
      row.mesh_id = family_to_string(family) + "_" +
                    (family == MeshFamily::T7 ? "k" : "n") + std::to_string(n);
      row.n_dof = dofmap.n_total();
      row.corner_w = corner_value(sol, mesh, dofmap, {0.5, 0.5});
      row.error_vs_reference = std::abs(row.corner_w - kTest3Reference);
      res.rows.push_back(row);
    }
  }

  auto out = open_csv(config.out_dir, "test3.csv", res.csv_path);
  out << "mesh,n_dof,corner_w,error_vs_reference\n";
  for (const auto& r : res.rows) {
    out << r.mesh_id << "," << r.n_dof << "," << format_double(r.corner_w) << ","
        << format_double(r.error_vs_reference) << "\n";
  }
  return res;
}

SolveOnceResult solve_once(const RunConfig& config) {
  const PolygonMesh mesh = read_mesh_file(config.mesh_path);
  const double t = config.thicknesses.empty() ? 1e-1 : config.thicknesses.front();

  std::optional<ExactSolution> exact;
  MaterialParams material = config_material(config, 1.0, 0.0, 5.0 / 6.0, t);
  LoadFunction g;
  auto use_exact = [&](const std::string& name) {
    if (name == "test1") {
      exact = test1_exact(t, material.young, material.poisson);
    } else if (name == "test2") {
      material = config_material(config, 1.0, 0.3, 5.0 / 6.0, t);
      exact = test2_kirchhoff(1.0, 2.0, material.young, material.poisson);
    } else {
      VEM_REQUIRE(false, "unknown exact solution '", name, "'");
    }
  };

  if (config.load == "zero") {
    g = [](Vec2) { return 0.0; };
  } else if (config.load == "one") {
    g = [](Vec2) { return 1.0; };
  } else {
    use_exact(config.load);
    g = exact->g;
  }
  if (!config.exact.empty() && !exact) use_exact(config.exact);

  const GlobalDofMap dofmap = number_dofs(mesh);
  const Solution sol = solve_problem(mesh, material, g);

  SolveOnceResult result;
  auto out = open_csv(config.out_dir, "solution.csv", result.solution_csv);
  out << "x,y,w,w_x,w_y,gamma_x,gamma_y,theta_x,theta_y\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2 p = mesh.vertices[v];
    out << format_double(p.x) << "," << format_double(p.y) << ","
        << format_double(sol.full[dofmap.w(v)]) << "," << format_double(sol.full[dofmap.wx(v)])
        << "," << format_double(sol.full[dofmap.wy(v)]) << ","
        << format_double(sol.full[dofmap.gx(v)]) << "," << format_double(sol.full[dofmap.gy(v)])
        << "," << format_double(sol.theta[v].x) << "," << format_double(sol.theta[v].y)
        << "\n";
  }

  if (!config.exact.empty()) {
    result.errors = compute_errors(mesh, material, *exact, sol, dofmap);
    std::string err_path;
    auto eout = open_csv(config.out_dir, "errors.csv", err_path);
    eout << "h,n_dof,e_w,e_grad_w,e_theta,e_energy\n";
    const ErrorReport& r = *result.errors;
    eout << format_double(r.h) << "," << r.n_dof << "," << format_double(r.e_w) << ","
         << format_double(r.e_grad_w) << "," << format_double(r.e_theta) << ","
         << format_double(r.e_energy) << "\n";
  }
  return result;
}

std::string run_meshgen(const RunConfig& config) {
  VEM_REQUIRE(!config.families.empty(), "meshgen: no mesh family given");
  const MeshFamily family = config.families.front();

  TagRule rule;
  if (config.bc == "clamped") rule = tag_all(BoundaryTag::Clamped);
  else if (config.bc == "ss") rule = tag_all(BoundaryTag::SimplySupported);
  else if (config.bc == "free") rule = tag_all(BoundaryTag::Free);
  else if (config.bc == "test3") rule = test3_boundary_rule();
  else VEM_REQUIRE(false, "meshgen: unknown boundary rule '", config.bc, "'");

  const PolygonMesh mesh = generate_mesh(family, config.level,
                                         {config.width, config.height}, config.seed, rule);
  fs::create_directories(config.out_dir);
  const std::string path =
      (fs::path(config.out_dir) / ("mesh_" + family_to_string(family) + "_n" +
                                   std::to_string(config.level) + ".txt"))
          .string();
  write_mesh_file(mesh, path);
  return path;
}

}  // namespace vem
