#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vem/error.hpp"
#include "vem/experiments.hpp"

namespace {

vem::RunConfig config_for(const std::string& experiment) {
  vem::RunConfig cfg;
  cfg.experiment = experiment;
  return cfg;
}

void add_common_options(CLI::App* cmd, vem::RunConfig& cfg, std::string& config_path,
                        std::vector<std::string>& family_names) {
  cmd->add_option("--config", config_path, "flat key=value configuration file");
  cmd->add_option("--family", family_names, "mesh families (T1..T7)");
  cmd->add_option("--levels", cfg.levels, "refinement parameters")->delimiter(',');
  cmd->add_option("--thickness", cfg.thicknesses, "plate thicknesses")->delimiter(',');
  cmd->add_option("--seed", cfg.seed, "random seed (T3/T5 meshes)");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--E", cfg.young, "Young modulus override");
  cmd->add_option("--nu", cfg.poisson, "Poisson ratio override");
  cmd->add_option("--k", cfg.shear_factor, "shear correction factor override");
}

template <class T>
std::vector<T> parse_list(const std::string& value) {
  std::vector<T> out;
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v;
    VEM_REQUIRE(static_cast<bool>(is >> v), "config: cannot parse list item '", item, "'");
    out.push_back(v);
  }
  return out;
}

// Command-line flags win over the file: a key is applied only when the
// corresponding option was not given on the command line.
void apply_config_file(const std::string& path, const CLI::App* cmd, vem::RunConfig& cfg,
                       std::vector<std::string>& family_names) {
  std::ifstream in(path);
  VEM_REQUIRE(in.good(), "cannot open config file '", path, "'");
  auto given = [cmd](const char* flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    VEM_REQUIRE(eq != std::string::npos, "config line ", lineno, ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "family") {
      if (!given("--family")) family_names = parse_list<std::string>(value);
    } else if (key == "levels") {
      if (!given("--levels")) cfg.levels = parse_list<int>(value);
    } else if (key == "thickness") {
      if (!given("--thickness")) cfg.thicknesses = parse_list<double>(value);
    } else if (key == "seed") {
      if (!given("--seed")) cfg.seed = std::stoull(value);
    } else if (key == "out") {
      if (!given("--out")) cfg.out_dir = value;
    } else if (key == "E") {
      if (!given("--E")) cfg.young = std::stod(value);
    } else if (key == "nu") {
      if (!given("--nu")) cfg.poisson = std::stod(value);
    } else if (key == "k") {
      if (!given("--k")) cfg.shear_factor = std::stod(value);
    } else if (key == "mesh") {
      if (!given("--mesh")) cfg.mesh_path = value;
    } else if (key == "load") {
      if (!given("--load")) cfg.load = value;
    } else if (key == "exact") {
      if (!given("--exact")) cfg.exact = value;
    } else if (key == "level") {
      if (!given("--level")) cfg.level = std::stoi(value);
    } else if (key == "width") {
      if (!given("--width")) cfg.width = std::stod(value);
    } else if (key == "height") {
      if (!given("--height")) cfg.height = std::stod(value);
    } else if (key == "bc") {
      if (!given("--bc")) cfg.bc = value;
    } else {
      VEM_REQUIRE(false, "config line ", lineno, ": unknown key '", key, "'");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual element solver for Reissner-Mindlin plates in "
               "shear-deflection variables"};
  app.require_subcommand(1);

  struct SubState {
    vem::RunConfig cfg;
    std::string config_path;
    std::vector<std::string> family_names;
  };
  std::map<std::string, SubState> states;

  for (const char* name : {"test1", "test2", "test3"}) {
    auto* cmd = app.add_subcommand(
        name, std::string("run the ") + name + " convergence/locking study");
    auto& st = states[name];
    st.cfg = config_for(name);
    add_common_options(cmd, st.cfg, st.config_path, st.family_names);
  }
  {
    auto* cmd = app.add_subcommand("solve", "solve on a mesh file, dump the solution");
    auto& st = states["solve"];
    st.cfg = config_for("solve");
    add_common_options(cmd, st.cfg, st.config_path, st.family_names);
    cmd->add_option("--mesh", st.cfg.mesh_path, "input mesh file")->required();
    cmd->add_option("--load", st.cfg.load, "transversal load: zero|one|test1|test2");
    cmd->add_option("--exact", st.cfg.exact, "exact solution for an error report");
  }
  {
    auto* cmd = app.add_subcommand("meshgen", "generate a mesh file");
    auto& st = states["meshgen"];
    st.cfg = config_for("meshgen");
    add_common_options(cmd, st.cfg, st.config_path, st.family_names);
    cmd->add_option("--level", st.cfg.level, "subdivision parameter");
    cmd->add_option("--width", st.cfg.width, "domain width (T1/T4/T5)");
    cmd->add_option("--height", st.cfg.height, "domain height (T1/T4/T5)");
    cmd->add_option("--bc", st.cfg.bc, "boundary rule: clamped|ss|free|test3");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    SubState& st = states[sub->get_name()];
    if (!st.config_path.empty())
      apply_config_file(st.config_path, sub, st.cfg, st.family_names);
    for (const std::string& f : st.family_names)
      st.cfg.families.push_back(vem::family_from_string(f));
    const vem::RunConfig& cfg = st.cfg;

    if (cfg.experiment == "test1") {
      for (const auto& r : vem::run_test1(cfg))
        std::cout << "wrote " << r.csv_path << "\n";
    } else if (cfg.experiment == "test2") {
      for (const auto& r : vem::run_test2(cfg))
        std::cout << "wrote " << r.csv_path << "\n";
    } else if (cfg.experiment == "test3") {
      std::cout << "wrote " << vem::run_test3(cfg).csv_path << "\n";
    } else if (cfg.experiment == "solve") {
      const auto res = vem::solve_once(cfg);
      std::cout << "wrote " << res.solution_csv << "\n";
      if (res.errors) {
        std::cout << "errors: e_w=" << vem::format_double(res.errors->e_w)
                  << " e_grad_w=" << vem::format_double(res.errors->e_grad_w)
                  << " e_theta=" << vem::format_double(res.errors->e_theta)
                  << " energy=" << vem::format_double(res.errors->e_energy) << "\n";
      }
    } else if (cfg.experiment == "meshgen") {
      std::cout << "wrote " << vem::run_meshgen(cfg) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
