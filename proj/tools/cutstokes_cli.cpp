#include "cutstokes/experiments.hpp"
#include "cutstokes/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace cutstokes;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int env_workers() {
  const char* s = std::getenv("CUTSTOKES_WORKERS");
  if (!s || !*s) return 1;
  try {
    const int w = std::stoi(s);
    return w > 0 ? w : 1;
  } catch (const std::exception&) {
    throw UsageError("CUTSTOKES_WORKERS must be a positive integer");
  }
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
  return os.str();
}

SolverMethod parse_solver(const std::string& s) {
  if (s == "direct") return SolverMethod::Direct;
  if (s == "minres") return SolverMethod::Minres;
  throw UsageError("unknown solver: " + s);
}

// "beta1=0.2,gamma=10" applied on top of the per-pair defaults.
void apply_params(const std::vector<std::string>& overrides, const std::vector<ElementPair>& pairs,
                  ExperimentOptions& options) {
  for (ElementPair pair : pairs) {
    StabilizationParams p = StabilizationParams::defaults(pair);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--params expects key=value, got " + kv);
      const std::string key = kv.substr(0, eq);
      double value = 0.0;
      try {
        value = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw UsageError("bad value in --params: " + kv);
      }
      if (key == "beta0") p.beta0 = value;
      else if (key == "beta1") p.beta1 = value;
      else if (key == "beta2") p.beta2 = value;
      else if (key == "beta3") p.beta3 = value;
      else if (key == "gamma") p.gamma = value;
      else throw UsageError("unknown parameter: " + key);
    }
    try {
      p.validate();
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    options.params[pair] = p;
  }
}

std::vector<ElementPair> parse_pairs(const std::string& s) {
  if (s == "both") return {ElementPair::P1P1, ElementPair::P1P0};
  try {
    return {element_pair_from_string(s)};
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
}

void echo_params(RunManifest& m, const ExperimentOptions& options) {
  for (const auto& [pair, p] : options.params) {
    const std::string prefix = std::string(to_string(pair)) + ".";
    m.parameters.emplace_back(prefix + "beta0", format_double(p.beta0));
    m.parameters.emplace_back(prefix + "beta1", format_double(p.beta1));
    m.parameters.emplace_back(prefix + "beta2", format_double(p.beta2));
    m.parameters.emplace_back(prefix + "beta3", format_double(p.beta3));
    m.parameters.emplace_back(prefix + "gamma", format_double(p.gamma));
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut finite element Stokes experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CUTSTOKES_VERSION);

  std::string out_dir = "out";
  std::string solver_name = "direct";
  int quad_degree = 4;
  std::vector<std::string> param_overrides;

  auto* conv = app.add_subcommand("convergence", "Manufactured-solution convergence study");
  std::string config_name = "all";
  std::string pair_name = "both";
  std::vector<int> n_list{4, 6, 8, 12};
  double delta = kDefaultDelta;
  conv->add_option("--config", config_name, "A, B, C or all")->check(CLI::IsMember({"A", "B", "C", "all"}));
  conv->add_option("--pair", pair_name, "p1p1, p1p0 or both")->check(CLI::IsMember({"p1p1", "p1p0", "both"}));
  conv->add_option("--n", n_list, "Comma-separated N values")->delimiter(',')->check(CLI::PositiveNumber);
  conv->add_option("--delta", delta, "Perturbation factor")->check(CLI::Range(0.0, 1.0));
  conv->add_option("--out", out_dir, "Output directory");
  conv->add_option("--solver", solver_name, "direct or minres")->check(CLI::IsMember({"direct", "minres"}));
  conv->add_option("--quad-degree", quad_degree, "Quadrature degree")->check(CLI::Range(1, 12));
  conv->add_option("--params", param_overrides, "key=value overrides")->delimiter(',');

  auto* cond = app.add_subcommand("condition", "Scaled condition-number sweep");
  std::string cond_pair = "p1p1";
  std::vector<double> l_list{0.990, 0.950, 0.910, 0.901};
  std::vector<double> beta_list{0.0, 0.001, 0.01, 0.025, 0.05, 0.1, 1.0, 10.0};
  std::string eig_name = "lanczos";
  cond->add_option("--pair", cond_pair, "p1p1 or p1p0")->check(CLI::IsMember({"p1p1", "p1p0"}));
  cond->add_option("--l", l_list, "Comma-separated half-widths")->delimiter(',')->check(CLI::Range(0.5, 1.0));
  cond->add_option("--beta", beta_list, "Comma-separated ghost-penalty values")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  cond->add_option("--eig", eig_name, "dense or lanczos")->check(CLI::IsMember({"dense", "lanczos"}));
  cond->add_option("--out", out_dir, "Output directory");

  auto* patch = app.add_subcommand("patchtest", "Consistency patch tests");
  std::string patch_config = "B";
  std::string patch_pair = "both";
  std::vector<int> patch_n{4};
  patch->add_option("--config", patch_config, "A, B or C")->check(CLI::IsMember({"A", "B", "C"}));
  patch->add_option("--pair", patch_pair, "p1p1, p1p0 or both")->check(CLI::IsMember({"p1p1", "p1p0", "both"}));
  patch->add_option("--n", patch_n, "Comma-separated N values")->delimiter(',')->check(CLI::PositiveNumber);
  patch->add_option("--out", out_dir, "Output directory (optional report)");
  patch->add_option("--solver", solver_name, "direct or minres")->check(CLI::IsMember({"direct", "minres"}));
  patch->add_option("--quad-degree", quad_degree, "Quadrature degree")->check(CLI::Range(1, 12));
  patch->add_option("--params", param_overrides, "key=value overrides")->delimiter(',');

  auto* dump = app.add_subcommand("mesh", "Dump a background mesh and its cut geometry");
  std::string dump_config = "B";
  int dump_n = 2;
  dump->add_option("--config", dump_config, "A, B or C")->check(CLI::IsMember({"A", "B", "C"}));
  dump->add_option("--n", dump_n, "N")->check(CLI::PositiveNumber);
  dump->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    ExperimentOptions options;
    options.workers = env_workers();
    options.quad_degree = quad_degree;
    options.solver = parse_solver(solver_name);
    RunManifest manifest;
    const fs::path dir(out_dir);

    if (*conv) {
      for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw UsageError("--n must be strictly ascending");
      std::vector<MeshConfig> configs;
      if (config_name == "all") configs = {MeshConfig::A, MeshConfig::B, MeshConfig::C};
      else configs = {mesh_config_from_string(config_name)};
      const auto pairs = parse_pairs(pair_name);
      apply_params(param_overrides, pairs, options);

      std::vector<ConvergenceRow> rows;
      ConvergenceTable table;
      if (delta == kDefaultDelta) {
        table = run_convergence(configs, pairs, n_list, options);
      } else {
        // Non-default delta goes through the single-case runner.
        for (MeshConfig c : configs)
          for (ElementPair p : pairs)
            for (int N : n_list) {
              ConvergenceConfig cc{c, N, delta, p, options.params_for(p)};
              table.rows.push_back(run_convergence_case(cc, options));
            }
      }
      write_convergence_csv(dir / "convergence.csv", table);
      write_slopes_json(dir / "slopes.json", table);
      for (const auto& row : table.rows) {
        std::cout << to_string(row.config) << ' ' << to_string(row.pair) << " N=" << row.N
                  << " h=" << format_double(row.h_max) << " errU=" << format_double(row.err_u_H1)
                  << " errP=" << format_double(row.err_p_L2) << (row.ok ? "" : "  FAILED: " + row.message) << '\n';
      }
      for (const auto& s : table.slopes) {
        std::cout << "slope " << to_string(s.config) << ' ' << to_string(s.pair) << " u_H1="
                  << format_double(s.slope_u_H1) << " p_L2=" << format_double(s.slope_p_L2) << '\n';
      }
      manifest.subcommand = "convergence";
      manifest.parameters = {{"config", config_name}, {"pair", pair_name},   {"n", join(n_list)},
                             {"delta", format_double(delta)}, {"solver", solver_name},
                             {"quad_degree", std::to_string(quad_degree)}, {"workers", std::to_string(options.workers)}};
      echo_params(manifest, options);
      manifest.outputs = {"convergence.csv", "slopes.json"};
      manifest.wall_clock_seconds = seconds_since(t0);
      write_manifest(dir, manifest);
      return table.all_ok() ? 0 : 1;
    }

    if (*cond) {
      const ElementPair pair = element_pair_from_string(cond_pair);
      const EigenMethod method = eig_name == "dense" ? EigenMethod::Dense : EigenMethod::Lanczos;
      const auto cells = run_condition_sweep(l_list, beta_list, pair, method, options.workers);
      write_condition_csv(dir / "condition.csv", cells, l_list, beta_list);
      write_condition_long_csv(dir / "condition_long.csv", cells);
      bool ok = true;
      for (const auto& c : cells) {
        ok = ok && c.ok;
        std::cout << "beta=" << format_double(c.beta) << " l=" << format_double(c.l)
                  << " kappa_h2=" << format_double(c.spectrum.kappa_scaled)
                  << (c.spectrum.unexpected_kernel_dimension ? "  [unexpected kernel dimension]" : "")
                  << (c.ok ? "" : "  FAILED: " + c.message) << '\n';
      }
      manifest.subcommand = "condition";
      manifest.parameters = {{"pair", cond_pair},
                             {"l", join(l_list)},
                             {"beta", join(beta_list)},
                             {"eig", eig_name},
                             {"beta0", "0.1"},
                             {"beta1", "0.1"},
                             {"gamma", "10"},
                             {"workers", std::to_string(options.workers)}};
      manifest.outputs = {"condition.csv", "condition_long.csv"};
      manifest.wall_clock_seconds = seconds_since(t0);
      write_manifest(dir, manifest);
      return ok ? 0 : 1;
    }

    if (*patch) {
      const auto pairs = parse_pairs(patch_pair);
      apply_params(param_overrides, pairs, options);
      const auto results = run_patch_tests(mesh_config_from_string(patch_config), patch_n, pairs, options);
      bool ok = true;
      for (const auto& r : results) {
        ok = ok && r.passed;
        std::cout << r.name << ' ' << to_string(r.pair) << ' ' << to_string(r.config) << " N=" << r.N << ' ';
        if (r.skipped) std::cout << "SKIPPED (" << r.message << ")\n";
        else if (r.passed) std::cout << "PASS max_dof_error=" << format_double(r.max_dof_error) << '\n';
        else std::cout << "FAIL max_dof_error=" << format_double(r.max_dof_error) << " " << r.message << '\n';
      }
      if (patch->count("--out")) {
        write_patch_csv(dir / "patchtest.csv", results);
        manifest.subcommand = "patchtest";
        manifest.parameters = {{"config", patch_config}, {"pair", patch_pair}, {"n", join(patch_n)},
                               {"solver", solver_name}, {"quad_degree", std::to_string(quad_degree)}};
        echo_params(manifest, options);
        manifest.outputs = {"patchtest.csv"};
        manifest.wall_clock_seconds = seconds_since(t0);
        write_manifest(dir, manifest);
      }
      return ok ? 0 : 1;
    }

    if (*dump) {
      const MeshConfig c = mesh_config_from_string(dump_config);
      const int n = background_divisions(c, dump_n);
      const BackgroundMesh mesh = build_structured_tet_mesh(background_box(c, dump_n), {n, n, n});
      const PolytopeDomain domain = unit_cube_domain();
      const CutDecomposition d = classify_and_decompose(mesh, domain);
      fs::create_directories(dir);
      std::ofstream mesh_out(dir / "mesh.txt");
      write_mesh_text(mesh, mesh_out);
      std::ofstream cut_out(dir / "cut_geometry.txt");
      write_cut_geometry_text(mesh, domain, d, cut_out);
      manifest.subcommand = "mesh";
      manifest.parameters = {{"config", dump_config}, {"n", std::to_string(dump_n)}};
      manifest.outputs = {"mesh.txt", "cut_geometry.txt"};
      manifest.wall_clock_seconds = seconds_since(t0);
      write_manifest(dir, manifest);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
