#include "cutstokes/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace cutstokes {

namespace {

// Run fn(i) for i in [0, count) on up to `workers` threads; results are
// returned in index order regardless of scheduling.
template <class Fn>
auto parallel_map(int count, int workers, Fn fn) -> std::vector<decltype(fn(0))> {
  using Result = decltype(fn(0));
  std::vector<Result> results(count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  for (int start = 0; start < count; start += workers) {
    const int stop = std::min(count, start + workers);
    std::vector<std::future<Result>> futures;
    for (int i = start; i < stop; ++i) futures.push_back(std::async(std::launch::async, fn, i));
    for (int i = start; i < stop; ++i) results[i] = futures[i - start].get();
  }
  return results;
}

}  // namespace

std::string_view to_string(MeshConfig config) {
  switch (config) {
    case MeshConfig::A: return "A";
    case MeshConfig::B: return "B";
    case MeshConfig::C: return "C";
  }
  return "?";
}

MeshConfig mesh_config_from_string(std::string_view name) {
  if (name == "A" || name == "a") return MeshConfig::A;
  if (name == "B" || name == "b") return MeshConfig::B;
  if (name == "C" || name == "c") return MeshConfig::C;
  throw ContractViolation("unknown mesh configuration: " + std::string(name));
}

Box background_box(MeshConfig config, int N, double delta) {
  if (N < 1) throw ContractViolation("background_box: N must be >= 1");
  const double h = 1.0 / N;
  double margin = 0.0;
  switch (config) {
    case MeshConfig::A: margin = h * delta; break;
    case MeshConfig::B: margin = h / 3.0; break;
    case MeshConfig::C: margin = h * (1.0 - delta); break;
  }
  return Box(Vec3::Constant(-margin), Vec3::Constant(1.0 + margin));
}

int background_divisions(MeshConfig config, int N) { return config == MeshConfig::C ? N + 2 : N; }

PolytopeDomain unit_cube_domain() { return PolytopeDomain::box(Vec3::Zero(), Vec3::Ones()); }

ProblemData manufactured_problem() {
  ExactSolution exact;
  exact.u = [](const Vec3& x) {
    const double y = x.y();
    const double z = x.z();
    return Vec3(y * (1.0 - y) * z * (1.0 - z), 0.0, 0.0);
  };
  exact.grad_u = [](const Vec3& x) {
    const double y = x.y();
    const double z = x.z();
    Mat3 g = Mat3::Zero();
    g(0, 1) = (1.0 - 2.0 * y) * z * (1.0 - z);
    g(0, 2) = y * (1.0 - y) * (1.0 - 2.0 * z);
    return g;
  };
  exact.p = [](const Vec3& x) { return 0.5 - x.x(); };

  ProblemData data;
  data.body_force = [](const Vec3& x) {
    const double y = x.y();
    const double z = x.z();
    return Vec3(2.0 * z * (1.0 - z) + 2.0 * y * (1.0 - y) - 1.0, 0.0, 0.0);
  };
  data.boundary_velocity = exact.u;
  data.exact = exact;
  return data;
}

StabilizationParams ExperimentOptions::params_for(ElementPair pair) const {
  auto it = params.find(pair);
  return it != params.end() ? it->second : StabilizationParams::defaults(pair);
}

bool ConvergenceTable::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.ok; });
}

ConvergenceRow run_convergence_case(const ConvergenceConfig& config, const ExperimentOptions& options) {
  ConvergenceRow row;
  row.config = config.config;
  row.pair = config.pair;
  row.N = config.N;
  try {
    const int n = background_divisions(config.config, config.N);
    const BackgroundMesh mesh =
        build_structured_tet_mesh(background_box(config.config, config.N, config.delta), {n, n, n});
    const PolytopeDomain domain = unit_cube_domain();
    const CutDecomposition decomposition =
        classify_and_decompose(mesh, domain, options.quad_degree, options.quad_degree);
    const DofMap dofmap = build_dofmap(mesh, decomposition, config.pair);
    const ProblemData data = manufactured_problem();
    const StokesSystem system = assemble(mesh, decomposition, dofmap, config.params, data);
    row.n_dofs = dofmap.size();
    SolveOptions solve_options;
    solve_options.method = options.solver;
    const SolveReport report = solve(system, solve_options);
    if (!report.converged) {
      row.message = report.message;
      row.h_max = mesh.h_max();
      row.err_u_H1 = row.err_p_L2 = std::nan("");
      return row;
    }
    const ErrorReport errors =
        compute_errors(report.solution, *data.exact, mesh, decomposition, dofmap, ErrorDomain::Fictitious);
    row.h_max = errors.h_max;
    row.err_u_H1 = errors.velocity_H1_error;
    row.err_p_L2 = errors.pressure_L2_error;
    row.ok = std::isfinite(row.err_u_H1) && std::isfinite(row.err_p_L2);
    if (!row.ok) row.message = "non-finite error";
  } catch (const std::exception& e) {
    row.message = e.what();
    row.err_u_H1 = row.err_p_L2 = std::nan("");
  }
  return row;
}

ConvergenceTable run_convergence(const std::vector<MeshConfig>& configs, const std::vector<ElementPair>& pairs,
                                 const std::vector<int>& N_list, const ExperimentOptions& options) {
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1) throw ContractViolation("run_convergence: N must be >= 1");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw ContractViolation("run_convergence: N_list must ascend");
  }
  std::vector<ConvergenceConfig> cases;
  for (MeshConfig config : configs) {
    for (ElementPair pair : pairs) {
      for (int N : N_list) {
        ConvergenceConfig c;
        c.config = config;
        c.pair = pair;
        c.N = N;
        c.params = options.params_for(pair);
        cases.push_back(c);
      }
    }
  }
  ConvergenceTable table;
  table.rows = parallel_map(static_cast<int>(cases.size()), options.workers,
                            [&](int i) { return run_convergence_case(cases[i], options); });

  for (MeshConfig config : configs) {
    for (ElementPair pair : pairs) {
      std::vector<std::pair<double, double>> u_points;
      std::vector<std::pair<double, double>> p_points;
      for (const auto& row : table.rows) {
        if (row.config != config || row.pair != pair || !row.ok) continue;
        if (!(row.err_u_H1 > 0.0) || !(row.err_p_L2 > 0.0)) continue;
        u_points.emplace_back(row.h_max, row.err_u_H1);
        p_points.emplace_back(row.h_max, row.err_p_L2);
      }
      RateFit fit{config, pair};
      if (u_points.size() >= 2) {
        fit.slope_u_H1 = fit_rate(u_points);
        fit.slope_p_L2 = fit_rate(p_points);
        fit.ok = true;
      }
      table.slopes.push_back(fit);
    }
  }
  return table;
}

StabilizationParams condition_params(ElementPair pair, double beta) {
  StabilizationParams p;
  p.beta0 = 0.1;
  p.beta1 = 0.1;
  p.gamma = 10.0;
  p.beta2 = beta;
  p.beta3 = pair == ElementPair::P1P1 ? beta : 0.0;
  return p;
}

BackgroundMesh condition_mesh() {
  return build_structured_tet_mesh(Box(Vec3::Constant(-1.0), Vec3::Constant(1.0)), {10, 10, 10});
}

namespace {

StokesSystem condition_system_with(const BackgroundMesh& mesh, const CutDecomposition& decomposition,
                                   const DofMap& dofmap, ElementPair pair, double beta) {
  AssemblyOptions options;
  options.forms.rhs = false;
  return assemble(mesh, decomposition, dofmap, condition_params(pair, beta), ProblemData::homogeneous(),
                  options);
}

}  // namespace

StokesSystem condition_system(const BackgroundMesh& mesh, const ConditionConfig& config) {
  const PolytopeDomain domain = PolytopeDomain::box(Vec3::Constant(-config.l), Vec3::Constant(config.l));
  const CutDecomposition decomposition = classify_and_decompose(mesh, domain);
  const DofMap dofmap = build_dofmap(mesh, decomposition, config.pair);
  return condition_system_with(mesh, decomposition, dofmap, config.pair, config.beta);
}

std::vector<ConditionCell> run_condition_sweep(const std::vector<double>& l_list,
                                               const std::vector<double>& beta_list, ElementPair pair,
                                               EigenMethod method, int workers) {
  const BackgroundMesh mesh = condition_mesh();
  const double h = mesh.h_max();
  struct Geometry {
    CutDecomposition decomposition;
    DofMap dofmap;
  };
  std::vector<Geometry> geometry;
  for (double l : l_list) {
    if (!(l > 0.0)) throw ContractViolation("run_condition_sweep: l must be positive");
    const PolytopeDomain domain = PolytopeDomain::box(Vec3::Constant(-l), Vec3::Constant(l));
    CutDecomposition d = classify_and_decompose(mesh, domain);
    DofMap map = build_dofmap(mesh, d, pair);
    geometry.push_back({std::move(d), std::move(map)});
  }
  const int nl = static_cast<int>(l_list.size());
  const int count = static_cast<int>(beta_list.size()) * nl;
  return parallel_map(count, workers, [&](int idx) {
    const int bi = idx / nl;
    const int li = idx % nl;
    ConditionCell cell;
    cell.l = l_list[li];
    cell.beta = beta_list[bi];
    cell.pair = pair;
    try {
      const Geometry& g = geometry[li];
      const StokesSystem sys = condition_system_with(mesh, g.decomposition, g.dofmap, pair, cell.beta);
      cell.n_dofs = sys.size();
      cell.spectrum = condition_number(sys.matrix, sys.kernel, h, method);
      cell.ok = cell.spectrum.converged && std::isfinite(cell.spectrum.kappa_scaled);
      if (!cell.ok) cell.message = "eigenvalue computation did not converge";
    } catch (const std::exception& e) {
      cell.message = e.what();
    }
    return cell;
  });
}

namespace {

PatchTestResult run_one_patch(const std::string& name, MeshConfig config, int N, ElementPair pair,
                              const ExperimentOptions& options, const ProblemData& data) {
  PatchTestResult result;
  result.name = name;
  result.pair = pair;
  result.config = config;
  result.N = N;
  try {
    const int n = background_divisions(config, N);
    const BackgroundMesh mesh = build_structured_tet_mesh(background_box(config, N), {n, n, n});
    const CutDecomposition decomposition =
        classify_and_decompose(mesh, unit_cube_domain(), options.quad_degree, options.quad_degree);
    const DofMap dofmap = build_dofmap(mesh, decomposition, pair);
    const StabilizationParams params = options.params_for(pair);
    const StokesSystem system = assemble(mesh, decomposition, dofmap, params, data);
    SolveOptions solve_options;
    solve_options.method = options.solver;
    const SolveReport report = solve(system, solve_options);
    if (!report.converged) {
      result.message = report.message;
      return result;
    }
    Eigen::VectorXd expected = interpolate(mesh, dofmap, data.exact->u, data.exact->p);
    normalize_pressure(system, expected);
    result.max_dof_error = (report.solution - expected).cwiseAbs().maxCoeff();
    result.passed = result.max_dof_error <= kPatchTolerance;
    if (!result.passed) result.message = "dof error above tolerance";
  } catch (const std::exception& e) {
    result.message = e.what();
  }
  return result;
}

ProblemData linear_velocity_problem() {
  ExactSolution exact;
  exact.u = [](const Vec3& x) { return Vec3(x.y(), x.x(), 0.0); };
  exact.grad_u = [](const Vec3&) {
    Mat3 g = Mat3::Zero();
    g(0, 1) = 1.0;
    g(1, 0) = 1.0;
    return g;
  };
  exact.p = [](const Vec3&) { return 0.0; };
  ProblemData data;
  data.body_force = [](const Vec3&) { return Vec3::Zero().eval(); };
  data.boundary_velocity = exact.u;
  data.exact = exact;
  return data;
}

ProblemData linear_pressure_problem() {
  ExactSolution exact;
  exact.u = [](const Vec3&) { return Vec3::Zero().eval(); };
  exact.grad_u = [](const Vec3&) { return Mat3::Zero().eval(); };
  exact.p = [](const Vec3& x) { return 0.5 - x.x(); };
  ProblemData data;
  data.body_force = [](const Vec3&) { return Vec3(-1.0, 0.0, 0.0); };
  data.boundary_velocity = [](const Vec3&) { return Vec3::Zero().eval(); };
  data.exact = exact;
  return data;
}

}  // namespace

std::vector<PatchTestResult> run_patch_tests(MeshConfig config, const std::vector<int>& N_list,
                                             const std::vector<ElementPair>& pairs,
                                             const ExperimentOptions& options) {
  std::vector<PatchTestResult> results;
  for (ElementPair pair : pairs) {
    for (int N : N_list) {
      results.push_back(run_one_patch("linear_velocity", config, N, pair, options, linear_velocity_problem()));
      if (pair == ElementPair::P1P1) {
        results.push_back(run_one_patch("linear_pressure", config, N, pair, options, linear_pressure_problem()));
      } else {
        PatchTestResult skipped;
        skipped.name = "linear_pressure";
        skipped.pair = pair;
        skipped.config = config;
        skipped.N = N;
        skipped.skipped = true;
        skipped.passed = true;
        skipped.message = "linear pressure is not in the piecewise-constant pressure space";
        results.push_back(skipped);
      }
    }
  }
  return results;
}

}  // namespace cutstokes
