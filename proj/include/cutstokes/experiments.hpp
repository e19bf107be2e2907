#pragma once

#include "cutstokes/analysis.hpp"
#include "cutstokes/cutgeom.hpp"
#include "cutstokes/forms.hpp"
#include "cutstokes/linsolve.hpp"
#include "cutstokes/mesh.hpp"
#include "cutstokes/spaces.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cutstokes {

/// Background mesh families around Omega = [0,1]^3 with h = 1/N:
/// A: [-h delta, 1 + h delta]^3 with N^3 subcubes,
/// B: [-h/3, 1 + h/3]^3 with N^3 subcubes,
/// C: [-h(1-delta), 1 + h(1-delta)]^3 with (N+2)^3 subcubes.
enum class MeshConfig { A, B, C };

std::string_view to_string(MeshConfig config);
MeshConfig mesh_config_from_string(std::string_view name);

inline constexpr double kDefaultDelta = 0.01;

struct ConvergenceConfig {
  MeshConfig config = MeshConfig::A;
  int N = 4;
  double delta = kDefaultDelta;
  ElementPair pair = ElementPair::P1P1;
  StabilizationParams params = StabilizationParams::defaults(ElementPair::P1P1);
};

Box background_box(MeshConfig config, int N, double delta = kDefaultDelta);
int background_divisions(MeshConfig config, int N);
PolytopeDomain unit_cube_domain();

/// u = (y(1-y)z(1-z), 0, 0), p = 0.5 - x, f = -lap u + grad p, g = u.
ProblemData manufactured_problem();

struct ExperimentOptions {
  SolverMethod solver = SolverMethod::Direct;
  int quad_degree = 4;
  /// Overrides for the per-pair default parameters.
  std::map<ElementPair, StabilizationParams> params;
  int workers = 1;

  StabilizationParams params_for(ElementPair pair) const;
};

struct ConvergenceRow {
  MeshConfig config = MeshConfig::A;
  ElementPair pair = ElementPair::P1P1;
  int N = 0;
  double h_max = 0.0;
  double err_u_H1 = 0.0;
  double err_p_L2 = 0.0;
  int n_dofs = 0;
  bool ok = false;
  std::string message;
};

struct RateFit {
  MeshConfig config;
  ElementPair pair;
  double slope_u_H1 = 0.0;
  double slope_p_L2 = 0.0;
  bool ok = false;  // at least two successful rows
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<RateFit> slopes;
  bool all_ok() const;
};

ConvergenceRow run_convergence_case(const ConvergenceConfig& config, const ExperimentOptions& options);

/// Rows ordered by config, then pair, then N. Throws ContractViolation if
/// N_list is not strictly ascending or contains N < 1.
ConvergenceTable run_convergence(const std::vector<MeshConfig>& configs, const std::vector<ElementPair>& pairs,
                                 const std::vector<int>& N_list, const ExperimentOptions& options);

/// beta0 = beta1 = 0.1, gamma = 10; beta2 = beta3 = beta (P1P1) or
/// beta2 = beta (P1P0).
StabilizationParams condition_params(ElementPair pair, double beta);

struct ConditionConfig {
  double l = 0.95;
  double beta = 0.0;
  ElementPair pair = ElementPair::P1P1;
};

/// Omega* = [-1,1]^3 with 10^3 subcubes, Omega = [-l,l]^3.
BackgroundMesh condition_mesh();

struct ConditionCell {
  double l = 0.0;
  double beta = 0.0;
  ElementPair pair = ElementPair::P1P1;
  int n_dofs = 0;
  SpectrumReport spectrum;
  bool ok = false;
  std::string message;
};

/// One cell per (beta, l), ordered beta-major to match the table layout.
std::vector<ConditionCell> run_condition_sweep(const std::vector<double>& l_list,
                                               const std::vector<double>& beta_list, ElementPair pair,
                                               EigenMethod method = EigenMethod::Lanczos, int workers = 1);

/// Assembled system for a single condition-number configuration.
StokesSystem condition_system(const BackgroundMesh& mesh, const ConditionConfig& config);

struct PatchTestResult {
  std::string name;
  ElementPair pair = ElementPair::P1P1;
  MeshConfig config = MeshConfig::B;
  int N = 0;
  bool skipped = false;
  bool passed = false;
  double max_dof_error = 0.0;
  std::string message;
};

inline constexpr double kPatchTolerance = 1e-8;

/// Linear-velocity test (both pairs) and linear-pressure test (P1P1; P1P0
/// is reported as skipped because the pressure is not in the space).
std::vector<PatchTestResult> run_patch_tests(MeshConfig config, const std::vector<int>& N_list,
                                             const std::vector<ElementPair>& pairs,
                                             const ExperimentOptions& options);

}  // namespace cutstokes
