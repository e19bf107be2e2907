#include "cutstokes/experiments.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using namespace cutstokes;

namespace {

ElementPair pair_arg(const std::string& s) { return element_pair_from_string(s); }
MeshConfig config_arg(const std::string& s) { return mesh_config_from_string(s); }

py::dict row_dict(const ConvergenceRow& r) {
  py::dict d;
  d["config"] = std::string(to_string(r.config));
  d["pair"] = std::string(to_string(r.pair));
  d["N"] = r.N;
  d["h_max"] = r.h_max;
  d["err_u_H1"] = r.err_u_H1;
  d["err_p_L2"] = r.err_p_L2;
  d["n_dofs"] = r.n_dofs;
  d["ok"] = r.ok;
  d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cut finite element Stokes solver";
  m.attr("__version__") = CUTSTOKES_VERSION;

  m.def(
      "geometry_summary",
      [](const std::string& config, int N, double delta) {
        const MeshConfig c = config_arg(config);
        const int n = background_divisions(c, N);
        const BackgroundMesh mesh = build_structured_tet_mesh(background_box(c, N, delta), {n, n, n});
        const CutDecomposition cd = classify_and_decompose(mesh, unit_cube_domain());
        py::dict d;
        d["cells"] = mesh.num_cells();
        d["vertices"] = mesh.num_vertices();
        d["h_max"] = mesh.h_max();
        d["cut_cells"] = cd.boundary_zone_cells.size();
        d["ghost_facets"] = cd.boundary_zone_facets.size();
        d["volume"] = cd.total_volume();
        d["surface_area"] = cd.total_surface_area();
        return d;
      },
      py::arg("config"), py::arg("N"), py::arg("delta") = kDefaultDelta,
      "Mesh and cut-geometry statistics for a convergence configuration.");

  m.def(
      "convergence",
      [](const std::vector<std::string>& configs, const std::vector<std::string>& pairs, const std::vector<int>& N,
         const std::string& solver, int workers) {
        std::vector<MeshConfig> cs;
        for (const auto& c : configs) cs.push_back(config_arg(c));
        std::vector<ElementPair> ps;
        for (const auto& p : pairs) ps.push_back(pair_arg(p));
        ExperimentOptions opt;
        opt.solver = solver == "minres" ? SolverMethod::Minres : SolverMethod::Direct;
        opt.workers = workers;
        ConvergenceTable t;
        {
          py::gil_scoped_release release;
          t = run_convergence(cs, ps, N, opt);
        }
        py::list rows;
        for (const auto& r : t.rows) rows.append(row_dict(r));
        py::list slopes;
        for (const auto& s : t.slopes) {
          py::dict d;
          d["config"] = std::string(to_string(s.config));
          d["pair"] = std::string(to_string(s.pair));
          d["slope_u_H1"] = s.slope_u_H1;
          d["slope_p_L2"] = s.slope_p_L2;
          d["ok"] = s.ok;
          slopes.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["slopes"] = slopes;
        return out;
      },
      py::arg("configs"), py::arg("pairs"), py::arg("N"), py::arg("solver") = "direct", py::arg("workers") = 1,
      "Manufactured-solution errors and fitted rates.");

  m.def(
      "condition",
      [](const std::string& pair, const std::vector<double>& l, const std::vector<double>& beta,
         const std::string& eig) {
        const EigenMethod method = eig == "dense" ? EigenMethod::Dense : EigenMethod::Lanczos;
        std::vector<ConditionCell> cells;
        {
          py::gil_scoped_release release;
          cells = run_condition_sweep(l, beta, pair_arg(pair), method);
        }
        py::list out;
        for (const auto& c : cells) {
          py::dict d;
          d["l"] = c.l;
          d["beta"] = c.beta;
          d["n_dofs"] = c.n_dofs;
          d["kappa_scaled"] = c.spectrum.kappa_scaled;
          d["near_zero_count"] = c.spectrum.near_zero_count;
          d["ok"] = c.ok;
          d["message"] = c.message;
          out.append(d);
        }
        return out;
      },
      py::arg("pair"), py::arg("l"), py::arg("beta"), py::arg("eig") = "lanczos",
      "Scaled condition numbers on [-1,1]^3 with 10^3 subcubes.");

  m.def(
      "patch_tests",
      [](const std::string& config, const std::vector<int>& N, const std::vector<std::string>& pairs) {
        std::vector<ElementPair> ps;
        for (const auto& p : pairs) ps.push_back(pair_arg(p));
        py::list out;
        for (const auto& r : run_patch_tests(config_arg(config), N, ps, ExperimentOptions{})) {
          py::dict d;
          d["name"] = r.name;
          d["pair"] = std::string(to_string(r.pair));
          d["N"] = r.N;
          d["skipped"] = r.skipped;
          d["passed"] = r.passed;
          d["max_dof_error"] = r.max_dof_error;
          d["message"] = r.message;
          out.append(d);
        }
        return out;
      },
      py::arg("config") = "B", py::arg("N") = std::vector<int>{4},
      py::arg("pairs") = std::vector<std::string>{"p1p1", "p1p0"}, "Linear-field consistency checks.");

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);
}
