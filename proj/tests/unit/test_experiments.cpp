#include <doctest.h>

#include "cutstokes/experiments.hpp"
#include "cutstokes/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cutstokes;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("background configurations") {
  const double h = 0.25;
  const Box a = background_box(MeshConfig::A, 4);
  CHECK(a.lo().x() == doctest::Approx(-h * kDefaultDelta));
  CHECK(a.hi().y() == doctest::Approx(1 + h * kDefaultDelta));
  CHECK(background_box(MeshConfig::B, 4).lo().z() == doctest::Approx(-h / 3));
  CHECK(background_box(MeshConfig::C, 4).hi().x() == doctest::Approx(1 + h * (1 - kDefaultDelta)));
  CHECK(background_divisions(MeshConfig::C, 4) == 6);
  const int n = background_divisions(MeshConfig::C, 4);
  CHECK(build_structured_tet_mesh(background_box(MeshConfig::C, 4), {n, n, n}).num_cells() == 6 * 6 * 6 * 6);
  CHECK(mesh_config_from_string("B") == MeshConfig::B);
  CHECK_THROWS_AS(mesh_config_from_string("D"), ContractViolation);
}

TEST_CASE("manufactured body force is -lap u + grad p") {
  const ProblemData d = manufactured_problem();
  const double e = 1e-3;
  for (const Vec3& x : {Vec3(0.2, 0.3, 0.7), Vec3(0.9, 0.1, 0.5), Vec3(-0.1, 1.2, 0.4)}) {
    Vec3 lap = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
      Vec3 s = Vec3::Zero();
      s[i] = e;
      lap += (d.exact->u(x + s) - 2 * d.exact->u(x) + d.exact->u(x - s)) / (e * e);
    }
    Vec3 gp;
    for (int i = 0; i < 3; ++i) {
      Vec3 s = Vec3::Zero();
      s[i] = e;
      gp[i] = (d.exact->p(x + s) - d.exact->p(x - s)) / (2 * e);
    }
    CHECK((d.body_force(x) - (-lap + gp)).norm() < 1e-8);
    // gradient consistent with u
    for (int j = 0; j < 3; ++j) {
      Vec3 s = Vec3::Zero();
      s[j] = e;
      const Vec3 du = (d.exact->u(x + s) - d.exact->u(x - s)) / (2 * e);
      CHECK((d.exact->grad_u(x).col(j) - du).norm() < 1e-6);
    }
    // divergence free
    CHECK(std::abs(d.exact->grad_u(x).trace()) < 1e-15);
  }
}

TEST_CASE("convergence runner on config A") {
  ExperimentOptions opt;
  const ConvergenceTable t = run_convergence({MeshConfig::A}, {ElementPair::P1P1}, {2, 4}, opt);
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.slopes.size() == 1);
  CHECK(t.all_ok());
  CHECK(t.rows[1].err_u_H1 < t.rows[0].err_u_H1);
  CHECK(t.rows[1].err_p_L2 < t.rows[0].err_p_L2);
  CHECK(t.slopes[0].ok);
  CHECK_THROWS_AS(run_convergence({MeshConfig::A}, {ElementPair::P1P1}, {4, 2}, opt), ContractViolation);
  CHECK_THROWS_AS(run_convergence({MeshConfig::A}, {ElementPair::P1P1}, {0, 2}, opt), ContractViolation);

  // worker fan-out does not change results
  opt.workers = 3;
  const ConvergenceTable p = run_convergence({MeshConfig::A}, {ElementPair::P1P1}, {2, 4}, opt);
  CHECK(p.rows[0].err_u_H1 == t.rows[0].err_u_H1);
  CHECK(p.rows[1].err_p_L2 == t.rows[1].err_p_L2);
}

TEST_CASE("condition parameters") {
  const auto p = condition_params(ElementPair::P1P1, 0.025);
  CHECK(p.beta0 == 0.1);
  CHECK(p.beta1 == 0.1);
  CHECK(p.beta2 == 0.025);
  CHECK(p.beta3 == 0.025);
  CHECK(p.gamma == 10.0);
  CHECK(condition_params(ElementPair::P1P0, 1.0).beta3 == 0.0);
  const BackgroundMesh m = condition_mesh();
  CHECK(m.num_cells() == 6000);
  CHECK(m.h_max() == doctest::Approx(0.2 * std::sqrt(3.0)));
}

TEST_CASE("patch tests pass on config B") {
  const auto results = run_patch_tests(MeshConfig::B, {2, 4}, {ElementPair::P1P1, ElementPair::P1P0}, {});
  CHECK(results.size() == 8);
  for (const auto& r : results) {
    CHECK(r.passed);
    if (r.skipped) {
      CHECK(r.pair == ElementPair::P1P0);
      CHECK_FALSE(r.message.empty());
    } else {
      CHECK(r.max_dof_error <= kPatchTolerance);
    }
  }
}

TEST_CASE("output formats") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");

  const auto dir = std::filesystem::temp_directory_path() / "cutstokes_io_test";
  std::filesystem::remove_all(dir);
  ConvergenceTable t;
  ConvergenceRow ok{MeshConfig::A, ElementPair::P1P1, 4, 0.4, 0.1, 0.2, 10, true, ""};
  ConvergenceRow bad{MeshConfig::B, ElementPair::P1P0, 4, 0.4, 0.1, 0.2, 10, false, "singular"};
  t.rows = {ok, bad};
  write_convergence_csv(dir / "c.csv", t);
  const std::string csv = slurp(dir / "c.csv");
  CHECK(csv.find("config,pair,N,h_max,err_u_H1,err_p_L2\n") != std::string::npos);
  CHECK(csv.find("A,p1p1,4,0.40000000000000002,0.10000000000000001,0.20000000000000001\n") != std::string::npos);
  CHECK(csv.find("B,p1p0,4,0.40000000000000002,nan,nan\n") != std::string::npos);

  std::vector<ConditionCell> cells(4);
  for (int i = 0; i < 4; ++i) {
    cells[i].ok = true;
    cells[i].spectrum.kappa_scaled = i + 1;
  }
  write_condition_csv(dir / "k.csv", cells, {0.99, 0.901}, {0.0, 1.0});
  const std::string k = slurp(dir / "k.csv");
  CHECK(k.find("beta,l_0.990,l_0.901\n0,1,2\n1,3,4\n") != std::string::npos);
  CHECK_THROWS_AS(write_condition_csv(dir / "k.csv", cells, {0.99}, {0.0}), ContractViolation);

  write_manifest(dir, RunManifest{"convergence", {{"n", "4"}}, {"c.csv"}, 1.5});
  const std::string m = slurp(dir / "manifest.json");
  CHECK(m.find("\"csv_schema_version\"") != std::string::npos);
  CHECK(m.find("\"tool_version\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}
