#include <doctest.h>

#include "cutstokes/experiments.hpp"
#include "cutstokes/spaces.hpp"

#include <random>

using namespace cutstokes;

TEST_CASE("barycentric basis") {
  const Tetrahedron ref{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const BasisEval c = eval_basis(ref, Vec3::Constant(0.25));
  for (double v : c.values) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  CHECK((c.gradients[0] - Vec3(-1, -1, -1)).norm() < 1e-15);
  for (int i = 0; i < 4; ++i) {
    const BasisEval e = eval_basis(ref, ref[i]);
    for (int j = 0; j < 4; ++j) CHECK(e.values[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  CHECK_THROWS_AS(TetBasis({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 0, 1)}), StructuralError);
}

TEST_CASE("partition of unity and linear reproduction at random points") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Tetrahedron t;
    for (auto& v : t) v = Vec3(u(rng), u(rng), u(rng));
    if (std::abs(signed_volume(t)) < 1e-3) continue;
    const TetBasis basis(t);
    Vec3 gsum = Vec3::Zero();
    for (const auto& g : basis.gradients()) gsum += g;
    CHECK(gsum.norm() < 1e-13);
    const Vec3 a(0.3, -1.2, 2.0);
    for (int k = 0; k < 20; ++k) {
      double l[4];
      double s = 0.0;
      for (double& x : l) s += (x = w(rng));
      Vec3 x = Vec3::Zero();
      for (int i = 0; i < 4; ++i) x += (l[i] / s) * t[i];
      const auto vals = basis.values(x);
      CHECK(vals[0] + vals[1] + vals[2] + vals[3] == doctest::Approx(1.0).epsilon(1e-13));
      double interp = 0.0;
      for (int i = 0; i < 4; ++i) interp += vals[i] * (a.dot(t[i]) + 0.7);
      CHECK(interp == doctest::Approx(a.dot(x) + 0.7).epsilon(1e-13));
    }
  }
}

TEST_CASE("dof counts") {
  const BackgroundMesh m = build_structured_tet_mesh(Box(Vec3::Zero(), Vec3::Ones()), {1, 1, 1});
  const CutDecomposition cd = boundary_fitted_decomposition(m);
  const DofMap p11 = build_dofmap(m, cd, ElementPair::P1P1);
  CHECK(p11.n_velocity_dofs == 24);
  CHECK(p11.n_pressure_dofs == 8);
  CHECK(p11.size() == 32);
  const DofMap p10 = build_dofmap(m, cd, ElementPair::P1P0);
  CHECK(p10.size() == 30);
  CHECK(p10.pressure_dofs_per_cell == 1);
  CHECK(p10.pressure_kernel_vector.head(24).norm() == 0.0);
  CHECK(p10.pressure_kernel_vector.tail(6).minCoeff() == 1.0);
  CHECK(p10.pressure_kernel_vector.tail(6).maxCoeff() == 1.0);

  const BackgroundMesh big = condition_mesh();
  const PolytopeDomain d = PolytopeDomain::box(Vec3::Constant(-0.99), Vec3::Constant(0.99));
  const DofMap dm = build_dofmap(big, classify_and_decompose(big, d), ElementPair::P1P1);
  CHECK(dm.size() == 5324);
}

TEST_CASE("only dofs of active cells are numbered") {
  const BackgroundMesh m = build_structured_tet_mesh(Box(Vec3::Zero(), Vec3::Ones()), {4, 4, 4});
  const PolytopeDomain d = PolytopeDomain::box(Vec3::Zero(), Vec3::Constant(0.4));
  const CutDecomposition cd = classify_and_decompose(m, d);
  const DofMap dm = build_dofmap(m, cd, ElementPair::P1P1);
  CHECK(dm.active_cells.size() < m.cells.size());
  std::vector<int> seen(dm.active_vertices.size(), 0);
  for (std::size_t k = 0; k < dm.active_cells.size(); ++k)
    for (int a = 0; a < 4; ++a) {
      const int av = dm.vertex_index[m.cells[dm.active_cells[k]][a]];
      REQUIRE(av >= 0);
      seen[av] = 1;
      CHECK(dm.cell_to_velocity_dofs[k][3 * a + 2] == dm.velocity_dof(av, 2));
      CHECK(dm.cell_to_pressure_dofs[k][a] == dm.pressure_offset() + av);
    }
  for (int s : seen) CHECK(s == 1);
  CHECK(element_pair_from_string("p1p0") == ElementPair::P1P0);
  CHECK(to_string(ElementPair::P1P1) == "p1p1");
  CHECK_THROWS_AS(element_pair_from_string("p2p1"), ContractViolation);
}
