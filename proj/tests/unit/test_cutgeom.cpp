#include <doctest.h>

#include "../oracles.hpp"
#include "cutstokes/cutgeom.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace cutstokes;

namespace {

const Tetrahedron kRef{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

// Half-spaces x <= a plus a loose bounding box.
PolytopeDomain halfspace_domain(const Vec3& n, double d) {
  std::vector<Halfspace> hs{{n, d}};
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    hs.push_back({e, 10.0});
    hs.push_back({-e, 10.0});
  }
  return PolytopeDomain(hs);
}

std::vector<oracle::Face> oracle_faces(const ConvexPolyhedron& p) {
  std::vector<oracle::Face> out;
  for (const auto& f : p.faces) {
    auto pts = p.face_points(f);
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec3& a = pts[i];
      const Vec3& b = pts[(i + 1) % pts.size()];
      n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()),
                (a.x() - b.x()) * (a.y() + b.y()));
    }
    out.push_back({pts, n.normalized()});
  }
  return out;
}

}  // namespace

TEST_CASE("clipping the reference tetrahedron") {
  CHECK(polyhedron_volume(clip_tetrahedron(kRef, halfspace_domain(Vec3::UnitX(), 2.0))) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  const ConvexPolyhedron half = clip_tetrahedron(kRef, halfspace_domain(Vec3::UnitX(), 0.5));
  CHECK(polyhedron_volume(half) == doctest::Approx(7.0 / 48.0).epsilon(1e-14));
  CHECK(clip_tetrahedron(kRef, halfspace_domain(Vec3::UnitX(), -1.0)).empty());

  // the cap face is the triangle x = 0.5 with legs 0.5
  int caps = 0;
  for (const auto& f : half.faces)
    if (f.tag == 0) {
      ++caps;
      CHECK(polygon_area(half.face_points(f)) == doctest::Approx(0.125).epsilon(1e-14));
    }
  CHECK(caps == 1);
}

TEST_CASE("Monte-Carlo volume of the clipped tetrahedron") {
  const auto est = oracle::monte_carlo_volume(Vec3::Zero(), Vec3::Ones(), 1000000, 11u, [](const Vec3& x) {
    return x.x() >= 0 && x.y() >= 0 && x.z() >= 0 && x.sum() <= 1.0 && x.x() <= 0.5;
  });
  const double v = polyhedron_volume(clip_tetrahedron(kRef, halfspace_domain(Vec3::UnitX(), 0.5)));
  CHECK(std::abs(est.mean - v) <= 3.0 * est.sigma);
}

TEST_CASE("measures of simple polyhedra") {
  const ConvexPolyhedron cube = ConvexPolyhedron::from_box(Vec3::Zero(), Vec3::Ones());
  CHECK(polyhedron_volume(cube) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(polyhedron_surface_area(cube) == doctest::Approx(6.0).epsilon(1e-15));
  const ConvexPolyhedron tet = ConvexPolyhedron::from_tetrahedron(kRef);
  CHECK(polyhedron_volume(tet) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(polyhedron_surface_area(tet) == doctest::Approx(1.5 + std::sqrt(3.0) / 2.0).epsilon(1e-15));
  Vec3 closed = Vec3::Zero();
  for (const auto& f : tet.faces) closed += polygon_vector_area(tet.face_points(f));
  CHECK(closed.norm() < 1e-15);
}

TEST_CASE("polytope domain validation") {
  CHECK_THROWS_AS(PolytopeDomain({{Vec3::UnitX(), 1.0}, {-Vec3::UnitX(), 1.0}, {Vec3::UnitY(), 1.0}}),
                  StructuralError);
  // four half-spaces that leave -z open
  CHECK_THROWS_AS(PolytopeDomain({{Vec3::UnitX(), 1.0},
                                  {-Vec3::UnitX(), 1.0},
                                  {Vec3::UnitY(), 1.0},
                                  {-Vec3::UnitY(), 1.0},
                                  {Vec3::UnitZ(), 1.0}}),
                  StructuralError);
  // empty intersection
  CHECK_THROWS_AS(PolytopeDomain({{Vec3::UnitX(), -1.0},
                                  {-Vec3::UnitX(), -1.0},
                                  {Vec3::UnitY(), 1.0},
                                  {-Vec3::UnitY(), 1.0},
                                  {Vec3::UnitZ(), 1.0},
                                  {-Vec3::UnitZ(), 1.0}}),
                  StructuralError);
  const PolytopeDomain box = PolytopeDomain::box(Vec3(-1, 0, 0), Vec3(1, 2, 0.5));
  CHECK(box.volume() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(box.surface_area() == doctest::Approx(2 * (4.0 + 1.0 + 1.0)).epsilon(1e-14));
  CHECK(box.contains(Vec3(0, 1, 0.25)));
  CHECK_FALSE(box.contains(Vec3(0, 3, 0.25)));
  CHECK(box.translated(Vec3(5, 0, 0)).contains(Vec3(5, 1, 0.25)));
  // normals are normalised
  const PolytopeDomain scaled({{Vec3(2, 0, 0), 2.0},
                               {Vec3(-3, 0, 0), 0.0},
                               {Vec3(0, 1, 0), 1.0},
                               {Vec3(0, -1, 0), 0.0},
                               {Vec3(0, 0, 4), 4.0},
                               {Vec3(0, 0, -1), 0.0}});
  CHECK(scaled.volume() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("polyhedron and polygon rules are exact against the divergence oracle") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  while (tested < 20) {
    const Vec3 n = Vec3(u(rng), u(rng), u(rng)).normalized();
    const PolytopeDomain d = halfspace_domain(n, 0.3 * u(rng) + n.dot(Vec3(0.25, 0.25, 0.25)));
    const ConvexPolyhedron p = clip_tetrahedron(kRef, d);
    if (p.empty()) continue;
    ++tested;
    const auto faces = oracle_faces(p);
    const QuadratureRule rule = polyhedron_rule(p, 4);
    for (double w : rule.weights) CHECK(w > 0.0);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b)
        for (int c = 0; a + b + c <= 4; ++c) {
          const double e = oracle::polyhedron_monomial(faces, a, b, c);
          CHECK(std::abs(integrate_monomial(rule, a, b, c) - e) <= 1e-12 * (1.0 + std::abs(e)));
        }
    for (const auto& f : faces) {
      const QuadratureRule s = polygon_rule(f.loop, f.normal, 4);
      REQUIRE(s.normal.has_value());
      CHECK((*s.normal - f.normal).norm() < 1e-12);
      for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
          for (int c = 0; a + b + c <= 4; ++c) {
            const double e = oracle::polygon_monomial(f.loop, a, b, c);
            CHECK(std::abs(integrate_monomial(s, a, b, c) - e) <= 1e-12 * (1.0 + std::abs(e)));
          }
    }
  }
}

TEST_CASE("half-cube decomposition on a single Kuhn cube") {
  const BackgroundMesh m = build_structured_tet_mesh(Box(Vec3::Zero(), Vec3::Ones()), {1, 1, 1});
  const PolytopeDomain d = PolytopeDomain::box(Vec3::Zero(), Vec3(0.5, 1, 1));
  const CutDecomposition cd = classify_and_decompose(m, d);
  CHECK(cd.total_volume() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cd.total_surface_area() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(cd.total_vector_area().norm() < 1e-12);
  double plane = 0.0;
  for (const auto& rules : cd.surface_rules)
    for (const auto& r : rules)
      if ((*r.normal - Vec3::UnitX()).norm() < 1e-12) plane += r.total_weight();
  CHECK(plane == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fitted domain has no boundary zone") {
  const BackgroundMesh m = build_structured_tet_mesh(Box(Vec3::Zero(), Vec3::Ones()), {3, 3, 3});
  const CutDecomposition cd = classify_and_decompose(m, PolytopeDomain::box(Vec3::Zero(), Vec3::Ones()));
  for (CellKind k : cd.classification) CHECK(k == CellKind::Inside);
  CHECK(cd.boundary_zone_facets.empty());
  CHECK(cd.boundary_zone_cells.empty());
  CHECK(cd.total_surface_area() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(cd.g3.satisfied);
}

TEST_CASE("cut box: additivity, partition, closure, zone consistency") {
  const BackgroundMesh m = build_structured_tet_mesh(Box(Vec3::Constant(-1), Vec3::Constant(1)), {5, 5, 5});
  const PolytopeDomain d({{Vec3(1, 0.2, 0), 0.71},
                          {Vec3(-1, 0, 0.1), 0.63},
                          {Vec3(0, 1, 0), 0.77},
                          {Vec3(0.1, -1, 0), 0.58},
                          {Vec3(0, 0, 1), 0.69},
                          {Vec3(0, 0.3, -1), 0.74},
                          {Vec3(1, 1, 1), 1.1}});
  const CutDecomposition cd = classify_and_decompose(m, d);
  CHECK(std::abs(cd.total_volume() - d.volume()) <= 1e-12 * d.volume());
  CHECK(std::abs(cd.total_surface_area() - d.surface_area()) <= 1e-12 * d.surface_area());
  CHECK(cd.total_vector_area().norm() <= 1e-10);

  std::set<int> zone(cd.boundary_zone_facets.begin(), cd.boundary_zone_facets.end());
  for (int f : cd.boundary_zone_facets) {
    const auto [a, b] = m.facet_cells[f];
    REQUIRE(b != kNoCell);
    CHECK((cd.classification[a] == CellKind::Cut || cd.classification[b] == CellKind::Cut));
  }
  for (int c : cd.boundary_zone_cells) {
    CHECK(cd.classification[c] == CellKind::Cut);
    const double whole = m.cell_volume(c);
    double outside = 0.0;
    for (const auto& piece : clip_tetrahedron_complement(m.cell_vertices(c), d))
      outside += polyhedron_volume(piece);
    CHECK(std::abs(cd.cut_volume[c] + outside - whole) <= 1e-12 * whole);
    for (int k = 0; k < 4; ++k) {
      const int f = m.cell_facets[c][k];
      if (cd.is_active_interior_facet(m, f)) CHECK(zone.count(f) == 1);
    }
  }
  for (int c = 0; c < m.num_cells(); ++c) {
    if (cd.classification[c] == CellKind::Outside) {
      CHECK_FALSE(cd.is_active(c));
      CHECK(cd.volume_rules[c].empty());
    }
  }
  CHECK(cd.g3.satisfied);
  std::ostringstream os;
  write_cut_geometry_text(m, d, cd, os);
  CHECK_FALSE(os.str().empty());
}
