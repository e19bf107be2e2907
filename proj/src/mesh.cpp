#include "cutstokes/mesh.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <tuple>

namespace cutstokes {

Box::Box(const Vec3& lo, const Vec3& hi) : lo_(lo), hi_(hi) {
  for (int i = 0; i < 3; ++i) {
    if (!(hi[i] > lo[i])) throw ContractViolation("Box: hi must exceed lo in every axis");
  }
}

double Box::volume() const { return (hi_ - lo_).prod(); }

std::array<int, 3> local_face(int k) {
  // Outward orientation for a cell with positive signed volume.
  static constexpr std::array<std::array<int, 3>, 4> faces = {{
      {1, 2, 3},
      {0, 3, 2},
      {0, 1, 3},
      {0, 2, 1},
  }};
  return faces.at(k);
}

FacetTopology build_facet_topology(std::span<const Cell> cells) {
  struct Incidence {
    Facet key;
    int cell;
    int local;
  };
  std::vector<Incidence> incidences;
  incidences.reserve(cells.size() * 4);
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    for (int k = 0; k < 4; ++k) {
      const auto lf = local_face(k);
      Facet key = {cells[c][lf[0]], cells[c][lf[1]], cells[c][lf[2]]};
      std::sort(key.begin(), key.end());
      incidences.push_back({key, c, k});
    }
  }
  std::sort(incidences.begin(), incidences.end(), [](const Incidence& a, const Incidence& b) {
    return std::tie(a.key, a.cell, a.local) < std::tie(b.key, b.cell, b.local);
  });

  FacetTopology topo;
  topo.cell_facets.assign(cells.size(), {-1, -1, -1, -1});
  std::size_t i = 0;
  while (i < incidences.size()) {
    std::size_t j = i + 1;
    while (j < incidences.size() && incidences[j].key == incidences[i].key) ++j;
    const std::size_t count = j - i;
    if (count > 2) {
      throw StructuralError("build_facet_topology: face shared by more than two cells");
    }
    const int f = static_cast<int>(topo.facets.size());
    topo.facets.push_back(incidences[i].key);
    std::array<int, 2> owners = {incidences[i].cell, kNoCell};
    if (count == 2) {
      if (incidences[i + 1].cell == incidences[i].cell) {
        throw StructuralError("build_facet_topology: cell repeats a face");
      }
      owners[1] = incidences[i + 1].cell;
    }
    topo.facet_cells.push_back(owners);
    for (std::size_t k = i; k < j; ++k) {
      topo.cell_facets[incidences[k].cell][incidences[k].local] = f;
    }
    i = j;
  }
  return topo;
}

Tetrahedron BackgroundMesh::cell_vertices(int c) const {
  const Cell& cell = cells[c];
  return {vertices[cell[0]], vertices[cell[1]], vertices[cell[2]], vertices[cell[3]]};
}

Triangle BackgroundMesh::facet_vertices(int f) const {
  const Facet& facet = facets[f];
  return {vertices[facet[0]], vertices[facet[1]], vertices[facet[2]]};
}

double BackgroundMesh::cell_volume(int c) const { return tetrahedron_volume(cell_vertices(c)); }

int BackgroundMesh::num_interior_facets() const {
  return static_cast<int>(std::count_if(facet_cells.begin(), facet_cells.end(),
                                        [](const auto& fc) { return fc[1] != kNoCell; }));
}

int BackgroundMesh::num_exterior_facets() const { return num_facets() - num_interior_facets(); }

double BackgroundMesh::h_max() const {
  return cell_diameter.empty() ? 0.0 : *std::max_element(cell_diameter.begin(), cell_diameter.end());
}

double BackgroundMesh::h_min() const {
  return cell_diameter.empty() ? 0.0 : *std::min_element(cell_diameter.begin(), cell_diameter.end());
}

BackgroundMesh make_mesh(std::vector<Vec3> vertices, std::vector<Cell> cells) {
  BackgroundMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  for (auto& cell : mesh.cells) {
    const Tetrahedron t = {mesh.vertices[cell[0]], mesh.vertices[cell[1]], mesh.vertices[cell[2]],
                           mesh.vertices[cell[3]]};
    const double vol = signed_volume(t);
    if (vol == 0.0) throw StructuralError("make_mesh: degenerate cell");
    if (vol < 0.0) std::swap(cell[2], cell[3]);
  }
  auto topo = build_facet_topology(mesh.cells);
  mesh.facets = std::move(topo.facets);
  mesh.facet_cells = std::move(topo.facet_cells);
  mesh.cell_facets = std::move(topo.cell_facets);

  mesh.cell_diameter.resize(mesh.cells.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto t = mesh.cell_vertices(c);
    double d = 0.0;
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) d = std::max(d, (t[a] - t[b]).norm());
    }
    mesh.cell_diameter[c] = d;
  }
  mesh.facet_diameter.resize(mesh.facets.size());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const auto [plus, minus] = mesh.facet_cells[f];
    mesh.facet_diameter[f] = minus == kNoCell
                                 ? mesh.cell_diameter[plus]
                                 : 0.5 * (mesh.cell_diameter[plus] + mesh.cell_diameter[minus]);
  }
  return mesh;
}

BackgroundMesh build_structured_tet_mesh(const Box& box, std::array<int, 3> divisions) {
  for (int n : divisions) {
    if (n < 1) throw ContractViolation("build_structured_tet_mesh: divisions must be >= 1");
  }
  const auto [nx, ny, nz] = divisions;
  auto coordinate = [&](int axis, int i) {
    const int n = divisions[axis];
    if (i == n) return box.hi()[axis];
    return box.lo()[axis] + (box.hi()[axis] - box.lo()[axis]) * i / n;
  };
  auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        vertices.emplace_back(coordinate(0, i), coordinate(1, j), coordinate(2, k));
      }
    }
  }

  static constexpr std::array<std::array<int, 3>, 6> permutations = {{
      {0, 1, 2},
      {0, 2, 1},
      {1, 0, 2},
      {1, 2, 0},
      {2, 0, 1},
      {2, 1, 0},
  }};
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(6) * nx * ny * nz);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (const auto& perm : permutations) {
          std::array<int, 3> step = {i, j, k};
          Cell cell;
          cell[0] = vid(step[0], step[1], step[2]);
          for (int s = 0; s < 3; ++s) {
            ++step[perm[s]];
            cell[s + 1] = vid(step[0], step[1], step[2]);
          }
          cells.push_back(cell);
        }
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(cells));
}

void write_mesh_text(const BackgroundMesh& mesh, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  out << "cells " << mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) out << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  out.precision(old_precision);
}

}  // namespace cutstokes
