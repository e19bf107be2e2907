#include "cutstokes/spaces.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace cutstokes {

std::string_view to_string(ElementPair pair) {
  return pair == ElementPair::P1P1 ? "p1p1" : "p1p0";
}

ElementPair element_pair_from_string(std::string_view name) {
  if (name == "p1p1" || name == "P1P1") return ElementPair::P1P1;
  if (name == "p1p0" || name == "P1P0") return ElementPair::P1P0;
  throw ContractViolation("unknown element pair: " + std::string(name));
}

TetBasis::TetBasis(const Tetrahedron& tet) : origin_(tet[0]) {
  Mat3 jac;
  jac.col(0) = tet[1] - tet[0];
  jac.col(1) = tet[2] - tet[0];
  jac.col(2) = tet[3] - tet[0];
  const double scale = std::max({jac.col(0).norm(), jac.col(1).norm(), jac.col(2).norm()});
  if (!(std::abs(jac.determinant()) > 1e-14 * scale * scale * scale)) {
    throw StructuralError("TetBasis: degenerate cell");
  }
  inverse_ = jac.inverse();
  Vec3 sum = Vec3::Zero();
  for (int a = 1; a < 4; ++a) {
    gradients_[a] = inverse_.row(a - 1).transpose();
    sum += gradients_[a];
  }
  gradients_[0] = -sum;
}

std::array<double, 4> TetBasis::values(const Vec3& x) const {
  const Vec3 l = inverse_ * (x - origin_);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

BasisEval eval_basis(const Tetrahedron& cell, const Vec3& point) {
  const TetBasis basis(cell);
  return {basis.values(point), basis.gradients()};
}

DofMap build_dofmap(const BackgroundMesh& mesh, const CutDecomposition& decomposition, ElementPair pair) {
  DofMap map;
  map.pair = pair;
  map.active_cells = decomposition.active_cells;
  map.cell_index = decomposition.active_index;

  map.vertex_index.assign(mesh.num_vertices(), -1);
  for (int c : map.active_cells) {
    for (int v : mesh.cells[c]) map.vertex_index[v] = 0;
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (map.vertex_index[v] == 0) {
      map.vertex_index[v] = static_cast<int>(map.active_vertices.size());
      map.active_vertices.push_back(v);
    }
  }
  const int nv = static_cast<int>(map.active_vertices.size());
  const int ncells = static_cast<int>(map.active_cells.size());
  map.n_velocity_dofs = 3 * nv;
  map.n_pressure_dofs = pair == ElementPair::P1P1 ? nv : ncells;
  map.pressure_dofs_per_cell = pair == ElementPair::P1P1 ? 4 : 1;

  map.cell_to_velocity_dofs.resize(ncells);
  map.cell_to_pressure_dofs.resize(ncells);
  for (int k = 0; k < ncells; ++k) {
    const Cell& cell = mesh.cells[map.active_cells[k]];
    for (int a = 0; a < 4; ++a) {
      const int av = map.vertex_index[cell[a]];
      for (int i = 0; i < 3; ++i) map.cell_to_velocity_dofs[k][3 * a + i] = map.velocity_dof(av, i);
      map.cell_to_pressure_dofs[k][a] =
          pair == ElementPair::P1P1 ? map.n_velocity_dofs + av : (a == 0 ? map.n_velocity_dofs + k : -1);
    }
  }
  map.pressure_kernel_vector = Eigen::VectorXd::Zero(map.size());
  map.pressure_kernel_vector.tail(map.n_pressure_dofs).setOnes();
  return map;
}

}  // namespace cutstokes
