#pragma once

#include "cutstokes/common.hpp"
#include "cutstokes/cutgeom.hpp"
#include "cutstokes/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <string_view>
#include <vector>

namespace cutstokes {

/// Velocity is always continuous P1; the tag selects the pressure space.
enum class ElementPair { P1P1, P1P0 };

std::string_view to_string(ElementPair pair);
ElementPair element_pair_from_string(std::string_view name);

/// Affine P1 basis on one tetrahedron (barycentric coordinates).
class TetBasis {
 public:
  /// Throws StructuralError for (near-)degenerate cells.
  explicit TetBasis(const Tetrahedron& tet);

  std::array<double, 4> values(const Vec3& x) const;
  const std::array<Vec3, 4>& gradients() const { return gradients_; }

 private:
  Vec3 origin_;
  Mat3 inverse_;
  std::array<Vec3, 4> gradients_;
};

struct BasisEval {
  std::array<double, 4> values;
  std::array<Vec3, 4> gradients;
};
BasisEval eval_basis(const Tetrahedron& cell, const Vec3& point);

/// Global numbering on the active mesh: velocity block first (components
/// interleaved per active vertex), pressure block after it.
struct DofMap {
  ElementPair pair = ElementPair::P1P1;
  int n_velocity_dofs = 0;
  int n_pressure_dofs = 0;
  std::vector<int> active_vertices;      // active position -> background vertex
  std::vector<int> vertex_index;         // background vertex -> active position or -1
  std::vector<int> active_cells;         // active position -> background cell
  std::vector<int> cell_index;           // background cell -> active position or -1
  std::vector<std::array<int, 12>> cell_to_velocity_dofs;  // (vertex a, comp i) at 3a+i
  std::vector<std::array<int, 4>> cell_to_pressure_dofs;   // first pressure_dofs_per_cell used
  int pressure_dofs_per_cell = 4;
  Eigen::VectorXd pressure_kernel_vector;

  int size() const { return n_velocity_dofs + n_pressure_dofs; }
  int pressure_offset() const { return n_velocity_dofs; }
  int velocity_dof(int active_vertex, int component) const { return 3 * active_vertex + component; }
};

DofMap build_dofmap(const BackgroundMesh& mesh, const CutDecomposition& decomposition, ElementPair pair);

}  // namespace cutstokes
