#pragma once

#include "cutstokes/common.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace cutstokes {

/// Axis-aligned box [lo, hi]. Construction rejects empty extents.
class Box {
 public:
  Box(const Vec3& lo, const Vec3& hi);

  const Vec3& lo() const { return lo_; }
  const Vec3& hi() const { return hi_; }
  double volume() const;

 private:
  Vec3 lo_;
  Vec3 hi_;
};

using Cell = std::array<int, 4>;
using Facet = std::array<int, 3>;

inline constexpr int kNoCell = -1;

/// Facet list of a tetrahedral cell list. Facets carry sorted vertex
/// triples; facet_cells[f] = {T+, T-} with T+ the lower cell index and
/// T- = kNoCell on exterior facets. cell_facets[c][k] is the facet opposite
/// local vertex k of cell c.
struct FacetTopology {
  std::vector<Facet> facets;
  std::vector<std::array<int, 2>> facet_cells;
  std::vector<std::array<int, 4>> cell_facets;
};

/// Throws StructuralError if a face is shared by more than two cells.
FacetTopology build_facet_topology(std::span<const Cell> cells);

/// Local vertex indices of the face opposite local vertex k, ordered so the
/// face normal (v1-v0)x(v2-v0) points out of a positively oriented cell.
std::array<int, 3> local_face(int k);

struct BackgroundMesh {
  std::vector<Vec3> vertices;
  std::vector<Cell> cells;
  std::vector<Facet> facets;
  std::vector<std::array<int, 2>> facet_cells;
  std::vector<std::array<int, 4>> cell_facets;
  std::vector<double> cell_diameter;
  std::vector<double> facet_diameter;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_facets() const { return static_cast<int>(facets.size()); }

  Tetrahedron cell_vertices(int c) const;
  Triangle facet_vertices(int f) const;
  double cell_volume(int c) const;
  bool is_interior_facet(int f) const { return facet_cells[f][1] != kNoCell; }
  int num_interior_facets() const;
  int num_exterior_facets() const;
  double h_max() const;
  double h_min() const;
};

/// Structured Kuhn mesh: each of the nx*ny*nz subcubes is split into six
/// tetrahedra sharing the diagonal from the cube's lo corner to its hi
/// corner. Vertices are numbered lexicographically (x fastest), cells by
/// cube then by the fixed permutation order xyz, xzy, yxz, yzx, zxy, zyx.
BackgroundMesh build_structured_tet_mesh(const Box& box, std::array<int, 3> divisions);

/// Assemble topology and size metrics for an arbitrary positively oriented
/// tetrahedral cell list.
BackgroundMesh make_mesh(std::vector<Vec3> vertices, std::vector<Cell> cells);

/// Plain-text dump: "vertices n" followed by n coordinate lines, then
/// "cells m" followed by m lines of four vertex indices.
void write_mesh_text(const BackgroundMesh& mesh, std::ostream& out);

}  // namespace cutstokes
