#pragma once

#include "cutstokes/common.hpp"
#include "cutstokes/mesh.hpp"
#include "cutstokes/quadrature.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace cutstokes {

/// The closed half-space {x : normal . x <= offset}.
struct Halfspace {
  Vec3 normal;
  double offset;

  double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
};

/// Relative tolerance for classification and vertex snapping.
inline constexpr double kGeomTolerance = 1e-12;

/// Face tag for faces inherited from the clipped tetrahedron.
inline constexpr int kOriginalFace = -1;

/// A convex polyhedron stored as a vertex list plus outward-oriented face
/// loops. Each face remembers which half-space generated it, or
/// kOriginalFace.
struct ConvexPolyhedron {
  struct Face {
    std::vector<int> loop;
    int tag = kOriginalFace;
  };
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  bool empty() const { return faces.empty(); }
  std::vector<Vec3> face_points(const Face& face) const;

  static ConvexPolyhedron from_tetrahedron(const Tetrahedron& tet);
  static ConvexPolyhedron from_box(const Vec3& lo, const Vec3& hi);
};

/// Bounded, non-empty intersection of half-spaces. Normals are normalised on
/// construction; boundedness and non-emptiness are verified by enumerating
/// the polytope vertices.
class PolytopeDomain {
 public:
  explicit PolytopeDomain(std::vector<Halfspace> halfspaces);
  static PolytopeDomain box(const Vec3& lo, const Vec3& hi);

  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  int size() const { return static_cast<int>(halfspaces_.size()); }
  bool contains(const Vec3& x, double tol = 0.0) const;
  PolytopeDomain translated(const Vec3& shift) const;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  /// Exact |Omega| and area of its boundary, from the polytope itself.
  double volume() const { return volume_; }
  double surface_area() const { return surface_area_; }
  const ConvexPolyhedron& polyhedron() const { return polyhedron_; }

 private:
  std::vector<Halfspace> halfspaces_;
  std::vector<Vec3> vertices_;
  ConvexPolyhedron polyhedron_;
  double volume_ = 0.0;
  double surface_area_ = 0.0;
};

/// Clip by one half-space. Vertices within snap_tol of the plane are moved
/// onto it first; faces lying in the plane are retagged with `tag`.
ConvexPolyhedron clip(const ConvexPolyhedron& poly, const Halfspace& h, int tag, double snap_tol);

/// Successive clipping of a tetrahedron by every half-space of the domain,
/// snapping at kGeomTolerance times the tetrahedron diameter.
ConvexPolyhedron clip_tetrahedron(const Tetrahedron& tet, const PolytopeDomain& domain);

/// Disjoint convex pieces covering tet \ domain: piece i lies outside
/// half-space i and inside half-spaces 0..i-1.
std::vector<ConvexPolyhedron> clip_tetrahedron_complement(const Tetrahedron& tet,
                                                          const PolytopeDomain& domain);

// Divergence-theorem measures.
double polyhedron_volume(const ConvexPolyhedron& poly);
double polyhedron_surface_area(const ConvexPolyhedron& poly);
double polygon_area(std::span<const Vec3> loop);
/// Sum of the cross products of a fan triangulation: area times unit normal.
Vec3 polygon_vector_area(std::span<const Vec3> loop);

/// Centroid-fan tetrahedralisation plus simplex rules.
QuadratureRule polyhedron_rule(const ConvexPolyhedron& poly, int degree);
/// Vertex-fan triangulation plus triangle rules; `normal` is attached.
QuadratureRule polygon_rule(std::span<const Vec3> loop, const Vec3& normal, int degree);

enum class CellKind { Inside, Outside, Cut };

/// Walk length from cut cells to the nearest uncut active cell through
/// interior facets.
struct G3Report {
  bool satisfied = true;
  int max_steps = 0;
  int unreachable_cut_cells = 0;
};

struct CutDecomposition {
  std::vector<CellKind> classification;  // per background cell
  std::vector<int> active_cells;         // sorted background indices
  std::vector<int> active_index;         // background -> active position or -1
  std::vector<int> boundary_zone_cells;  // CUT cells
  std::vector<int> boundary_zone_facets; // interior facets with a CUT neighbour
  std::vector<double> cut_volume;        // |T cap Omega| per background cell
  std::vector<QuadratureRule> volume_rules;                // per background cell
  std::vector<std::vector<QuadratureRule>> surface_rules;  // per background cell
  G3Report g3;
  int volume_degree = 4;
  int surface_degree = 4;

  bool is_active(int cell) const { return active_index[cell] >= 0; }
  bool is_active_interior_facet(const BackgroundMesh& mesh, int f) const;
  double total_volume() const;
  double total_surface_area() const;
  Vec3 total_vector_area() const;
};

/// Throws StructuralError for unbounded domains (enforced by PolytopeDomain).
CutDecomposition classify_and_decompose(const BackgroundMesh& mesh, const PolytopeDomain& domain,
                                        int volume_degree = 4, int surface_degree = 4);

/// Decomposition of a boundary-fitted problem (Omega equal to the meshed
/// box): every cell INSIDE, surface rules on exterior facets, no clipping.
CutDecomposition boundary_fitted_decomposition(const BackgroundMesh& mesh, int volume_degree = 4,
                                               int surface_degree = 4);

/// Text dump of the cut polyhedra ("cell c kind" then faces as point lists).
void write_cut_geometry_text(const BackgroundMesh& mesh, const PolytopeDomain& domain,
                             const CutDecomposition& decomposition, std::ostream& out);

}  // namespace cutstokes
