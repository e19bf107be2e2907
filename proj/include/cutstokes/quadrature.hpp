#pragma once

#include "cutstokes/common.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cutstokes {

/// Points and non-negative weights on a volume or surface piece. Surface
/// rules additionally carry the outward unit normal of their polygon.
struct QuadratureRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::optional<Vec3> normal;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double total_weight() const;
  void append(const QuadratureRule& other);
};

/// Gauss-Jacobi nodes/weights on [0,1] for the weight (1-t)^alpha, computed
/// with the Golub-Welsch eigenvalue method. Exact for degree 2n-1.
struct GaussJacobi {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussJacobi gauss_jacobi_01(int n, int alpha);

/// Number of collapsed-coordinate points per direction for a given degree.
int points_per_direction(int degree);

/// Conical-product (collapsed Gauss-Jacobi) rules. All weights are positive
/// and the rules integrate every polynomial of total degree <= `degree`
/// exactly.
QuadratureRule tetrahedron_rule(const Tetrahedron& tet, int degree);
QuadratureRule triangle_rule(const Triangle& tri, int degree);

/// Integrate monomial x^a y^b z^c with a rule; used by exactness tests.
double integrate_monomial(const QuadratureRule& rule, int a, int b, int c);

}  // namespace cutstokes
