#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <stdexcept>
#include <string>

namespace cutstokes {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Tetrahedron = std::array<Vec3, 4>;
using Triangle = std::array<Vec3, 3>;

/// Raised when input data is structurally invalid (non-manifold meshes,
/// unbounded domains, degenerate cells).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller violates a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline double signed_volume(const Tetrahedron& t) {
  return (t[1] - t[0]).dot((t[2] - t[0]).cross(t[3] - t[0])) / 6.0;
}

inline double tetrahedron_volume(const Tetrahedron& t) {
  return std::abs(signed_volume(t));
}

inline double triangle_area(const Triangle& t) {
  return 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
}

}  // namespace cutstokes
