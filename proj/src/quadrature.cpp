#include "cutstokes/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace cutstokes {

double QuadratureRule::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

GaussJacobi gauss_jacobi_01(int n, int alpha) {
  if (n < 1 || alpha < 0) {
    throw ContractViolation("gauss_jacobi_01: need n >= 1 and alpha >= 0");
  }
  // Jacobi matrix for weight (1-x)^alpha on [-1,1] (beta = 0).
  const double a = alpha;
  const double b = 0.0;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0) {
      diag(k) = (b - a) / (a + b + 2.0);
    } else {
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    sub(k - 1) = std::sqrt(num / den);
  }
  GaussJacobi rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // mu0 = int_{-1}^{1} (1-x)^alpha dx = 2^{alpha+1}/(alpha+1)
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  if (n == 1) {
    rule.nodes[0] = 0.5 * (1.0 + diag(0));
    rule.weights[0] = mu0 / std::pow(2.0, a + 1.0);
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (1.0 + x);
    // (1-x)^alpha dx = 2^alpha (1-t)^alpha * 2 dt
    rule.weights[i] = mu0 * v0 * v0 / std::pow(2.0, a + 1.0);
  }
  return rule;
}

int points_per_direction(int degree) {
  if (degree < 0) throw ContractViolation("quadrature degree must be >= 0");
  return std::max(1, (degree + 2) / 2);
}

namespace {

struct ReferenceRule {
  std::vector<Vec3> points;  // reference coordinates (z unused for triangles)
  std::vector<double> weights;
};

ReferenceRule build_reference_tetrahedron(int degree) {
  const int n = points_per_direction(degree);
  const auto gx = gauss_jacobi_01(n, 0);
  const auto gy = gauss_jacobi_01(n, 1);
  const auto gz = gauss_jacobi_01(n, 2);
  ReferenceRule r;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double w = gz.nodes[k];
        const double v = gy.nodes[j];
        const double u = gx.nodes[i];
        r.points.emplace_back(u * (1.0 - v) * (1.0 - w), v * (1.0 - w), w);
        r.weights.push_back(gx.weights[i] * gy.weights[j] * gz.weights[k]);
      }
    }
  }
  return r;
}

ReferenceRule build_reference_triangle(int degree) {
  const int n = points_per_direction(degree);
  const auto gx = gauss_jacobi_01(n, 0);
  const auto gy = gauss_jacobi_01(n, 1);
  ReferenceRule r;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = gy.nodes[j];
      const double u = gx.nodes[i];
      r.points.emplace_back(u * (1.0 - v), v, 0.0);
      r.weights.push_back(gx.weights[i] * gy.weights[j]);
    }
  }
  return r;
}

const ReferenceRule& cached_reference(int degree, bool tetrahedron) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, ReferenceRule> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(degree, tetrahedron);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache
             .emplace(key, tetrahedron ? build_reference_tetrahedron(degree)
                                       : build_reference_triangle(degree))
             .first;
  }
  return it->second;
}

}  // namespace

QuadratureRule tetrahedron_rule(const Tetrahedron& tet, int degree) {
  const auto& ref = cached_reference(degree, true);
  Mat3 jac;
  jac.col(0) = tet[1] - tet[0];
  jac.col(1) = tet[2] - tet[0];
  jac.col(2) = tet[3] - tet[0];
  const double det = std::abs(jac.determinant());
  QuadratureRule rule;
  rule.points.reserve(ref.points.size());
  rule.weights.reserve(ref.points.size());
  for (std::size_t q = 0; q < ref.points.size(); ++q) {
    rule.points.push_back(tet[0] + jac * ref.points[q]);
    rule.weights.push_back(ref.weights[q] * det);
  }
  return rule;
}

QuadratureRule triangle_rule(const Triangle& tri, int degree) {
  const auto& ref = cached_reference(degree, false);
  const Vec3 e1 = tri[1] - tri[0];
  const Vec3 e2 = tri[2] - tri[0];
  const double scale = e1.cross(e2).norm();  // = 2 * area
  QuadratureRule rule;
  rule.points.reserve(ref.points.size());
  rule.weights.reserve(ref.points.size());
  for (std::size_t q = 0; q < ref.points.size(); ++q) {
    rule.points.push_back(tri[0] + ref.points[q].x() * e1 + ref.points[q].y() * e2);
    rule.weights.push_back(ref.weights[q] * scale);
  }
  return rule;
}

double integrate_monomial(const QuadratureRule& rule, int a, int b, int c) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3& x = rule.points[q];
    sum += rule.weights[q] * std::pow(x.x(), a) * std::pow(x.y(), b) * std::pow(x.z(), c);
  }
  return sum;
}

}  // namespace cutstokes
