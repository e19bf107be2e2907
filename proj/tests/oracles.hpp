#pragma once

// Reference integrals used by the tests. Nothing here calls into the
// library's clipping or quadrature code.

#include "cutstokes/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using cutstokes::Vec3;

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Polynomial in K barycentric coordinates: exponent tuple -> coefficient.
template <int K>
using BaryPoly = std::map<std::array<int, K>, double>;

template <int K>
BaryPoly<K> multiply(const BaryPoly<K>& p, const std::array<double, K>& linear) {
  BaryPoly<K> out;
  for (const auto& [e, c] : p) {
    for (int i = 0; i < K; ++i) {
      if (linear[i] == 0.0) continue;
      auto f = e;
      ++f[i];
      out[f] += c * linear[i];
    }
  }
  return out;
}

// x^a y^b z^c on a simplex with K vertices (K = 3 triangle, K = 4 tet),
// exact via the Dirichlet moment formula
//   int prod lambda_i^k_i = measure * (K-1)! prod k_i! / (sum k + K - 1)!.
template <int K>
double simplex_monomial(const std::array<Vec3, K>& v, double measure, int a, int b, int c) {
  BaryPoly<K> poly;
  poly[std::array<int, K>{}] = 1.0;
  const int exps[3] = {a, b, c};
  for (int axis = 0; axis < 3; ++axis) {
    std::array<double, K> lin;
    for (int i = 0; i < K; ++i) lin[i] = v[i][axis];
    for (int k = 0; k < exps[axis]; ++k) poly = multiply<K>(poly, lin);
  }
  double total = 0.0;
  for (const auto& [e, coef] : poly) {
    double num = 1.0;
    int sum = 0;
    for (int i = 0; i < K; ++i) {
      num *= factorial(e[i]);
      sum += e[i];
    }
    total += coef * num / factorial(sum + K - 1);
  }
  return measure * factorial(K - 1) * total;
}

inline double tet_monomial(const std::array<Vec3, 4>& t, int a, int b, int c) {
  const double vol = std::abs((t[1] - t[0]).dot((t[2] - t[0]).cross(t[3] - t[0]))) / 6.0;
  return simplex_monomial<4>(t, vol, a, b, c);
}

inline double triangle_monomial(const std::array<Vec3, 3>& t, int a, int b, int c) {
  const double area = 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
  return simplex_monomial<3>(t, area, a, b, c);
}

// Planar convex polygon integral by vertex fan plus exact triangle moments.
inline double polygon_monomial(const std::vector<Vec3>& loop, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < loop.size(); ++i)
    s += triangle_monomial({loop[0], loop[i], loop[i + 1]}, a, b, c);
  return s;
}

struct Face {
  std::vector<Vec3> loop;  // counter-clockwise seen from outside
  Vec3 normal;             // outward unit normal
};

// Volume integral by the divergence theorem along x:
//   int_P x^a y^b z^c = 1/(a+1) sum_F n_x int_F x^(a+1) y^b z^c.
inline double polyhedron_monomial(const std::vector<Face>& faces, int a, int b, int c) {
  double s = 0.0;
  for (const auto& f : faces) {
    if (f.normal.x() == 0.0) continue;
    s += f.normal.x() * polygon_monomial(f.loop, a + 1, b, c);
  }
  return s / (a + 1);
}

struct Plane {
  Vec3 n;  // unit
  double d;
};

// Faces of the bounded polytope {n_i . x <= d_i} by brute-force vertex
// enumeration over plane triples and angular sorting within each plane.
inline std::vector<Face> polytope_faces(const std::vector<Plane>& planes, double tol = 1e-9) {
  std::vector<Vec3> verts;
  const int m = static_cast<int>(planes.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        cutstokes::Mat3 M;
        M.row(0) = planes[i].n;
        M.row(1) = planes[j].n;
        M.row(2) = planes[k].n;
        if (std::abs(M.determinant()) < 1e-10) continue;
        const Vec3 x = M.inverse() * Vec3(planes[i].d, planes[j].d, planes[k].d);
        bool inside = true;
        for (const auto& p : planes) inside = inside && p.n.dot(x) - p.d <= tol;
        if (!inside) continue;
        bool dup = false;
        for (const auto& v : verts) dup = dup || (v - x).norm() < 1e-9;
        if (!dup) verts.push_back(x);
      }
  std::vector<Face> faces;
  for (const auto& p : planes) {
    std::vector<Vec3> on;
    for (const auto& v : verts)
      if (std::abs(p.n.dot(v) - p.d) <= tol) on.push_back(v);
    if (on.size() < 3) continue;
    Vec3 centre = Vec3::Zero();
    for (const auto& v : on) centre += v;
    centre /= static_cast<double>(on.size());
    const Vec3 e1 = (on[0] - centre).normalized();
    const Vec3 e2 = p.n.cross(e1);
    std::sort(on.begin(), on.end(), [&](const Vec3& u, const Vec3& v) {
      return std::atan2((u - centre).dot(e2), (u - centre).dot(e1)) <
             std::atan2((v - centre).dot(e2), (v - centre).dot(e1));
    });
    faces.push_back({on, p.n});
  }
  return faces;
}

inline double faces_area(const std::vector<Face>& faces) {
  double s = 0.0;
  for (const auto& f : faces) s += polygon_monomial(f.loop, 0, 0, 0);
  return s;
}

// Pyramid decomposition about an interior reference point.
inline double faces_volume(const std::vector<Face>& faces) {
  Vec3 ref = Vec3::Zero();
  int count = 0;
  for (const auto& f : faces)
    for (const auto& v : f.loop) {
      ref += v;
      ++count;
    }
  ref /= count;
  double s = 0.0;
  for (const auto& f : faces) s += polygon_monomial(f.loop, 0, 0, 0) * f.normal.dot(f.loop[0] - ref) / 3.0;
  return s;
}

struct MonteCarloEstimate {
  double mean;
  double sigma;
};

// Fraction-of-box estimate of a volume with its one-sigma error.
template <class Inside>
MonteCarloEstimate monte_carlo_volume(const Vec3& lo, const Vec3& hi, long samples, unsigned seed,
                                      Inside inside) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()), uz(lo.z(), hi.z());
  long hits = 0;
  for (long i = 0; i < samples; ++i)
    if (inside(Vec3(ux(rng), uy(rng), uz(rng)))) ++hits;
  const double box = (hi - lo).prod();
  const double p = static_cast<double>(hits) / samples;
  return {box * p, box * std::sqrt(p * (1.0 - p) / samples)};
}

}  // namespace oracle
