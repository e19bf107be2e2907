#pragma once

// Template definitions for analysis.hpp.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <vector>

namespace cutstokes {

template <class Op>
LanczosResult lanczos_largest_modulus(const Op& op, int n, const Eigen::VectorXd& deflate, double tol,
                                      int max_iter) {
  LanczosResult result;
  const bool has_deflate = deflate.size() == n && deflate.squaredNorm() > 0.0;
  const Eigen::VectorXd kdir = has_deflate ? Eigen::VectorXd(deflate.normalized()) : Eigen::VectorXd();
  auto orthogonalise = [&](Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
      if (has_deflate) v -= kdir.dot(v) * kdir;
      for (const auto& q : basis) v -= q.dot(v) * q;
    }
  };

  std::mt19937 rng(20240611u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  std::vector<Eigen::VectorXd> basis;
  orthogonalise(v, basis);
  v.normalize();

  const int limit = std::min(max_iter, n - (has_deflate ? 1 : 0));
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd w(n);
  for (int m = 0; m < limit; ++m) {
    basis.push_back(v);
    op(v, w);
    const double a = v.dot(w);
    alpha.push_back(a);
    orthogonalise(w, basis);
    const double b = w.norm();

    const int k = static_cast<int>(alpha.size());
    const bool check = (k % 5 == 0) || k == limit || b == 0.0;
    if (check) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
      Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1))
                                  : Eigen::VectorXd();
      double theta = 0.0;
      double residual = 0.0;
      if (k == 1) {
        theta = diag[0];
        residual = b;
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const auto& ev = es.eigenvalues();
        const int idx = std::abs(ev[0]) >= std::abs(ev[k - 1]) ? 0 : k - 1;
        theta = ev[idx];
        residual = std::abs(b * es.eigenvectors()(k - 1, idx));
      }
      result.largest_abs = std::abs(theta);
      result.iterations = k;
      if (residual <= tol * std::abs(theta) || b <= 1e-14 * std::abs(theta) || k == limit) {
        result.converged = residual <= tol * std::abs(theta) || b <= 1e-14 * std::abs(theta);
        return result;
      }
    }
    beta.push_back(b);
    v = w / b;
  }
  return result;
}

}  // namespace cutstokes
