#pragma once

#include "cutstokes/forms.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>
#include <string>

namespace cutstokes {

enum class SolverMethod { Direct, Minres };

struct SolveOptions {
  SolverMethod method = SolverMethod::Direct;
  double tol = 1e-12;
  int max_iter = 50000;
};

struct SolveReport {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;      // |A x - b_perp|
  double relative_residual = 0.0;  // residual_norm / |b_perp|
  int iterations = 0;              // 0 for the direct path
  double pressure_mean = 0.0;      // before normalisation
  bool converged = false;
  std::string message;
};

/// v - (v.k / k.k) k.
Eigen::VectorXd project_out_kernel(const Eigen::VectorXd& v, const Eigen::VectorXd& kernel);

/// Pseudo-inverse application for a symmetric matrix with a known
/// one-dimensional kernel. The dof where the kernel is largest is pinned to
/// zero and the reduced matrix is factorised by sparse LU (COLAMD column
/// ordering, partial pivoting with Eigen's default threshold 1.0).
class KernelDeflatedSolver {
 public:
  KernelDeflatedSolver(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& kernel);

  bool ok() const { return ok_; }
  const std::string& message() const { return message_; }
  int pinned_dof() const { return pinned_; }
  /// Solution orthogonal to the kernel for a right-hand side projected onto
  /// the range.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::VectorXd kernel_;
  int pinned_ = -1;
  bool ok_ = false;
  std::string message_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
};

/// Kernel-deflated MINRES with symmetric Jacobi scaling. Returns the
/// iterate and the number of iterations; the kernel component of x is zero.
struct MinresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};
MinresResult minres_deflated(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& kernel, double tol, int max_iter);

/// Solve A x = b_perp and shift the pressure to zero mean over Omega.
SolveReport solve(const StokesSystem& system, const SolveOptions& options = {});

/// Shift the pressure block so its integral over Omega vanishes; returns the
/// removed mean.
double normalize_pressure(const StokesSystem& system, Eigen::VectorXd& solution);

}  // namespace cutstokes
