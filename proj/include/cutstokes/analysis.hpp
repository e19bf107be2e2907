#pragma once

#include "cutstokes/cutgeom.hpp"
#include "cutstokes/forms.hpp"
#include "cutstokes/mesh.hpp"
#include "cutstokes/spaces.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <utility>

namespace cutstokes {

struct ErrorReport {
  double h_max = 0.0;
  double velocity_H1_error = 0.0;  // full H1 norm (L2 + gradient parts)
  double velocity_L2_error = 0.0;
  double velocity_gradient_error = 0.0;
  double pressure_L2_error = 0.0;
};

/// Fictitious: integrate over the full active cells (the natural extension
/// of the exact solution to Omega*). Physical: over T cap Omega only.
enum class ErrorDomain { Fictitious, Physical };

ErrorReport compute_errors(const Eigen::VectorXd& solution, const ExactSolution& exact,
                           const BackgroundMesh& mesh, const CutDecomposition& decomposition,
                           const DofMap& dofmap, ErrorDomain domain = ErrorDomain::Fictitious,
                           int degree = 4);

/// Squared components of the starred energy norms.
struct EnergyNorms {
  double velocity_gradient_sq = 0.0;  // |grad v|^2 over Omega*
  double velocity_boundary_sq = 0.0;  // |h^{-1/2} v|^2 over Gamma
  double pressure_sq = 0.0;           // |q|^2 over Omega*
};

EnergyNorms energy_norms(const Eigen::VectorXd& coefficients, const BackgroundMesh& mesh,
                         const CutDecomposition& decomposition, const DofMap& dofmap, int degree = 4);

/// Nodal interpolation of velocity and pressure into V_h x Q_h; P0
/// pressures take the value at the cell centroid.
Eigen::VectorXd interpolate(const BackgroundMesh& mesh, const DofMap& dofmap, const VectorField& u,
                            const ScalarField& p);

enum class EigenMethod { Dense, Lanczos };

struct SpectrumReport {
  double lambda_max_abs = 0.0;
  double lambda_min_abs_nonzero = 0.0;
  double kappa = 0.0;
  double kappa_scaled = 0.0;  // kappa * h^2
  double h = 0.0;
  int near_zero_count = 0;    // eigenvalues with |lambda| <= 1e-8 max |lambda|
  bool unexpected_kernel_dimension = false;
  int iterations = 0;         // Lanczos steps (both runs), 0 for dense
  bool converged = true;
};

/// Relative threshold identifying kernel eigenvalues.
inline constexpr double kKernelEigenTolerance = 1e-8;

/// Modulus condition number of a symmetric matrix excluding the kernel
/// spanned by `kernel` (pass an empty vector when there is none).
/// Dense: all eigenvalues, the smallest-modulus one dropped when a kernel
/// is given. Lanczos: largest modulus of A and of its kernel-deflated
/// pseudo-inverse, each by fully reorthogonalised Lanczos.
SpectrumReport condition_number(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& kernel,
                                double h, EigenMethod method = EigenMethod::Dense);

/// Largest |eigenvalue| of a symmetric operator restricted to the
/// complement of `deflate` (may be empty).
struct LanczosResult {
  double largest_abs = 0.0;
  int iterations = 0;
  bool converged = false;
};
template <class Op>
LanczosResult lanczos_largest_modulus(const Op& op, int n, const Eigen::VectorXd& deflate, double tol,
                                      int max_iter);

/// Least-squares slope of log(error) against log(h).
double fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace cutstokes

#include "cutstokes/lanczos_impl.hpp"
