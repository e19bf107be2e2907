#include "cutstokes/linsolve.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace cutstokes {

Eigen::VectorXd project_out_kernel(const Eigen::VectorXd& v, const Eigen::VectorXd& kernel) {
  const double kk = kernel.squaredNorm();
  if (!(kk > 0.0)) throw ContractViolation("project_out_kernel: kernel vector is zero");
  return v - (v.dot(kernel) / kk) * kernel;
}

KernelDeflatedSolver::KernelDeflatedSolver(const Eigen::SparseMatrix<double>& matrix,
                                           const Eigen::VectorXd& kernel)
    : kernel_(kernel) {
  const int n = static_cast<int>(matrix.rows());
  if (kernel.size() != n) throw ContractViolation("KernelDeflatedSolver: size mismatch");
  kernel_.cwiseAbs().maxCoeff(&pinned_);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(matrix.nonZeros());
  auto reduced = [this](int i) { return i < pinned_ ? i : i - 1; };
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) {
      if (it.row() == pinned_ || it.col() == pinned_) continue;
      triplets.emplace_back(reduced(static_cast<int>(it.row())), reduced(static_cast<int>(it.col())), it.value());
    }
  }
  Eigen::SparseMatrix<double> a(n - 1, n - 1);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  lu_->compute(a);
  ok_ = lu_->info() == Eigen::Success;
  if (!ok_) message_ = "sparse LU failed: " + lu_->lastErrorMessage();
}

Eigen::VectorXd KernelDeflatedSolver::solve(const Eigen::VectorXd& rhs) const {
  const int n = static_cast<int>(rhs.size());
  Eigen::VectorXd b(n - 1);
  b.head(pinned_) = rhs.head(pinned_);
  b.tail(n - 1 - pinned_) = rhs.tail(n - 1 - pinned_);
  const Eigen::VectorXd y = lu_->solve(b);
  Eigen::VectorXd x(n);
  x.head(pinned_) = y.head(pinned_);
  x[pinned_] = 0.0;
  x.tail(n - 1 - pinned_) = y.tail(n - 1 - pinned_);
  return project_out_kernel(x, kernel_);
}

MinresResult minres_deflated(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& kernel, double tol, int max_iter) {
  const int n = static_cast<int>(rhs.size());
  // Scaled system D^{-1/2} A D^{-1/2} y = D^{-1/2} b with kernel D^{1/2} k.
  Eigen::VectorXd dinv_sqrt(n);
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(matrix.coeff(i, i));
    dinv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  const Eigen::VectorXd khat = kernel.cwiseQuotient(dinv_sqrt);
  auto apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = dinv_sqrt.cwiseProduct(matrix * dinv_sqrt.cwiseProduct(v));
    return project_out_kernel(out, khat);
  };
  const Eigen::VectorXd b = project_out_kernel(dinv_sqrt.cwiseProduct(rhs), khat);

  MinresResult result;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  const double beta1 = b.norm();
  if (beta1 == 0.0) {
    result.x = y;
    result.converged = true;
    return result;
  }

  // Paige-Saunders recurrences.
  Eigen::VectorXd r1 = b;
  Eigen::VectorXd r2 = b;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v(n);
  Eigen::VectorXd z = b;
  double oldb = 0.0;
  double beta = beta1;
  double dbar = 0.0;
  double epsln = 0.0;
  double phibar = beta1;
  double cs = -1.0;
  double sn = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();

  int it = 0;
  while (it < max_iter) {
    ++it;
    v = z / beta;
    z = apply(v);
    if (it >= 2) z -= (beta / oldb) * r1;
    const double alpha = v.dot(z);
    z -= (alpha / beta) * r2;
    r1 = r2;
    r2 = z;
    oldb = beta;
    beta = r2.norm();

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alpha;
    const double gbar = sn * dbar - cs * alpha;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    y += phi * w;

    if (phibar <= tol * beta1) {
      // Confirm with the true residual of the scaled system.
      const double true_res = (b - apply(y)).norm();
      if (true_res <= 10.0 * tol * beta1 || beta <= eps * beta1) {
        result.converged = true;
        break;
      }
    }
    if (beta <= eps * beta1) {
      result.converged = true;
      break;
    }
  }
  result.iterations = it;
  result.x = project_out_kernel(dinv_sqrt.cwiseProduct(y), kernel);
  return result;
}

double normalize_pressure(const StokesSystem& system, Eigen::VectorXd& solution) {
  const int np = static_cast<int>(system.pressure_mass.size());
  auto pressure = solution.tail(np);
  const double mean = system.omega_volume > 0.0 ? system.pressure_mass.dot(pressure) / system.omega_volume : 0.0;
  pressure.array() -= mean;
  return mean;
}

SolveReport solve(const StokesSystem& system, const SolveOptions& options) {
  SolveReport report;
  const int n = system.size();
  report.solution = Eigen::VectorXd::Zero(n);
  if (!(system.params.gamma > 0.0)) {
    report.message = "Nitsche penalty gamma must be positive for a solve";
    return report;
  }
  const Eigen::VectorXd b = project_out_kernel(system.rhs, system.kernel);

  if (options.method == SolverMethod::Direct) {
    const KernelDeflatedSolver solver(system.matrix, system.kernel);
    if (!solver.ok()) {
      report.message = solver.message();
      return report;
    }
    report.solution = solver.solve(b);
  } else {
    auto result = minres_deflated(system.matrix, b, system.kernel, options.tol, options.max_iter);
    report.solution = std::move(result.x);
    report.iterations = result.iterations;
    if (!result.converged) report.message = "MINRES iteration budget exhausted";
  }

  const Eigen::VectorXd residual = system.matrix * report.solution - b;
  report.residual_norm = residual.norm();
  const double bnorm = b.norm();
  report.relative_residual = bnorm > 0.0 ? report.residual_norm / bnorm : report.residual_norm;
  if (!std::isfinite(report.residual_norm)) {
    report.converged = false;
    report.message = "non-finite solution";
  } else if (options.method == SolverMethod::Direct) {
    // Backward error of the LU solve is far below any tolerance a caller
    // would pass; a large residual means a singular reduced matrix.
    report.converged = report.relative_residual <= std::max(options.tol, 1e-8);
    if (!report.converged) report.message = "direct solve residual too large";
  } else {
    // Convergence is judged on the Jacobi-scaled residual MINRES minimises.
    report.converged = report.message.empty();
  }
  report.pressure_mean = normalize_pressure(system, report.solution);
  return report;
}

}  // namespace cutstokes
