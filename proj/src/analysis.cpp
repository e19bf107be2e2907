#include "cutstokes/analysis.hpp"

#include "cutstokes/linsolve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <vector>

namespace cutstokes {

namespace {

struct LocalField {
  std::array<Vec3, 4> velocity;   // nodal velocity per local vertex
  std::array<double, 4> pressure; // nodal (P1) or repeated constant (P0)
};

LocalField gather(const Eigen::VectorXd& x, const DofMap& dofmap, int active) {
  LocalField f;
  const auto& vd = dofmap.cell_to_velocity_dofs[active];
  const auto& pd = dofmap.cell_to_pressure_dofs[active];
  for (int a = 0; a < 4; ++a) {
    f.velocity[a] = Vec3(x[vd[3 * a]], x[vd[3 * a + 1]], x[vd[3 * a + 2]]);
    f.pressure[a] = dofmap.pair == ElementPair::P1P1 ? x[pd[a]] : x[pd[0]];
  }
  return f;
}

}  // namespace

ErrorReport compute_errors(const Eigen::VectorXd& solution, const ExactSolution& exact,
                           const BackgroundMesh& mesh, const CutDecomposition& decomposition,
                           const DofMap& dofmap, ErrorDomain domain, int degree) {
  double u_l2 = 0.0;
  double u_grad = 0.0;
  double p_l2 = 0.0;
  double h_max = 0.0;
  for (std::size_t k = 0; k < dofmap.active_cells.size(); ++k) {
    const int c = dofmap.active_cells[k];
    h_max = std::max(h_max, mesh.cell_diameter[c]);
    const Tetrahedron tet = mesh.cell_vertices(c);
    const TetBasis basis(tet);
    const auto& grad = basis.gradients();
    const LocalField local = gather(solution, dofmap, static_cast<int>(k));
    Mat3 grad_uh = Mat3::Zero();
    for (int a = 0; a < 4; ++a) grad_uh += local.velocity[a] * grad[a].transpose();

    const QuadratureRule rule =
        domain == ErrorDomain::Fictitious ? tetrahedron_rule(tet, degree) : decomposition.volume_rules[c];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& x = rule.points[q];
      const auto lam = basis.values(x);
      Vec3 uh = Vec3::Zero();
      double ph = 0.0;
      for (int a = 0; a < 4; ++a) {
        uh += lam[a] * local.velocity[a];
        ph += (dofmap.pair == ElementPair::P1P1 ? lam[a] : 0.25) * local.pressure[a];
      }
      const double w = rule.weights[q];
      u_l2 += w * (exact.u(x) - uh).squaredNorm();
      u_grad += w * (exact.grad_u(x) - grad_uh).squaredNorm();
      const double dp = exact.p(x) - ph;
      p_l2 += w * dp * dp;
    }
  }
  ErrorReport r;
  r.h_max = h_max;
  r.velocity_L2_error = std::sqrt(u_l2);
  r.velocity_gradient_error = std::sqrt(u_grad);
  r.velocity_H1_error = std::sqrt(u_l2 + u_grad);
  r.pressure_L2_error = std::sqrt(p_l2);
  return r;
}

EnergyNorms energy_norms(const Eigen::VectorXd& coefficients, const BackgroundMesh& mesh,
                         const CutDecomposition& decomposition, const DofMap& dofmap, int degree) {
  EnergyNorms norms;
  for (std::size_t k = 0; k < dofmap.active_cells.size(); ++k) {
    const int c = dofmap.active_cells[k];
    const Tetrahedron tet = mesh.cell_vertices(c);
    const TetBasis basis(tet);
    const LocalField local = gather(coefficients, dofmap, static_cast<int>(k));
    Mat3 grad_v = Mat3::Zero();
    for (int a = 0; a < 4; ++a) grad_v += local.velocity[a] * basis.gradients()[a].transpose();
    norms.velocity_gradient_sq += tetrahedron_volume(tet) * grad_v.squaredNorm();

    const QuadratureRule rule = tetrahedron_rule(tet, degree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto lam = basis.values(rule.points[q]);
      double p = 0.0;
      for (int a = 0; a < 4; ++a) p += (dofmap.pair == ElementPair::P1P1 ? lam[a] : 0.25) * local.pressure[a];
      norms.pressure_sq += rule.weights[q] * p * p;
    }
    const double h = mesh.cell_diameter[c];
    for (const auto& surf : decomposition.surface_rules[c]) {
      for (std::size_t q = 0; q < surf.size(); ++q) {
        const auto lam = basis.values(surf.points[q]);
        Vec3 v = Vec3::Zero();
        for (int a = 0; a < 4; ++a) v += lam[a] * local.velocity[a];
        norms.velocity_boundary_sq += surf.weights[q] * v.squaredNorm() / h;
      }
    }
  }
  return norms;
}

Eigen::VectorXd interpolate(const BackgroundMesh& mesh, const DofMap& dofmap, const VectorField& u,
                            const ScalarField& p) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dofmap.size());
  for (std::size_t a = 0; a < dofmap.active_vertices.size(); ++a) {
    const Vec3& pos = mesh.vertices[dofmap.active_vertices[a]];
    const Vec3 value = u ? u(pos) : Vec3::Zero();
    for (int i = 0; i < 3; ++i) x[dofmap.velocity_dof(static_cast<int>(a), i)] = value[i];
    if (dofmap.pair == ElementPair::P1P1 && p) x[dofmap.n_velocity_dofs + static_cast<int>(a)] = p(pos);
  }
  if (dofmap.pair == ElementPair::P1P0 && p) {
    for (std::size_t k = 0; k < dofmap.active_cells.size(); ++k) {
      const auto t = mesh.cell_vertices(dofmap.active_cells[k]);
      x[dofmap.cell_to_pressure_dofs[k][0]] = p(0.25 * (t[0] + t[1] + t[2] + t[3]));
    }
  }
  return x;
}

SpectrumReport condition_number(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& kernel,
                                double h, EigenMethod method) {
  const int n = static_cast<int>(matrix.rows());
  const bool has_kernel = kernel.size() == n && kernel.squaredNorm() > 0.0;
  SpectrumReport report;
  report.h = h;

  if (method == EigenMethod::Dense) {
    const Eigen::MatrixXd dense(matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      report.converged = false;
      return report;
    }
    std::vector<double> moduli(n);
    for (int i = 0; i < n; ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
    std::sort(moduli.begin(), moduli.end());
    report.lambda_max_abs = moduli.back();
    report.near_zero_count = static_cast<int>(std::count_if(moduli.begin(), moduli.end(), [&](double m) {
      return m <= kKernelEigenTolerance * report.lambda_max_abs;
    }));
    const int skip = has_kernel ? 1 : 0;
    report.lambda_min_abs_nonzero = moduli.at(skip);
  } else {
    const int max_iter = std::min(n, 3000);
    constexpr double tol = 1e-9;
    auto forward = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = matrix * v; };
    const LanczosResult top = lanczos_largest_modulus(forward, n, has_kernel ? kernel : Eigen::VectorXd(),
                                                      tol, max_iter);
    LanczosResult bottom;
    if (has_kernel) {
      const KernelDeflatedSolver solver(matrix, kernel);
      if (!solver.ok()) {
        report.converged = false;
        return report;
      }
      auto inverse = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        out = solver.solve(project_out_kernel(v, kernel));
      };
      bottom = lanczos_largest_modulus(inverse, n, kernel, tol, max_iter);
    } else {
      Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
      Eigen::SparseMatrix<double> a = matrix;
      a.makeCompressed();
      lu.compute(a);
      if (lu.info() != Eigen::Success) {
        report.converged = false;
        return report;
      }
      auto inverse = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = lu.solve(v); };
      bottom = lanczos_largest_modulus(inverse, n, Eigen::VectorXd(), tol, max_iter);
    }
    report.lambda_max_abs = top.largest_abs;
    report.lambda_min_abs_nonzero = bottom.largest_abs > 0.0 ? 1.0 / bottom.largest_abs : 0.0;
    report.iterations = top.iterations + bottom.iterations;
    report.converged = top.converged && bottom.converged;
    report.near_zero_count = (has_kernel ? 1 : 0) +
                             (report.lambda_min_abs_nonzero <= kKernelEigenTolerance * report.lambda_max_abs ? 1 : 0);
  }
  report.unexpected_kernel_dimension = report.near_zero_count != (has_kernel ? 1 : 0);
  report.kappa = report.lambda_min_abs_nonzero > 0.0 ? report.lambda_max_abs / report.lambda_min_abs_nonzero
                                                      : std::numeric_limits<double>::infinity();
  report.kappa_scaled = report.kappa * h * h;
  return report;
}

double fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ContractViolation("fit_rate: need at least two points");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [h, e] : points) {
    if (!(h > 0.0) || !(e > 0.0)) throw ContractViolation("fit_rate: values must be positive");
    sx += std::log(h);
    sy += std::log(e);
  }
  const double m = static_cast<double>(points.size());
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [h, e] : points) {
    const double dx = std::log(h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (sxx == 0.0) throw ContractViolation("fit_rate: all h values coincide");
  return sxy / sxx;
}

}  // namespace cutstokes
