#pragma once

#include "cutstokes/common.hpp"
#include "cutstokes/cutgeom.hpp"
#include "cutstokes/mesh.hpp"
#include "cutstokes/spaces.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cutstokes {

/// beta0: pressure jump penalty (P1P0), beta1: pressure-Poisson term (P1P1),
/// beta2: velocity ghost penalty, beta3: pressure ghost penalty (P1P1),
/// gamma: Nitsche penalty.
struct StabilizationParams {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double gamma = 10.0;

  /// Values used for the manufactured-solution convergence study.
  static StabilizationParams defaults(ElementPair pair);
  /// Throws ContractViolation on negative or non-finite entries.
  void validate() const;
};

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;
using TensorField = std::function<Mat3(const Vec3&)>;

/// grad_u(x)(i, j) = d u_i / d x_j.
struct ExactSolution {
  VectorField u;
  TensorField grad_u;
  ScalarField p;
};

struct ProblemData {
  VectorField body_force;
  VectorField boundary_velocity;
  std::optional<ExactSolution> exact;

  static ProblemData homogeneous();
};

/// Which sub-forms to include; everything by default. Used for ablations
/// and for isolating single blocks in tests.
struct FormSelection {
  bool gradient = true;          // (grad u, grad v) over Omega
  bool nitsche = true;           // boundary terms of a_h
  bool divergence = true;        // b_h, both blocks
  bool pressure_stabilization = true;  // c_h (P1P0: merged with j_h0)
  bool velocity_ghost = true;    // i_h
  bool pressure_ghost = true;    // j_h1 (P1P1)
  bool rhs = true;
};

struct AssemblyOptions {
  FormSelection forms;
  int facet_degree = 2;
};

struct StokesSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  Eigen::VectorXd kernel;           // constant pressure mode
  Eigen::VectorXd pressure_mass;    // integral over Omega of each pressure basis function
  double omega_volume = 0.0;
  ElementPair pair = ElementPair::P1P1;
  StabilizationParams params;
  int n_velocity_dofs = 0;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(rhs.size()); }
};

/// Assemble a_h + b_h + b_h^T - c_h + i_h - j_h and L_h. Emits warnings
/// (not errors) for an empty interior, a failed G3 walk, and incompatible
/// boundary data.
StokesSystem assemble(const BackgroundMesh& mesh, const CutDecomposition& decomposition,
                      const DofMap& dofmap, const StabilizationParams& params, const ProblemData& data,
                      const AssemblyOptions& options = {});

/// Unit normal of facet f pointing out of its lower-index cell T+.
Vec3 facet_normal(const BackgroundMesh& mesh, int f);

/// n_F . (grad w|T+ - grad w|T-) at the points of a degree-`degree` rule on
/// facet f. Throws ContractViolation on exterior facets.
std::vector<double> jump_eval(const BackgroundMesh& mesh, int facet, const Vec3& grad_plus,
                              const Vec3& grad_minus, int degree = 2);
/// Same, with an explicitly supplied facet normal.
std::vector<double> jump_eval(const BackgroundMesh& mesh, int facet, const Vec3& normal,
                              const Vec3& grad_plus, const Vec3& grad_minus, int degree);

/// Integral of n . g over the boundary pieces of the decomposition.
double boundary_flux(const CutDecomposition& decomposition, const VectorField& g);

/// max |A_ij - A_ji| / max |A_ij|.
double symmetry_defect(const Eigen::SparseMatrix<double>& matrix);
/// |A k|_inf / |A|_inf, with |A|_inf the maximum absolute row sum.
double kernel_residual(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& kernel);

/// One "row col value" line per stored entry, zero-based, 17 significant digits.
void write_matrix_coo(const Eigen::SparseMatrix<double>& matrix, std::ostream& out);

}  // namespace cutstokes
