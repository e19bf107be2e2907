#include "cutstokes/forms.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

namespace cutstokes {

StabilizationParams StabilizationParams::defaults(ElementPair pair) {
  StabilizationParams p;
  if (pair == ElementPair::P1P1) {
    p.beta1 = 0.2;
    p.beta2 = 1.0;
    p.beta3 = 0.05;
  } else {
    p.beta0 = 0.25;
    p.beta2 = 0.1;
  }
  p.gamma = 10.0;
  return p;
}

void StabilizationParams::validate() const {
  for (double v : {beta0, beta1, beta2, beta3, gamma}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ContractViolation("stabilization parameters must be finite and non-negative");
    }
  }
}

ProblemData ProblemData::homogeneous() {
  ProblemData d;
  d.body_force = [](const Vec3&) { return Vec3::Zero().eval(); };
  d.boundary_velocity = [](const Vec3&) { return Vec3::Zero().eval(); };
  return d;
}

Vec3 facet_normal(const BackgroundMesh& mesh, int f) {
  const Triangle tri = mesh.facet_vertices(f);
  Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
  const auto t = mesh.cell_vertices(mesh.facet_cells[f][0]);
  const Vec3 cell_centre = 0.25 * (t[0] + t[1] + t[2] + t[3]);
  if (n.dot(tri[0] - cell_centre) < 0.0) n = -n;
  return n;
}

std::vector<double> jump_eval(const BackgroundMesh& mesh, int facet, const Vec3& normal,
                              const Vec3& grad_plus, const Vec3& grad_minus, int degree) {
  if (!mesh.is_interior_facet(facet)) {
    throw ContractViolation("jump_eval: facet is exterior");
  }
  const QuadratureRule rule = triangle_rule(mesh.facet_vertices(facet), degree);
  const double jump = normal.dot(grad_plus - grad_minus);
  return std::vector<double>(rule.size(), jump);
}

std::vector<double> jump_eval(const BackgroundMesh& mesh, int facet, const Vec3& grad_plus,
                              const Vec3& grad_minus, int degree) {
  if (!mesh.is_interior_facet(facet)) {
    throw ContractViolation("jump_eval: facet is exterior");
  }
  return jump_eval(mesh, facet, facet_normal(mesh, facet), grad_plus, grad_minus, degree);
}

double boundary_flux(const CutDecomposition& decomposition, const VectorField& g) {
  double flux = 0.0;
  for (int c : decomposition.active_cells) {
    for (const auto& rule : decomposition.surface_rules[c]) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        flux += rule.weights[q] * rule.normal->dot(g(rule.points[q]));
      }
    }
  }
  return flux;
}

namespace {

struct Entry {
  int row;
  int col;
  double value;
};

class TripletBuffer {
 public:
  void add(int row, int col, double value) {
    if (value != 0.0) entries_.push_back({row, col, value});
  }
  void add_symmetric(int row, int col, double value) {
    add(row, col, value);
    add(col, row, value);
  }

  // Stable sort keeps insertion order within duplicates so the summation
  // order, and hence the matrix, is reproducible.
  Eigen::SparseMatrix<double> compress(int n) {
    std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<Eigen::Triplet<double>> unique;
    for (std::size_t i = 0; i < entries_.size();) {
      double sum = 0.0;
      std::size_t j = i;
      for (; j < entries_.size() && entries_[j].row == entries_[i].row && entries_[j].col == entries_[i].col;
           ++j) {
        sum += entries_[j].value;
      }
      unique.emplace_back(entries_[i].row, entries_[i].col, sum);
      i = j;
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(unique.begin(), unique.end());
    m.makeCompressed();
    return m;
  }

 private:
  std::vector<Entry> entries_;
};

// Coefficients of [n . grad phi_v] across a facet, for each vertex v of
// the two-cell patch.
std::vector<std::pair<int, double>> normal_jump_coefficients(const BackgroundMesh& mesh, int f,
                                                             const Vec3& normal) {
  std::vector<std::pair<int, double>> coef;
  auto accumulate = [&](int cell, double sign) {
    const TetBasis basis(mesh.cell_vertices(cell));
    for (int a = 0; a < 4; ++a) {
      const int v = mesh.cells[cell][a];
      const double value = sign * normal.dot(basis.gradients()[a]);
      auto it = std::find_if(coef.begin(), coef.end(), [&](const auto& e) { return e.first == v; });
      if (it == coef.end()) {
        coef.emplace_back(v, value);
      } else {
        it->second += value;
      }
    }
  };
  accumulate(mesh.facet_cells[f][0], 1.0);
  accumulate(mesh.facet_cells[f][1], -1.0);
  return coef;
}

}  // namespace

StokesSystem assemble(const BackgroundMesh& mesh, const CutDecomposition& decomposition,
                      const DofMap& dofmap, const StabilizationParams& params, const ProblemData& data,
                      const AssemblyOptions& options) {
  params.validate();
  const FormSelection& forms = options.forms;
  const bool p1p1 = dofmap.pair == ElementPair::P1P1;
  const int n = dofmap.size();
  const int np = dofmap.pressure_dofs_per_cell;

  StokesSystem sys;
  sys.pair = dofmap.pair;
  sys.params = params;
  sys.n_velocity_dofs = dofmap.n_velocity_dofs;
  sys.rhs = Eigen::VectorXd::Zero(n);
  sys.kernel = dofmap.pressure_kernel_vector;
  sys.pressure_mass = Eigen::VectorXd::Zero(dofmap.n_pressure_dofs);

  if (std::none_of(decomposition.classification.begin(), decomposition.classification.end(),
                   [](CellKind k) { return k == CellKind::Inside; })) {
    sys.warnings.emplace_back("no uncut cell inside the domain");
  }
  if (!decomposition.g3.satisfied) {
    sys.warnings.emplace_back("cut cells not connected to an uncut cell (G3)");
  }
  if (data.boundary_velocity) {
    const double flux = boundary_flux(decomposition, data.boundary_velocity);
    if (std::abs(flux) > 1e-10 * std::max(decomposition.total_surface_area(), 1.0)) {
      sys.warnings.emplace_back("boundary data has non-zero net flux");
    }
  }

  TripletBuffer buffer;

  for (std::size_t k = 0; k < dofmap.active_cells.size(); ++k) {
    const int c = dofmap.active_cells[k];
    const TetBasis basis(mesh.cell_vertices(c));
    const auto& grad = basis.gradients();
    const auto& vd = dofmap.cell_to_velocity_dofs[k];
    const auto& pd = dofmap.cell_to_pressure_dofs[k];
    const double h = mesh.cell_diameter[c];

    // Volume moments: measure, int lambda_a.
    const QuadratureRule& vol = decomposition.volume_rules[c];
    double measure = 0.0;
    std::array<double, 4> lambda_int = {0, 0, 0, 0};
    for (std::size_t q = 0; q < vol.size(); ++q) {
      const auto lam = basis.values(vol.points[q]);
      measure += vol.weights[q];
      for (int a = 0; a < 4; ++a) lambda_int[a] += vol.weights[q] * lam[a];
    }
    sys.omega_volume += measure;
    for (int m = 0; m < np; ++m) {
      sys.pressure_mass[pd[m] - dofmap.n_velocity_dofs] += p1p1 ? lambda_int[m] : measure;
    }

    if (forms.gradient) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const double val = measure * grad[a].dot(grad[b]);
          for (int i = 0; i < 3; ++i) buffer.add(vd[3 * a + i], vd[3 * b + i], val);
        }
      }
    }
    if (forms.divergence) {
      for (int m = 0; m < np; ++m) {
        const double psi_int = p1p1 ? lambda_int[m] : measure;
        for (int a = 0; a < 4; ++a) {
          for (int i = 0; i < 3; ++i) buffer.add_symmetric(pd[m], vd[3 * a + i], -grad[a][i] * psi_int);
        }
      }
    }
    if (forms.pressure_stabilization && p1p1) {
      const double scale = params.beta1 * h * h * measure;
      for (int m = 0; m < 4; ++m) {
        for (int l = 0; l < 4; ++l) buffer.add(pd[m], pd[l], -scale * grad[m].dot(grad[l]));
      }
    }
    if (forms.rhs && data.body_force) {
      for (std::size_t q = 0; q < vol.size(); ++q) {
        const Vec3 f = data.body_force(vol.points[q]);
        const auto lam = basis.values(vol.points[q]);
        const double w = vol.weights[q];
        for (int a = 0; a < 4; ++a) {
          for (int i = 0; i < 3; ++i) sys.rhs[vd[3 * a + i]] += w * f[i] * lam[a];
        }
        if (p1p1) {
          const double scale = params.beta1 * h * h;
          for (int m = 0; m < 4; ++m) sys.rhs[pd[m]] -= scale * w * f.dot(grad[m]);
        }
      }
    }

    // Boundary pieces Gamma cap T.
    for (const QuadratureRule& surf : decomposition.surface_rules[c]) {
      const Vec3& normal = *surf.normal;
      Eigen::Matrix4d mass = Eigen::Matrix4d::Zero();
      std::array<double, 4> trace = {0, 0, 0, 0};
      for (std::size_t q = 0; q < surf.size(); ++q) {
        const auto lam = basis.values(surf.points[q]);
        const double w = surf.weights[q];
        for (int a = 0; a < 4; ++a) {
          trace[a] += w * lam[a];
          for (int b = 0; b < 4; ++b) mass(a, b) += w * lam[a] * lam[b];
        }
      }
      std::array<double, 4> dn;
      for (int a = 0; a < 4; ++a) dn[a] = normal.dot(grad[a]);

      if (forms.nitsche) {
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            const double val = -dn[b] * trace[a] - dn[a] * trace[b] + params.gamma / h * mass(a, b);
            for (int i = 0; i < 3; ++i) buffer.add(vd[3 * a + i], vd[3 * b + i], val);
          }
        }
      }
      if (forms.divergence) {
        for (int m = 0; m < np; ++m) {
          for (int a = 0; a < 4; ++a) {
            const double moment = p1p1 ? mass(a, m) : trace[a];
            for (int i = 0; i < 3; ++i) buffer.add_symmetric(pd[m], vd[3 * a + i], normal[i] * moment);
          }
        }
      }
      if (forms.rhs && data.boundary_velocity) {
        for (std::size_t q = 0; q < surf.size(); ++q) {
          const Vec3 g = data.boundary_velocity(surf.points[q]);
          const auto lam = basis.values(surf.points[q]);
          const double w = surf.weights[q];
          for (int a = 0; a < 4; ++a) {
            const double test = params.gamma / h * lam[a] - dn[a];
            for (int i = 0; i < 3; ++i) sys.rhs[vd[3 * a + i]] += w * g[i] * test;
          }
          const double gn = g.dot(normal);
          for (int m = 0; m < np; ++m) sys.rhs[pd[m]] += w * gn * (p1p1 ? lam[m] : 1.0);
        }
      }
    }
  }

  // P1P0 pressure jumps: c_h on the cut skeleton plus j_h0 on F \ Omega
  // add up to full-facet integrals over every interior facet of the
  // active mesh.
  if (forms.pressure_stabilization && !p1p1) {
    for (int f = 0; f < mesh.num_facets(); ++f) {
      if (!decomposition.is_active_interior_facet(mesh, f)) continue;
      const double area = triangle_rule(mesh.facet_vertices(f), options.facet_degree).total_weight();
      const double val = params.beta0 * mesh.facet_diameter[f] * area;
      const int p_plus = dofmap.cell_to_pressure_dofs[dofmap.cell_index[mesh.facet_cells[f][0]]][0];
      const int p_minus = dofmap.cell_to_pressure_dofs[dofmap.cell_index[mesh.facet_cells[f][1]]][0];
      buffer.add(p_plus, p_plus, -val);
      buffer.add(p_minus, p_minus, -val);
      buffer.add_symmetric(p_plus, p_minus, val);
    }
  }

  // Ghost penalties on the boundary zone facets.
  const bool velocity_ghost = forms.velocity_ghost && params.beta2 > 0.0;
  const bool pressure_ghost = forms.pressure_ghost && p1p1 && params.beta3 > 0.0;
  if (velocity_ghost || pressure_ghost) {
    for (int f : decomposition.boundary_zone_facets) {
      const Vec3 normal = facet_normal(mesh, f);
      const auto coef = normal_jump_coefficients(mesh, f, normal);
      const QuadratureRule rule = triangle_rule(mesh.facet_vertices(f), options.facet_degree);
      const double area = rule.total_weight();
      const double hf = mesh.facet_diameter[f];
      for (const auto& [va, ca] : coef) {
        const int ia = dofmap.vertex_index[va];
        for (const auto& [vb, cb] : coef) {
          const int ib = dofmap.vertex_index[vb];
          if (velocity_ghost) {
            const double val = params.beta2 * hf * area * ca * cb;
            for (int i = 0; i < 3; ++i) buffer.add(dofmap.velocity_dof(ia, i), dofmap.velocity_dof(ib, i), val);
          }
          if (pressure_ghost) {
            const double val = params.beta3 * hf * hf * hf * area * ca * cb;
            buffer.add(dofmap.n_velocity_dofs + ia, dofmap.n_velocity_dofs + ib, -val);
          }
        }
      }
    }
  }

  sys.matrix = buffer.compress(n);
  return sys;
}

double symmetry_defect(const Eigen::SparseMatrix<double>& matrix) {
  const Eigen::SparseMatrix<double> diff = matrix - Eigen::SparseMatrix<double>(matrix.transpose());
  double max_entry = 0.0;
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) {
      max_entry = std::max(max_entry, std::abs(it.value()));
    }
  }
  double max_diff = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
      max_diff = std::max(max_diff, std::abs(it.value()));
    }
  }
  return max_entry > 0.0 ? max_diff / max_entry : 0.0;
}

double kernel_residual(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& kernel) {
  const Eigen::VectorXd ak = matrix * kernel;
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(matrix.rows());
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) {
      row_sums[it.row()] += std::abs(it.value());
    }
  }
  const double norm = row_sums.maxCoeff();
  return norm > 0.0 ? ak.cwiseAbs().maxCoeff() / norm : 0.0;
}

void write_matrix_coo(const Eigen::SparseMatrix<double>& matrix, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace cutstokes
