#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "steklov/linalg.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// Symmetric sparse matrix; compressed row storage of the lower triangle
/// (diagonal included), column indices sorted within each row.
class SparseSymmetricMatrix {
 public:
  SparseSymmetricMatrix() = default;

  struct Triplet {
    int row, col;
    double value;
  };
  static SparseSymmetricMatrix from_triplets(int dimension, std::vector<Triplet> entries);

  int dimension() const { return n_; }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }

  /// y = A x using the symmetric structure.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  double value_at(int i, int j) const;
  std::vector<double> diagonal() const;
  /// max over off-diagonal stored entries (0 if none).
  double max_offdiagonal() const;
  DenseMatrix to_dense() const;

 private:
  int n_ = 0;
  std::vector<int> row_offsets_;
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// Discrete L2(Gamma, m_d) inner product on the boundary trace space.
struct BoundaryMassMatrix {
  std::vector<int> gamma_dofs;  ///< mesh vertex indices, ordered along the boundary
  SparseSymmetricMatrix matrix;

  int size() const { return static_cast<int>(gamma_dofs.size()); }
  double total_mass() const;
  std::vector<double> multiply(std::span<const double> x) const { return matrix.multiply(x); }
  DenseMatrix to_dense() const { return matrix.to_dense(); }
};

/// Elimination of Dirichlet (S-tagged) rows/columns.
struct DirichletReduction {
  SparseSymmetricMatrix k_ff;
  std::vector<int> free_to_mesh;  ///< free dof -> mesh vertex
  std::vector<int> mesh_to_free;  ///< mesh vertex -> free dof or -1
};

struct RobinSolution {
  std::vector<double> u;  ///< nodal values over free dofs (S dofs are exactly zero)
  double lambda = 0.0;
  std::vector<double> psi;             ///< nodal data on Gamma (gamma_dofs order)
  std::vector<double> trace_on_gamma;  ///< trace of u on Gamma (gamma_dofs order)
  double total_flux = 0.0;             ///< integral over Gamma of (psi - lambda Tr u) dm
  std::vector<int> gamma_dofs;
  std::vector<double> u_mesh;  ///< nodal values over all mesh vertices (zero on S)
};

// -- assembly ----------------------------------------------------------------

/// Exact P1 stiffness matrix; symmetric positive semidefinite with the
/// constants in its kernel before any Dirichlet constraint.
SparseSymmetricMatrix assemble_stiffness(const Mesh& mesh);

/// Boundary mass matrix over the named boundary: per boundary mesh edge the
/// local block is m_e/6 * [[2,1],[1,2]] with m_e the edge's d-mass share.
BoundaryMassMatrix assemble_boundary_mass(const Mesh& mesh, BoundaryName which);

/// Domain (bulk) mass matrix: per triangle area/12 * [[2,1,1],[1,2,1],[1,1,2]].
SparseSymmetricMatrix assemble_domain_mass(const Mesh& mesh);

/// Removes rows/columns of S-tagged vertices. On meshes without S dofs the
/// mapping is the identity and the matrix is returned unchanged.
DirichletReduction apply_dirichlet(const SparseSymmetricMatrix& k, const Mesh& mesh);

// -- solvers -----------------------------------------------------------------

/// Conjugate gradients with Jacobi (diagonal) preconditioning. Deterministic
/// for fixed inputs. Throws SolverError with the residual history if the
/// relative residual does not reach tol within max_iter (default 20*n).
std::vector<double> solve_spd(const SparseSymmetricMatrix& k, std::span<const double> b,
                              double tol = 1e-12, int max_iter = -1);

/// Returns the number of CG iterations of the last solve_spd call on this
/// thread (test hook; the solver itself is pure).
int last_cg_iterations();

/// Robin problem: (K_ff + lambda R M_Gamma R^T) u = R M_Gamma psi, with
/// homogeneous Dirichlet data on S for truncated meshes. Interior meshes
/// require lambda > 0 (the pure-Neumann problem is singular).
RobinSolution robin_solve(const Mesh& mesh, double lambda, std::span<const double> psi_gamma);
RobinSolution robin_solve(const Mesh& mesh, double lambda,
                          const std::function<double(Point2)>& psi);

/// Discrete-harmonic extension of Gamma data: solves K_II u_I = -K_IGamma g
/// (with S dofs fixed at zero on truncated meshes) and returns nodal values
/// over all mesh vertices.
std::vector<double> harmonic_extend(const Mesh& mesh, std::span<const double> gamma_values);

/// Green identity residual |v^T K u - (Tr v)^T g| with g = (K u) restricted to
/// the Gamma dofs; u must be discrete-harmonic (checked).
double discrete_green_check(const Mesh& mesh, std::span<const double> u_mesh,
                            std::span<const double> v_mesh);

/// Gamma dofs in boundary order (sorted by polygon edge, then parameter).
std::vector<int> gamma_dof_order(const Mesh& mesh, BoundaryName which = BoundaryName::Gamma);

// -- nodal vector file format --------------------------------------------------

/// CSV `vertex_index,value` with 17-significant-digit decimals.
std::string write_nodal_csv(std::span<const double> values);
std::vector<double> read_nodal_csv(const std::string& text);

}  // namespace steklov
