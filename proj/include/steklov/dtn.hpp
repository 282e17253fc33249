#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steklov/fem.hpp"
#include "steklov/linalg.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// Discrete Poincare-Steklov (Dirichlet-to-Neumann) operator on Gamma,
/// realized as the Schur complement A = K_GG - K_GI K_II^-1 K_IG over the
/// Gamma trace dofs. Symmetric; positive semidefinite with the constants in
/// its kernel for interior domains, strictly positive definite for truncated
/// ones.
struct DtnMatrix {
  DenseMatrix a;
  std::vector<int> gamma_dofs;
  DomainKind domain_kind = DomainKind::Interior;
  std::string domain_note;   ///< free-form descriptor (outer boundary, radius, ...)
  double asymmetry_defect = 0.0;  ///< max |A - A^T| before symmetrization

  int size() const { return a.rows(); }
};

/// Steklov eigenpairs (mu_k, V_k), ascending, M-orthonormal in the discrete
/// L2(Gamma, m_d) inner product.
struct SteklovSpectrum {
  std::vector<double> eigenvalues;
  DenseMatrix eigenvectors;            ///< columns over Gamma dofs
  std::vector<double> residuals;       ///< ||A V_k - mu_k M V_k||_2 per pair
};

/// Builds the Schur-complement DtN matrix. For truncated meshes the S dofs
/// are eliminated first. Interior-block solves run at machine precision via
/// a sparse Cholesky-type factorization; `threads` > 1 distributes the
/// column solves. Results are identical for any thread count.
DtnMatrix schur_dtn(const Mesh& mesh, int threads = 1);

/// Generalized symmetric eigensolve A V = M V diag(mu) by Cholesky reduction
/// and cyclic Jacobi. If k_max is given, only the lowest k_max pairs are kept
/// (the solve itself is dense and complete).
SteklovSpectrum steklov_spectrum(const DtnMatrix& a, const BoundaryMassMatrix& m,
                                 std::optional<int> k_max = std::nullopt);

/// Solves (lambda M + A) phi = M psi. Equals the Gamma trace of
/// robin_solve(mesh, lambda, psi) up to solver tolerances: the two paths
/// realize the same operator.
std::vector<double> resolvent_apply(const DtnMatrix& a, const BoundaryMassMatrix& m,
                                    double lambda, std::span<const double> psi);

/// M-operator norm of A1^-1 - A2^-1 (lambda = 0) or of the resolvent
/// difference (lambda M + A1)^-1 - (lambda M + A2)^-1 at lambda > 0,
/// computed as max |eig(L^T X L)| with M = L L^T. Interior operators at
/// lambda = 0 are inverted on the M-orthogonal complement of the constants.
double operator_distance(const DtnMatrix& a1, const DtnMatrix& a2, const BoundaryMassMatrix& m,
                         double lambda = 0.0);

/// Sharp Poincare constant of a truncated mesh: C = 1/sqrt(lambda_min) with
/// lambda_min the smallest eigenvalue of K_ff v = lambda M_Omega v, by
/// inverse power iteration.
double poincare_constant(const Mesh& mesh);

/// Spectrum CSV: `k,mu,residual`, eigenvalues ascending.
std::string write_spectrum_csv(const SteklovSpectrum& s);
/// Row-major eigenvector dump, one row per Gamma dof, 17-digit decimals.
std::string write_eigenvector_text(const SteklovSpectrum& s);

}  // namespace steklov
