#pragma once

#include <string>
#include <vector>

#include "steklov/dtn.hpp"
#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// Spectral decomposition of the total flux across Gamma for psi = lambda 1:
/// Phi = sum_k lambda mu_k c_k^2 / (lambda + mu_k), c_k = (1_Gamma, V_k)_M.
struct FluxReport {
  double lambda = 0.0;
  double phi_direct = 0.0;
  double phi_spectral_full = 0.0;
  std::vector<double> phi_partial;  ///< running partial sums over k
  std::vector<std::pair<double, double>> coefficients;  ///< (mu_k, c_k)
  bool complete_spectrum = true;  ///< false when k_max < n_Gamma (identity becomes a bound)
};

/// Direct flux through Gamma: Phi = 1^T M_Gamma (psi - lambda Tr u) with u
/// the Robin solution.
double flux_direct(const Mesh& mesh, double lambda, std::span<const double> psi_gamma);

/// Spectral flux for psi = lambda 1_Gamma. phi_direct is computed alongside
/// for the exactness check; with the complete spectrum the two agree to
/// machine-level relative accuracy.
FluxReport flux_spectral(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m,
                         double lambda, double phi_direct);

/// Generalized spectral flux for arbitrary psi:
/// Phi = sum_k c_k^psi c_k^1 mu_k / (lambda + mu_k).
double flux_spectral_general(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m,
                             double lambda, std::span<const double> psi);

/// Evaluates each truncated solution at the probe points by barycentric
/// interpolation (walking search for the containing triangle). Rows are
/// probes, columns follow the mesh list.
std::vector<std::vector<double>> domain_monotonicity_probe(
    const std::vector<Mesh>& truncation_meshes, double lambda, double psi_constant,
    const std::vector<Point2>& probes);

/// Evaluates a nodal field at a point by barycentric interpolation.
double interpolate_at(const Mesh& mesh, std::span<const double> nodal, Point2 p);

/// Tail-decay diagnostic sum_{k>k0} mu_k^2 c_k^2 / sum_k mu_k^2 c_k^2 with
/// k0 = n_Gamma/2; near-zero modes (interior kernel) are deflated. The
/// discrete signature of 1_Gamma lying in the operator domain.
double one_gamma_in_domain_check(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m);

/// FluxReport CSV: `k,mu,c_k,partial_sum` rows plus `phi_direct` /
/// `phi_spectral_full` footer rows.
std::string write_flux_csv(const FluxReport& r);

}  // namespace steklov
