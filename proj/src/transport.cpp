#include "steklov/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "steklov/errors.hpp"
#include "steklov/util.hpp"

namespace steklov {

double flux_direct(const Mesh& mesh, double lambda, std::span<const double> psi_gamma) {
  RobinSolution sol = robin_solve(mesh, lambda, psi_gamma);
  return sol.total_flux;
}

namespace {

std::vector<double> mode_coefficients(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m,
                                      std::span<const double> f) {
  // c_k = V_k^T M f (M-orthonormal eigenvectors).
  std::vector<double> mf = m.matrix.multiply(f);
  int n = m.size();
  int kmax = spectrum.eigenvectors.cols();
  std::vector<double> c(kmax, 0.0);
  for (int k = 0; k < kmax; ++k) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += spectrum.eigenvectors(i, k) * mf[i];
    c[k] = s;
  }
  return c;
}

}  // namespace

FluxReport flux_spectral(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m,
                         double lambda, double phi_direct) {
  if (!(lambda > 0.0)) throw ParameterError("flux_spectral requires lambda > 0");
  FluxReport r;
  r.lambda = lambda;
  r.phi_direct = phi_direct;
  r.complete_spectrum = spectrum.eigenvectors.cols() == m.size();

  std::vector<double> ones(m.size(), 1.0);
  std::vector<double> c = mode_coefficients(spectrum, m, ones);
  double running = 0.0;
  for (size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
    double mu = spectrum.eigenvalues[k];
    running += lambda * mu * c[k] * c[k] / (lambda + mu);
    r.phi_partial.push_back(running);
    r.coefficients.emplace_back(mu, c[k]);
  }
  r.phi_spectral_full = r.phi_partial.empty() ? 0.0 : r.phi_partial.back();
  return r;
}

double flux_spectral_general(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m,
                             double lambda, std::span<const double> psi) {
  if (!(lambda > 0.0)) throw ParameterError("flux_spectral_general requires lambda > 0");
  std::vector<double> ones(m.size(), 1.0);
  std::vector<double> c1 = mode_coefficients(spectrum, m, ones);
  std::vector<double> cp = mode_coefficients(spectrum, m, psi);
  double phi = 0;
  for (size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
    double mu = spectrum.eigenvalues[k];
    phi += cp[k] * c1[k] * mu / (lambda + mu);
  }
  return phi;
}

double interpolate_at(const Mesh& mesh, std::span<const double> nodal, Point2 p) {
  // Walking search from triangle 0, falling back to a scan.
  auto bary = [&](int t, double& l0, double& l1, double& l2) {
    const auto& tr = mesh.triangles[t];
    Point2 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    l0 = 1.0 - l1 - l2;
  };
  // Adjacency for the walk.
  std::map<std::pair<int, int>, int> half_edge_owner;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    for (int k = 0; k < 3; ++k)
      half_edge_owner[{mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3]}] = t;

  int cur = 0;
  int steps = 0;
  const double tol = -1e-12;
  while (steps++ < mesh.triangle_count() + 8) {
    double l0, l1, l2;
    bary(cur, l0, l1, l2);
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      const auto& tr = mesh.triangles[cur];
      return l0 * nodal[tr[0]] + l1 * nodal[tr[1]] + l2 * nodal[tr[2]];
    }
    const auto& tr = mesh.triangles[cur];
    // Cross the edge opposite the most negative coordinate.
    int worst = l0 < l1 ? (l0 < l2 ? 0 : 2) : (l1 < l2 ? 1 : 2);
    int u = tr[(worst + 1) % 3], v = tr[(worst + 2) % 3];
    auto it = half_edge_owner.find({v, u});
    if (it == half_edge_owner.end()) break;
    cur = it->second;
  }
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double l0, l1, l2;
    bary(t, l0, l1, l2);
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      const auto& tr = mesh.triangles[t];
      return l0 * nodal[tr[0]] + l1 * nodal[tr[1]] + l2 * nodal[tr[2]];
    }
  }
  throw ParameterError("probe point (" + format_g17(p.x) + ", " + format_g17(p.y) +
                       ") lies outside the mesh");
}

std::vector<std::vector<double>> domain_monotonicity_probe(
    const std::vector<Mesh>& truncation_meshes, double lambda, double psi_constant,
    const std::vector<Point2>& probes) {
  std::vector<std::vector<double>> table(probes.size());
  for (const Mesh& mesh : truncation_meshes) {
    std::vector<int> gdofs = gamma_dof_order(mesh);
    std::vector<double> psi(gdofs.size(), psi_constant);
    RobinSolution sol = robin_solve(mesh, lambda, psi);
    for (size_t p = 0; p < probes.size(); ++p)
      table[p].push_back(interpolate_at(mesh, sol.u_mesh, probes[p]));
  }
  return table;
}

double one_gamma_in_domain_check(const SteklovSpectrum& spectrum, const BoundaryMassMatrix& m) {
  std::vector<double> ones(m.size(), 1.0);
  std::vector<double> c = mode_coefficients(spectrum, m, ones);
  int n = static_cast<int>(spectrum.eigenvalues.size());
  if (n <= 1) return 0.0;
  double mu_max = spectrum.eigenvalues.back();
  int k0 = m.size() / 2;
  double full = 0, tail = 0;
  for (int k = 0; k < n; ++k) {
    double mu = spectrum.eigenvalues[k];
    if (std::abs(mu) <= 1e-9 * std::max(1.0, mu_max)) continue;  // deflate the kernel
    double term = mu * mu * c[k] * c[k];
    full += term;
    if (k > k0) tail += term;
  }
  return full > 0 ? tail / full : 0.0;
}

std::string write_flux_csv(const FluxReport& r) {
  std::ostringstream out;
  out << "k,mu,c_k,partial_sum\n";
  for (size_t k = 0; k < r.coefficients.size(); ++k)
    out << k << "," << format_g17(r.coefficients[k].first) << ","
        << format_g17(r.coefficients[k].second) << "," << format_g17(r.phi_partial[k]) << "\n";
  out << "phi_direct," << format_g17(r.phi_direct) << "\n";
  out << "phi_spectral_full," << format_g17(r.phi_spectral_full) << "\n";
  return out.str();
}

}  // namespace steklov
