#pragma once

// Analytic and brute-force reference values used by the test suites. These
// are computed independently of the library's solution paths: closed forms
// from separation of variables on disks/annuli, a 1D radial finite-difference
// eigensolver, and Monte-Carlo-free dense sampling for boundary measures.

#include <cmath>
#include <vector>

#include "steklov/geometry.hpp"

namespace oracles {

// Interior unit-disk Steklov spectrum: mu_k = k/R with multiplicity two for
// k >= 1 (modes r^k cos(k t), r^k sin(k t)); mu_0 = 0.
inline double disk_mu(int index, double radius) {
  if (index == 0) return 0.0;
  return ((index + 1) / 2) / radius;
}

// Annulus with Robin data on r = R and Dirichlet on r = L.
inline double annulus_mu0(double r, double l) { return 1.0 / (r * std::log(l / r)); }

inline double annulus_mu(int k, double r, double l) {
  if (k == 0) return annulus_mu0(r, l);
  double rk = std::pow(r, 2 * k), lk = std::pow(l, 2 * k);
  return (k / r) * (lk + rk) / (lk - rk);
}

// Radial Robin solution u(r) = a ln(L/r), a = psi R / (lambda R ln(L/R) + 1),
// for constant psi on Gamma.
inline double annulus_robin_coeff(double r, double l, double lambda, double psi) {
  return psi * r / (lambda * r * std::log(l / r) + 1.0);
}

inline double annulus_robin_u(double rr, double r, double l, double lambda, double psi) {
  return annulus_robin_coeff(r, l, lambda, psi) * std::log(l / rr);
}

// Total flux for psi = lambda * 1 on the annulus.
inline double annulus_flux(double r, double l, double lambda) {
  return 2.0 * M_PI * lambda * r / (1.0 + lambda * r * std::log(l / r));
}

// Lowest eigenvalue of -(1/r)(r u')' = eig * u on (R, L), u'(R) = 0, u(L) = 0,
// by a second-order finite-difference generalized eigensolve with inverse
// iteration. The fundamental annulus mode is radial, so this is the smallest
// mixed Neumann(Gamma)/Dirichlet(S) Laplace eigenvalue of the full annulus.
inline double annulus_mixed_eigenvalue_fd(double r, double l, int n = 4000) {
  double h = (l - r) / n;
  // Unknowns u_0..u_{n-1} at r_i = R + i h; u_n = 0 (Dirichlet).
  // Conservative form: (1/r_i) d/dr (r u') with a ghost point for u'(R) = 0.
  std::vector<double> diag(n), off(n - 1), u(n, 1.0), w(n);
  for (int i = 0; i < n; ++i) {
    double ri = r + i * h;
    double rp = ri + 0.5 * h, rm = ri - 0.5 * h;
    if (i == 0) {
      // Neumann at R: flux through r - h/2 vanishes.
      diag[i] = rp / (h * h * ri);
      if (i + 1 < n) off[i] = -rp / (h * h * ri);
    } else {
      diag[i] = (rp + rm) / (h * h * ri);
      if (i + 1 < n) off[i] = -rp / (h * h * ri);
    }
  }
  // Inverse power iteration with the Thomas algorithm; the operator is
  // nonsymmetric in these variables but the eigenvalue is real and simple.
  double eig = 0;
  for (int it = 0; it < 200; ++it) {
    // Solve tridiagonal system A w = u.
    std::vector<double> c(n), d(n);
    c[0] = (n > 1 ? off[0] : 0.0) / diag[0];
    d[0] = u[0] / diag[0];
    for (int i = 1; i < n; ++i) {
      double lower = -((r + i * h) - 0.5 * h) / (h * h * (r + i * h));
      double m = diag[i] - lower * c[i - 1];
      c[i] = (i + 1 < n ? off[i] : 0.0) / m;
      d[i] = (u[i] - lower * d[i - 1]) / m;
    }
    w[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) w[i] = d[i] - c[i] * w[i + 1];
    double norm = 0;
    for (double v : w) norm = std::max(norm, std::abs(v));
    for (int i = 0; i < n; ++i) u[i] = w[i] / norm;
    eig = 1.0 / norm;
  }
  return eig;
}

// Brute-force boundary mass inside a ball: dense sampling of each segment.
inline double mass_in_ball_sampled(const steklov::MeasuredBoundary& b, steklov::Point2 center,
                                   double radius, int samples_per_segment = 2000) {
  double total = 0;
  const steklov::Polygon& poly = b.polygon();
  for (int e = 0; e < b.segment_count(); ++e) {
    int inside = 0;
    for (int s = 0; s < samples_per_segment; ++s) {
      double t = (s + 0.5) / samples_per_segment;
      steklov::Point2 p = poly.point_on_edge(e, t);
      if (steklov::distance(p, center) < radius) ++inside;
    }
    total += b.segment_masses()[e] * inside / samples_per_segment;
  }
  return total;
}

}  // namespace oracles
