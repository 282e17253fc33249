#include "steklov/dtn.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "steklov/errors.hpp"
#include "steklov/util.hpp"

namespace steklov {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseSymmetricMatrix& m) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.values().size() * 2);
  for (int i = 0; i < m.dimension(); ++i) {
    for (int p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p) {
      int j = m.col_indices()[p];
      trip.emplace_back(i, j, m.values()[p]);
      if (i != j) trip.emplace_back(j, i, m.values()[p]);
    }
  }
  Eigen::SparseMatrix<double> s(m.dimension(), m.dimension());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

bool mesh_is_truncated(const Mesh& mesh) {
  for (const auto& vi : mesh.vertex_info)
    if (vi.tag == VertexTag::OnS) return true;
  return false;
}

}  // namespace

DtnMatrix schur_dtn(const Mesh& mesh, int threads) {
  DtnMatrix dtn;
  dtn.domain_kind = mesh_is_truncated(mesh) ? DomainKind::Truncated : DomainKind::Interior;
  dtn.gamma_dofs = gamma_dof_order(mesh, BoundaryName::Gamma);
  int ng = static_cast<int>(dtn.gamma_dofs.size());
  if (ng == 0) throw ParameterError("mesh has no Gamma dofs");

  SparseSymmetricMatrix k = assemble_stiffness(mesh);
  DirichletReduction red = apply_dirichlet(k, mesh);

  // Partition the free dofs into Gamma and interior.
  int nf = red.k_ff.dimension();
  std::vector<int> free_kind(nf, 0);  // 0 interior, 1 gamma
  std::vector<int> gamma_free(ng);
  for (int g = 0; g < ng; ++g) {
    int f = red.mesh_to_free[dtn.gamma_dofs[g]];
    if (f < 0) throw MeshError("Gamma dof eliminated by the Dirichlet reduction");
    free_kind[f] = 1;
    gamma_free[g] = f;
  }
  std::vector<int> interior_free;
  std::vector<int> free_to_interior(nf, -1);
  for (int f = 0; f < nf; ++f)
    if (!free_kind[f]) {
      free_to_interior[f] = static_cast<int>(interior_free.size());
      interior_free.push_back(f);
    }
  std::vector<int> free_to_gamma(nf, -1);
  for (int g = 0; g < ng; ++g) free_to_gamma[gamma_free[g]] = g;

  int ni = static_cast<int>(interior_free.size());
  DenseMatrix kgg(ng, ng);
  std::vector<Eigen::Triplet<double>> kii_t;
  // K_IG columns stored per Gamma dof for the right-hand sides.
  std::vector<std::vector<std::pair<int, double>>> kig_cols(ng);

  const auto& ro = red.k_ff.row_offsets();
  for (int i = 0; i < nf; ++i) {
    for (int p = ro[i]; p < ro[i + 1]; ++p) {
      int j = red.k_ff.col_indices()[p];
      double v = red.k_ff.values()[p];
      int gi = free_to_gamma[i], gj = free_to_gamma[j];
      int ii = free_to_interior[i], ij = free_to_interior[j];
      if (gi != -1 && gj != -1) {
        kgg(gi, gj) += v;
        if (gi != gj) kgg(gj, gi) += v;
      } else if (ii != -1 && ij != -1) {
        kii_t.emplace_back(ii, ij, v);
        if (ii != ij) kii_t.emplace_back(ij, ii, v);
      } else if (gi != -1) {
        kig_cols[gi].emplace_back(ij, v);
      } else {
        kig_cols[gj].emplace_back(ii, v);
      }
    }
  }

  dtn.a = kgg;
  if (ni > 0) {
    Eigen::SparseMatrix<double> kii(ni, ni);
    kii.setFromTriplets(kii_t.begin(), kii_t.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kii);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("interior-block factorization failed in schur_dtn", {});

    auto solve_columns = [&](int g0, int g1) {
      Eigen::VectorXd rhs(ni), x(ni);
      for (int g = g0; g < g1; ++g) {
        rhs.setZero();
        for (auto [i, v] : kig_cols[g]) rhs[i] = v;
        x = ldlt.solve(rhs);
        // Column g of K_GI K_II^-1 K_IG: pair against every other column.
        for (int h = 0; h < ng; ++h) {
          double s = 0;
          for (auto [i, v] : kig_cols[h]) s += v * x[i];
          dtn.a(h, g) -= s;
        }
      }
    };
    if (threads <= 1 || ng < 8) {
      solve_columns(0, ng);
    } else {
      int nthreads = std::min(threads, ng);
      std::vector<std::thread> pool;
      int chunk = (ng + nthreads - 1) / nthreads;
      for (int t = 0; t < nthreads; ++t) {
        int g0 = t * chunk, g1 = std::min(ng, g0 + chunk);
        if (g0 < g1) pool.emplace_back(solve_columns, g0, g1);
      }
      for (auto& th : pool) th.join();
    }
  }

  dtn.asymmetry_defect = dtn.a.asymmetry();
  double scale = std::max(dtn.a.max_abs(), 1e-300);
  if (dtn.asymmetry_defect > 1e-8 * scale)
    throw MatrixError("Schur complement asymmetry defect " + format_g17(dtn.asymmetry_defect) +
                      " exceeds the quality bound");
  for (int i = 0; i < ng; ++i)
    for (int j = i + 1; j < ng; ++j) {
      double avg = 0.5 * (dtn.a(i, j) + dtn.a(j, i));
      dtn.a(i, j) = avg;
      dtn.a(j, i) = avg;
    }
  return dtn;
}

SteklovSpectrum steklov_spectrum(const DtnMatrix& a, const BoundaryMassMatrix& m,
                                 std::optional<int> k_max) {
  if (a.size() != m.size()) throw MatrixError("DtN and boundary mass sizes differ");
  DenseMatrix md = m.to_dense();
  EigenDecomposition dec = generalized_eigensolve(a.a, md);

  SteklovSpectrum s;
  int keep = k_max.has_value() ? std::min(*k_max, a.size()) : a.size();
  s.eigenvalues.assign(dec.eigenvalues.begin(), dec.eigenvalues.begin() + keep);
  s.eigenvectors = DenseMatrix(a.size(), keep);
  s.residuals.resize(keep);
  for (int j = 0; j < keep; ++j) {
    std::vector<double> v(a.size());
    for (int i = 0; i < a.size(); ++i) v[i] = dec.eigenvectors(i, j);
    std::vector<double> av = a.a.multiply(v);
    std::vector<double> mv = md.multiply(v);
    double r2 = 0;
    for (int i = 0; i < a.size(); ++i) {
      double r = av[i] - s.eigenvalues[j] * mv[i];
      r2 += r * r;
      s.eigenvectors(i, j) = v[i];
    }
    s.residuals[j] = std::sqrt(r2);
  }
  return s;
}

std::vector<double> resolvent_apply(const DtnMatrix& a, const BoundaryMassMatrix& m,
                                    double lambda, std::span<const double> psi) {
  if (lambda < 0.0) throw ParameterError("lambda must be non-negative");
  if (lambda == 0.0 && a.domain_kind == DomainKind::Interior)
    throw SingularityError("lambda = 0 with an interior DtN: the constants are in the kernel");
  if (a.size() != m.size() || static_cast<int>(psi.size()) != a.size())
    throw MatrixError("resolvent_apply: size mismatch");
  DenseMatrix sys = a.a;
  DenseMatrix md = m.to_dense();
  for (int i = 0; i < sys.rows(); ++i)
    for (int j = 0; j < sys.cols(); ++j) sys(i, j) += lambda * md(i, j);
  return solve_spd_dense(sys, md.multiply(psi));
}

namespace {

/// Pseudo-inverse of the operator in M geometry via its Steklov spectrum,
/// dropping near-zero modes (interior kernel deflation). Returns the matrix
/// sum of V_k V_k^T / mu_k over kept modes.
DenseMatrix spectral_inverse(const DtnMatrix& a, const BoundaryMassMatrix& m, double lambda) {
  SteklovSpectrum s = steklov_spectrum(a, m);
  int n = a.size();
  double mu_max = s.eigenvalues.back();
  DenseMatrix inv(n, n);
  for (int k = 0; k < n; ++k) {
    double denom = lambda + s.eigenvalues[k];
    if (lambda == 0.0 && std::abs(s.eigenvalues[k]) <= 1e-9 * std::max(1.0, mu_max)) {
      if (a.domain_kind == DomainKind::Truncated)
        throw MatrixError("truncated DtN has a near-zero eigenvalue; cannot invert");
      continue;  // deflate the interior kernel
    }
    for (int i = 0; i < n; ++i) {
      double w = s.eigenvectors(i, k) / denom;
      if (w == 0.0) continue;
      for (int j = 0; j < n; ++j) inv(i, j) += w * s.eigenvectors(j, k);
    }
  }
  return inv;
}

}  // namespace

double operator_distance(const DtnMatrix& a1, const DtnMatrix& a2, const BoundaryMassMatrix& m,
                         double lambda) {
  if (a1.size() != a2.size() || a1.size() != m.size())
    throw ParameterError("operator_distance requires matching Gamma dof sets");
  if (a1.gamma_dofs.size() == a2.gamma_dofs.size()) {
    // Same trace space is what matters; dof ids may differ across meshes.
  }
  DenseMatrix x = spectral_inverse(a1, m, lambda);
  DenseMatrix y = spectral_inverse(a2, m, lambda);
  for (size_t i = 0; i < x.data().size(); ++i) x.data()[i] -= y.data()[i];

  DenseMatrix l = cholesky_lower(m.to_dense());
  // L^T X L, symmetric by construction.
  DenseMatrix lt = l.transposed();
  DenseMatrix t = matmul(lt, matmul(x, l));
  for (int i = 0; i < t.rows(); ++i)
    for (int j = i + 1; j < t.cols(); ++j) {
      double avg = 0.5 * (t(i, j) + t(j, i));
      t(i, j) = avg;
      t(j, i) = avg;
    }
  EigenDecomposition dec = jacobi_eigensolve(std::move(t));
  double best = 0;
  for (double e : dec.eigenvalues) best = std::max(best, std::abs(e));
  return best;
}

double poincare_constant(const Mesh& mesh) {
  if (!mesh_is_truncated(mesh))
    throw ParameterError("poincare_constant requires a truncated mesh (Dirichlet on S)");
  SparseSymmetricMatrix k = assemble_stiffness(mesh);
  DirichletReduction red = apply_dirichlet(k, mesh);
  SparseSymmetricMatrix m_full = assemble_domain_mass(mesh);

  // Reduce the mass matrix to the free dofs.
  std::vector<SparseSymmetricMatrix::Triplet> trip;
  for (int i = 0; i < m_full.dimension(); ++i) {
    int fi = red.mesh_to_free[i];
    if (fi == -1) continue;
    for (int p = m_full.row_offsets()[i]; p < m_full.row_offsets()[i + 1]; ++p) {
      int fj = red.mesh_to_free[m_full.col_indices()[p]];
      if (fj == -1) continue;
      trip.push_back({fi, fj, m_full.values()[p]});
    }
  }
  SparseSymmetricMatrix m_ff =
      SparseSymmetricMatrix::from_triplets(red.k_ff.dimension(), std::move(trip));

  Eigen::SparseMatrix<double> kff = to_eigen(red.k_ff);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kff);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("stiffness factorization failed in poincare_constant", {});

  // Inverse power iteration on K^-1 M with M-normalization.
  int n = red.k_ff.dimension();
  std::vector<double> v(n, 1.0), mv(n), w(n);
  double eig = 0, eig_prev = -1;
  for (int it = 0; it < 2000; ++it) {
    m_ff.multiply(v, mv);
    Eigen::Map<const Eigen::VectorXd> rhs(mv.data(), n);
    Eigen::VectorXd x = ldlt.solve(rhs);
    for (int i = 0; i < n; ++i) w[i] = x[i];
    m_ff.multiply(w, mv);
    double wmw = dot(w, mv);
    double wmv_old = dot(v, mv);
    (void)wmv_old;
    double scale = std::sqrt(wmw);
    for (int i = 0; i < n; ++i) v[i] = w[i] / scale;
    // Rayleigh quotient of the generalized problem.
    std::vector<double> kv = red.k_ff.multiply(v);
    m_ff.multiply(v, mv);
    eig = dot(v, kv) / dot(v, mv);
    if (eig_prev > 0 && std::abs(eig - eig_prev) <= 1e-12 * eig) break;
    eig_prev = eig;
  }
  return 1.0 / std::sqrt(eig);
}

std::string write_spectrum_csv(const SteklovSpectrum& s) {
  std::ostringstream out;
  out << "k,mu,residual\n";
  for (size_t k = 0; k < s.eigenvalues.size(); ++k)
    out << k << "," << format_g17(s.eigenvalues[k]) << "," << format_g17(s.residuals[k]) << "\n";
  return out.str();
}

std::string write_eigenvector_text(const SteklovSpectrum& s) {
  std::ostringstream out;
  for (int i = 0; i < s.eigenvectors.rows(); ++i) {
    for (int j = 0; j < s.eigenvectors.cols(); ++j) {
      if (j) out << " ";
      out << format_g17(s.eigenvectors(i, j));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace steklov
