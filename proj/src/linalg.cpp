#include "steklov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace steklov {

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0;
    const double* row = &data_[static_cast<size_t>(i) * cols_];
    for (int j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

double DenseMatrix::max_abs() const {
  double m = 0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::asymmetry() const {
  double m = 0;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw MatrixError("matmul: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix cholesky_lower(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw MatrixError("cholesky: matrix not square");
  int n = a.rows();
  DenseMatrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw MatrixError("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

void solve_lower(const DenseMatrix& l, std::vector<double>& x) {
  int n = l.rows();
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
}

void solve_lower_transposed(const DenseMatrix& l, std::vector<double>& x) {
  int n = l.rows();
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
}

std::vector<double> solve_spd_dense(const DenseMatrix& a, std::vector<double> b) {
  DenseMatrix l = cholesky_lower(a);
  solve_lower(l, b);
  solve_lower_transposed(l, b);
  return b;
}

namespace {

double off_diagonal_fro(const DenseMatrix& a) {
  double s = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double fro(const DenseMatrix& a) {
  double s = 0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

void sign_normalize_column(DenseMatrix& v, int j) {
  int n = v.rows();
  double colnorm = 0;
  for (int i = 0; i < n; ++i) colnorm = std::max(colnorm, std::abs(v(i, j)));
  for (int i = 0; i < n; ++i) {
    if (std::abs(v(i, j)) > 1e-12 * colnorm) {
      if (v(i, j) < 0)
        for (int k = 0; k < n; ++k) v(k, j) = -v(k, j);
      return;
    }
  }
}

}  // namespace

EigenDecomposition jacobi_eigensolve(DenseMatrix a, double tol, int max_sweeps) {
  if (a.rows() != a.cols()) throw MatrixError("jacobi: matrix not square");
  int n = a.rows();
  DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = fro(a);
  int sweep = 0;
  if (scale > 0.0) {
    for (; sweep < max_sweeps; ++sweep) {
      double off = off_diagonal_fro(a);
      if (off <= tol * scale) break;
      // Threshold: rotate only pairs that still matter this sweep.
      double thresh = off / (n * std::sqrt(static_cast<double>(n)));
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          double apq = a(p, q);
          if (std::abs(apq) <= thresh * 1e-3) continue;
          double app = a(p, p), aqq = a(q, q);
          double tau = (aqq - app) / (2.0 * apq);
          double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          double c = 1.0 / std::sqrt(1.0 + t * t);
          double s = t * c;
          for (int k = 0; k < n; ++k) {
            double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(k, q) = s * akp + c * akq;
          }
          for (int k = 0; k < n; ++k) {
            double apk = a(p, k), aqk = a(q, k);
            a(p, k) = c * apk - s * aqk;
            a(q, k) = s * apk + c * aqk;
          }
          for (int k = 0; k < n; ++k) {
            double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    if (off_diagonal_fro(a) > tol * scale * 10.0)
      throw EigenSolverError("jacobi eigensolver did not converge within the sweep budget");
  }

  EigenDecomposition result;
  result.sweeps = sweep;
  result.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) result.eigenvalues[i] = a(i, i);
  for (int j = 0; j < n; ++j) sign_normalize_column(v, j);

  // Ascending eigenvalues; exact ties broken by lexicographic comparison of
  // the sign-normalized eigenvectors for a deterministic output.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (result.eigenvalues[i] != result.eigenvalues[j])
      return result.eigenvalues[i] < result.eigenvalues[j];
    for (int k = 0; k < n; ++k)
      if (v(k, i) != v(k, j)) return v(k, i) < v(k, j);
    return false;
  });
  EigenDecomposition sorted;
  sorted.sweeps = sweep;
  sorted.eigenvalues.resize(n);
  sorted.eigenvectors = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    sorted.eigenvalues[j] = result.eigenvalues[order[j]];
    for (int i = 0; i < n; ++i) sorted.eigenvectors(i, j) = v(i, order[j]);
  }
  return sorted;
}

EigenDecomposition generalized_eigensolve(const DenseMatrix& a, const DenseMatrix& m, double tol,
                                          int max_sweeps) {
  if (a.rows() != m.rows() || a.cols() != m.cols())
    throw MatrixError("generalized_eigensolve: size mismatch");
  int n = a.rows();
  DenseMatrix l = cholesky_lower(m);

  // B = L^-1 A L^-T, computed column-wise by triangular solves.
  DenseMatrix b(n, n);
  std::vector<double> col(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = a(i, j);
    solve_lower(l, col);
    for (int i = 0; i < n; ++i) b(i, j) = col[i];
  }
  DenseMatrix bt = b.transposed();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = bt(i, j);
    solve_lower(l, col);
    for (int i = 0; i < n; ++i) b(i, j) = col[i];
  }
  // b is now (L^-1 A L^-T)^T; symmetrize to damp rounding drift.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double avg = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = avg;
      b(j, i) = avg;
    }

  EigenDecomposition dec = jacobi_eigensolve(std::move(b), tol, max_sweeps);
  // Back-transform eigenvectors: v = L^-T w. They come out M-orthonormal.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = dec.eigenvectors(i, j);
    solve_lower_transposed(l, col);
    for (int i = 0; i < n; ++i) dec.eigenvectors(i, j) = col[i];
    sign_normalize_column(dec.eigenvectors, j);
  }
  return dec;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace steklov
