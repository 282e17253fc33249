#pragma once

#include <span>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

/// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  DenseMatrix transposed() const;
  std::vector<double> multiply(std::span<const double> x) const;
  double max_abs() const;
  /// max_ij |A_ij - A_ji|
  double asymmetry() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Lower-triangular Cholesky factor of an SPD matrix. Throws MatrixError
/// if a non-positive pivot is met.
DenseMatrix cholesky_lower(const DenseMatrix& a);

/// Solves L x = b (forward) or L^T x = b (backward) in place.
void solve_lower(const DenseMatrix& l, std::vector<double>& x);
void solve_lower_transposed(const DenseMatrix& l, std::vector<double>& x);

/// Solves the SPD system A x = b via Cholesky.
std::vector<double> solve_spd_dense(const DenseMatrix& a, std::vector<double> b);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  ///< ascending
  DenseMatrix eigenvectors;         ///< columns, orthonormal, sign-normalized
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix with threshold
/// sweeps; stops when the off-diagonal Frobenius norm drops below
/// tol * ||A||_F. Eigenvalues ascending; every eigenvector has its first
/// non-negligible component positive and exact ties are ordered by
/// lexicographic comparison of the sign-normalized vectors, so the output
/// is deterministic.
EigenDecomposition jacobi_eigensolve(DenseMatrix a, double tol = 1e-12, int max_sweeps = 30);

/// Generalized symmetric eigenproblem A v = mu M v with SPD M, by Cholesky
/// reduction M = L L^T, Jacobi on L^-1 A L^-T and back-transform. Returned
/// eigenvectors are M-orthonormal.
EigenDecomposition generalized_eigensolve(const DenseMatrix& a, const DenseMatrix& m,
                                          double tol = 1e-12, int max_sweeps = 30);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace steklov
