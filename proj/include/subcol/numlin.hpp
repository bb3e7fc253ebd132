#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "subcol/errors.hpp"

namespace subcol {

/// Dense row-major matrix of doubles. Sized for problems up to a few
/// hundred rows/columns; everything is value-semantic and copyable.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
    if (r < 0 || c < 0) throw ValidationError("Matrix: negative dimension");
  }

  static Matrix zeros(int r, int c) { return Matrix(r, c); }
  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  size_t size() const { return data.size(); }
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);  // matrix product
Matrix operator*(double s, const Matrix& a);
Matrix& operator+=(Matrix& a, const Matrix& b);
Matrix& operator-=(Matrix& a, const Matrix& b);
Matrix& operator*=(Matrix& a, double s);

Matrix transpose(const Matrix& a);
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix hadamard(const Matrix& a, const Matrix& b);

double dot(const Matrix& a, const Matrix& b);  // Frobenius inner product
double frob_norm_sq(const Matrix& a);
double frob_norm(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& a);

Matrix get_col(const Matrix& a, int j);
void set_col(Matrix& a, int j, const Matrix& v);
double col_norm_sq(const Matrix& a, int j);
double row_norm_sq(const Matrix& a, int i);

/// Thin SVD a = u * diag(s) * vt with k = min(rows, cols) singular values,
/// sorted non-increasing. u has orthonormal columns, vt orthonormal rows.
/// Computed by one-sided Jacobi rotations; deterministic for fixed input,
/// with each left singular vector's first nonzero entry made nonnegative.
struct SvdResult {
  Matrix u;
  std::vector<double> s;
  Matrix vt;
};
SvdResult svd(const Matrix& m);

/// Smallest singular value of m, the number of singular values within
/// tol * s_max of it, and an orthonormal basis (rows x multiplicity) for the
/// corresponding left singular subspace.
struct SigmaMinSpace {
  double sigma_min = 0.0;
  int multiplicity = 0;
  Matrix basis;
};
SigmaMinSpace sigma_min_space(const Matrix& m, double tol = 1e-8);

/// Solve a*x = b for symmetric positive definite a via Cholesky.
Matrix solve_spd(const Matrix& a, const Matrix& b);

/// Symmetric eigendecomposition a = vectors * diag(values) * vectors^T,
/// eigenvalues ascending. Cyclic Jacobi; input must be symmetric.
struct EighResult {
  std::vector<double> values;
  Matrix vectors;  // eigenvectors in columns
};
EighResult eigh(const Matrix& a);

double spectral_norm(const Matrix& m);  // largest singular value

/// Deterministic seeded generator. The engine is mt19937_64 (bit-exact
/// across platforms); the distributions are implemented here so streams
/// do not depend on any standard-library distribution implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (pair cached).
  double normal();

  /// Uniform integer on [lo, hi] inclusive, by rejection.
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Matrix random_uniform(int r, int c, double lo, double hi, Rng& rng);
Matrix random_gaussian(int r, int c, Rng& rng);

}  // namespace subcol
