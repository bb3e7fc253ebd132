#include "subcol/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace subcol {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw ValidationError(std::string(op) + ": shape mismatch " + std::to_string(a.rows) + "x" +
                          std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                          std::to_string(b.cols));
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  Matrix r = a;
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "sub");
  Matrix r = a;
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
  return r;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
  return a;
}

Matrix& operator-=(Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "sub");
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
  return a;
}

Matrix& operator*=(Matrix& a, double s) {
  for (double& v : a.data) v *= s;
  return a;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r = a;
  r *= s;
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw ValidationError("matmul: inner dimensions " + std::to_string(a.cols) + " vs " +
                          std::to_string(b.rows));
  Matrix r(a.rows, b.cols);
  // i-k-j order keeps the inner loop contiguous in both b and r.
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<size_t>(i) * a.cols];
    double* rrow = &r.data[static_cast<size_t>(i) * r.cols];
    for (int k = 0; k < a.cols; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

Matrix transpose(const Matrix& a) {
  Matrix r(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(j, i) = a(i, j);
  return r;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw ValidationError("matmul_tn: row counts differ");
  Matrix r(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const double* arow = &a.data[static_cast<size_t>(k) * a.cols];
    const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
    for (int i = 0; i < a.cols; ++i) {
      double aki = arow[i];
      if (aki == 0.0) continue;
      double* rrow = &r.data[static_cast<size_t>(i) * r.cols];
      for (int j = 0; j < b.cols; ++j) rrow[j] += aki * brow[j];
    }
  }
  return r;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw ValidationError("matmul_nt: column counts differ");
  Matrix r(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<size_t>(i) * a.cols];
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = &b.data[static_cast<size_t>(j) * b.cols];
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
      r(i, j) = s;
    }
  }
  return r;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "hadamard");
  Matrix r = a;
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] *= b.data[i];
  return r;
}

double dot(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "dot");
  double s = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

double frob_norm_sq(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return s;
}

double frob_norm(const Matrix& a) { return std::sqrt(frob_norm_sq(a)); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

bool all_finite(const Matrix& a) {
  for (double v : a.data)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix get_col(const Matrix& a, int j) {
  Matrix v(a.rows, 1);
  for (int i = 0; i < a.rows; ++i) v(i, 0) = a(i, j);
  return v;
}

void set_col(Matrix& a, int j, const Matrix& v) {
  if (v.rows != a.rows || v.cols != 1) throw ValidationError("set_col: bad column shape");
  for (int i = 0; i < a.rows; ++i) a(i, j) = v(i, 0);
}

double col_norm_sq(const Matrix& a, int j) {
  double s = 0.0;
  for (int i = 0; i < a.rows; ++i) s += a(i, j) * a(i, j);
  return s;
}

double row_norm_sq(const Matrix& a, int i) {
  double s = 0.0;
  for (int j = 0; j < a.cols; ++j) s += a(i, j) * a(i, j);
  return s;
}

// ---------------------------------------------------------------------------
// SVD: one-sided Jacobi on the columns. Works on a copy B of the input and
// accumulates the right rotations into V; at convergence the columns of B are
// mutually orthogonal, their norms are the singular values and B with
// normalized columns is U. Inputs with rows < cols are handled by transposing.
// ---------------------------------------------------------------------------

namespace {

constexpr int kSvdMaxSweeps = 100;
constexpr double kSvdTol = 1e-15;

// Gram-Schmidt completion of the near-null columns of u against the kept
// ones, seeded from canonical basis vectors for determinism.
void complete_orthonormal(Matrix& u, const std::vector<int>& fill_cols) {
  const int m = u.rows;
  size_t next = 0;
  for (int target : fill_cols) {
    bool placed = false;
    for (int e = 0; e < m && !placed; ++e) {
      Matrix cand(m, 1);
      cand(e, 0) = 1.0;
      // two passes of classical Gram-Schmidt for stability
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < u.cols; ++j) {
          bool is_pending = false;
          for (size_t t = next; t < fill_cols.size(); ++t)
            if (fill_cols[t] == j) is_pending = true;
          if (is_pending) continue;
          double proj = 0.0;
          for (int i = 0; i < m; ++i) proj += u(i, j) * cand(i, 0);
          for (int i = 0; i < m; ++i) cand(i, 0) -= proj * u(i, j);
        }
      }
      double nrm = frob_norm(cand);
      if (nrm > 1e-3) {
        for (int i = 0; i < m; ++i) u(i, target) = cand(i, 0) / nrm;
        placed = true;
      }
    }
    if (!placed) throw NumericalError("svd: failed to complete orthonormal basis");
    ++next;
  }
}

SvdResult svd_tall(const Matrix& a) {
  const int m = a.rows, n = a.cols;
  Matrix b = a;
  Matrix v = Matrix::identity(n);

  bool converged = false;
  for (int sweep = 0; sweep < kSvdMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          double bp = b(i, p), bq = b(i, q);
          app += bp * bp;
          aqq += bq * bq;
          apq += bp * bq;
        }
        if (std::abs(apq) <= kSvdTol * std::sqrt(app * aqq)) continue;
        converged = false;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double cs = 1.0 / std::sqrt(1.0 + t * t);
        double sn = cs * t;
        for (int i = 0; i < m; ++i) {
          double bp = b(i, p), bq = b(i, q);
          b(i, p) = cs * bp - sn * bq;
          b(i, q) = sn * bp + cs * bq;
        }
        for (int i = 0; i < n; ++i) {
          double vp = v(i, p), vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
  }
  if (!converged) throw NumericalError("svd: Jacobi sweeps did not converge");

  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) s[j] = std::sqrt(col_norm_sq(b, j));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return s[i] > s[j]; });

  SvdResult out;
  out.u = Matrix(m, n);
  out.s.resize(n);
  Matrix vs(n, n);
  for (int j = 0; j < n; ++j) {
    int src = order[j];
    out.s[j] = s[src];
    for (int i = 0; i < m; ++i) out.u(i, j) = b(i, src);
    for (int i = 0; i < n; ++i) vs(i, j) = v(i, src);
  }

  double s_max = out.s.empty() ? 0.0 : out.s[0];
  std::vector<int> deficient;
  for (int j = 0; j < n; ++j) {
    if (out.s[j] > s_max * 1e-13 && out.s[j] > 0.0) {
      double inv = 1.0 / out.s[j];
      for (int i = 0; i < m; ++i) out.u(i, j) *= inv;
    } else {
      deficient.push_back(j);
      for (int i = 0; i < m; ++i) out.u(i, j) = 0.0;
    }
  }
  if (!deficient.empty()) complete_orthonormal(out.u, deficient);

  // canonical signs: first nonzero entry of each left singular vector >= 0
  for (int j = 0; j < n; ++j) {
    double colmax = 0.0;
    for (int i = 0; i < m; ++i) colmax = std::max(colmax, std::abs(out.u(i, j)));
    for (int i = 0; i < m; ++i) {
      if (std::abs(out.u(i, j)) > 1e-12 * colmax) {
        if (out.u(i, j) < 0.0) {
          for (int r = 0; r < m; ++r) out.u(r, j) = -out.u(r, j);
          for (int r = 0; r < n; ++r) vs(r, j) = -vs(r, j);
        }
        break;
      }
    }
  }

  out.vt = transpose(vs);
  return out;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  if (m.rows < 1 || m.cols < 1) throw ValidationError("svd: empty matrix");
  if (!all_finite(m)) throw ValidationError("svd: non-finite input");
  if (m.rows >= m.cols) return svd_tall(m);
  SvdResult t = svd_tall(transpose(m));
  SvdResult out;
  out.s = t.s;
  out.u = transpose(t.vt);
  out.vt = transpose(t.u);
  return out;
}

SigmaMinSpace sigma_min_space(const Matrix& m, double tol) {
  if (tol <= 0.0) throw ValidationError("sigma_min_space: tol must be positive");
  SvdResult dec = svd(m);
  const int k = static_cast<int>(dec.s.size());
  SigmaMinSpace out;
  out.sigma_min = dec.s[k - 1];
  double s_max = dec.s[0];
  double thresh = out.sigma_min + tol * s_max;
  int first = k - 1;
  while (first > 0 && dec.s[first - 1] <= thresh) --first;
  out.multiplicity = k - first;
  out.basis = Matrix(m.rows, out.multiplicity);
  for (int j = 0; j < out.multiplicity; ++j)
    for (int i = 0; i < m.rows; ++i) out.basis(i, j) = dec.u(i, first + j);
  return out;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  const int n = a.rows;
  if (a.cols != n) throw ValidationError("solve_spd: matrix not square");
  if (b.rows != n) throw ValidationError("solve_spd: rhs rows mismatch");
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  if (asym > 1e-10 * (1.0 + max_abs(a))) throw ValidationError("solve_spd: matrix not symmetric");

  // Cholesky a = L L^T
  Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) throw NumericalError("solve_spd: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }

  Matrix x = b;
  // forward L y = b
  for (int c = 0; c < x.cols; ++c) {
    for (int i = 0; i < n; ++i) {
      double s = x(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    // back L^T x = y
    for (int i = n - 1; i >= 0; --i) {
      double s = x(i, c);
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

EighResult eigh(const Matrix& a) {
  const int n = a.rows;
  if (a.cols != n) throw ValidationError("eigh: matrix not square");
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  if (asym > 1e-9 * (1.0 + max_abs(a))) throw ValidationError("eigh: matrix not symmetric");

  Matrix d = a;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(1.0, max_abs(a));

  bool converged = (n <= 1);
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    converged = true;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = d(p, q);
        if (std::abs(apq) <= 1e-15 * scale) continue;
        converged = false;
        double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        double dpp = d(p, p), dqq = d(q, q);
        d(p, p) = dpp - t * apq;
        d(q, q) = dqq + t * apq;
        d(p, q) = 0.0;
        d(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          double dip = d(i, p), diq = d(i, q);
          d(i, p) = c * dip - s * diq;
          d(p, i) = d(i, p);
          d(i, q) = s * dip + c * diq;
          d(q, i) = d(i, q);
        }
        for (int i = 0; i < n; ++i) {
          double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  if (!converged) throw NumericalError("eigh: Jacobi sweeps did not converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return d(i, i) < d(j, j); });

  EighResult out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = d(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  // canonical signs
  for (int j = 0; j < n; ++j) {
    double colmax = 0.0;
    for (int i = 0; i < n; ++i) colmax = std::max(colmax, std::abs(out.vectors(i, j)));
    for (int i = 0; i < n; ++i) {
      if (std::abs(out.vectors(i, j)) > 1e-12 * colmax) {
        if (out.vectors(i, j) < 0.0)
          for (int r = 0; r < n; ++r) out.vectors(r, j) = -out.vectors(r, j);
        break;
      }
    }
  }
  return out;
}

double spectral_norm(const Matrix& m) { return svd(m).s[0]; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw ValidationError("uniform_int: empty range");
  uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + static_cast<int>(x % span);
}

Matrix random_uniform(int r, int c, double lo, double hi, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

Matrix random_gaussian(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.normal();
  return m;
}

}  // namespace subcol
