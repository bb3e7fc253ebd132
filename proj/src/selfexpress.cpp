#include "subcol/selfexpress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subcol {

Regularizer Regularizer::ssc(double lambda) {
  if (lambda <= 0.0) throw ValidationError("Regularizer: lambda must be positive");
  return {RegKind::SSC, lambda, 1.0, 2.0, true};
}

Regularizer Regularizer::ensc(double lambda, double tau_en) {
  if (lambda <= 0.0) throw ValidationError("Regularizer: lambda must be positive");
  if (tau_en < 0.0) throw ValidationError("Regularizer: tau_en must be nonnegative");
  return {RegKind::EnSC, lambda, tau_en, 2.0, true};
}

Regularizer Regularizer::frobenius(double lambda, bool zero_diag) {
  if (lambda <= 0.0) throw ValidationError("Regularizer: lambda must be positive");
  return {RegKind::Frobenius, lambda, 1.0, 2.0, zero_diag};
}

Regularizer Regularizer::nuclear(double lambda, bool zero_diag) {
  if (lambda <= 0.0) throw ValidationError("Regularizer: lambda must be positive");
  return {RegKind::Nuclear, lambda, 1.0, 2.0, zero_diag};
}

Regularizer Regularizer::schatten(double lambda, double p, bool zero_diag) {
  if (lambda <= 0.0) throw ValidationError("Regularizer: lambda must be positive");
  if (p < 1.0) throw ValidationError("Regularizer: Schatten exponent must be >= 1");
  return {RegKind::SchattenP, lambda, 1.0, p, zero_diag};
}

namespace {

double l1_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += std::abs(v);
  return s;
}

bool diag_is_zero(const Matrix& m) {
  for (int i = 0; i < std::min(m.rows, m.cols); ++i)
    if (m(i, i) != 0.0) return false;
  return true;
}

void zero_diagonal(Matrix& m) {
  for (int i = 0; i < std::min(m.rows, m.cols); ++i) m(i, i) = 0.0;
}

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

double schatten_norm(const std::vector<double>& s, double p) {
  if (p < 1.0) throw ValidationError("schatten_norm: p must be >= 1");
  double acc = 0.0;
  for (double v : s) acc += std::pow(v, p);
  return std::pow(acc, 1.0 / p);
}

double evaluate_regularizer(const SelfExpression& c, const Regularizer& reg) {
  if (reg.zero_diag && !diag_is_zero(c.c)) return std::numeric_limits<double>::infinity();
  switch (reg.kind) {
    case RegKind::SSC:
      return l1_norm(c.c);
    case RegKind::EnSC:
      return l1_norm(c.c) + reg.tau_en * frob_norm_sq(c.c);
    case RegKind::Frobenius:
      return 0.5 * frob_norm_sq(c.c);
    case RegKind::Nuclear: {
      SvdResult dec = svd(c.c);
      double s = 0.0;
      for (double v : dec.s) s += v;
      return s;
    }
    case RegKind::SchattenP:
      return schatten_norm(svd(c.c).s, reg.p);
  }
  throw ValidationError("evaluate_regularizer: unknown kind");
}

FValue evaluate_f(const Matrix& z, const SelfExpression& c, const Regularizer& reg) {
  if (c.c.rows != c.c.cols) throw ValidationError("evaluate_f: C must be square");
  if (z.cols != c.c.rows) throw ValidationError("evaluate_f: Z columns must match C size");
  Matrix r = z * c.c - z;
  FValue out;
  out.residual = 0.5 * frob_norm_sq(r);
  out.penalty = reg.lambda * evaluate_regularizer(c, reg);
  out.total = out.residual + out.penalty;
  return out;
}

// ---------------------------------------------------------------------------
// prox of step * ||.||_p on a nonnegative spectrum. For p in (1, inf) away
// from the closed forms, the stationarity system
//   y_i + s * y_i^(p-1) = v_i,   s = step / ||y||_p^(p-1)
// is solved by bisection on the scalar s with an inner per-coordinate
// bisection; the zero solution is detected by the dual-norm test.
// ---------------------------------------------------------------------------

namespace {

double solve_coordinate(double v, double s, double p) {
  if (v <= 0.0) return 0.0;
  double lo = 0.0, hi = v;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = mid + s * std::pow(mid, p - 1.0) - v;
    if (f > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-16 * v) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> prox_lp_vector(const std::vector<double>& v, double step, double p) {
  const size_t n = v.size();
  std::vector<double> y(n, 0.0);
  if (step <= 0.0) return v;
  if (p == 1.0) {
    for (size_t i = 0; i < n; ++i) y[i] = std::max(v[i] - step, 0.0);
    return y;
  }
  if (p == 2.0) {
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm <= step) return y;
    double scale = 1.0 - step / nrm;
    for (size_t i = 0; i < n; ++i) y[i] = scale * v[i];
    return y;
  }

  double q = p / (p - 1.0);
  double dual = 0.0;
  for (double x : v) dual += std::pow(x, q);
  dual = std::pow(dual, 1.0 / q);
  if (dual <= step) return y;  // 0 is optimal

  auto residual = [&](double s) {
    double tp = 0.0;
    for (size_t i = 0; i < n; ++i) {
      y[i] = solve_coordinate(v[i], s, p);
      tp += std::pow(y[i], p);
    }
    double t = std::pow(tp, 1.0 / p);
    return s * std::pow(t, p - 1.0) - step;
  };

  double lo = 0.0, hi = 1.0;
  while (residual(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  residual(0.5 * (lo + hi));  // leave y at the midpoint solution
  return y;
}

Matrix prox(const Matrix& c, double step, const Regularizer& reg) {
  if (step <= 0.0) throw ValidationError("prox: step must be positive");
  const double kappa = step * reg.lambda;
  Matrix w = c;
  switch (reg.kind) {
    case RegKind::SSC:
      for (double& v : w.data) v = soft(v, kappa);
      break;
    case RegKind::EnSC: {
      double scale = 1.0 / (1.0 + 2.0 * kappa * reg.tau_en);
      for (double& v : w.data) v = soft(v, kappa) * scale;
      break;
    }
    case RegKind::Frobenius:
      w *= 1.0 / (1.0 + kappa);
      break;
    case RegKind::Nuclear: {
      SvdResult dec = svd(c);
      std::vector<double> s = dec.s;
      for (double& v : s) v = std::max(v - kappa, 0.0);
      Matrix us = dec.u;
      for (int j = 0; j < us.cols; ++j)
        for (int i = 0; i < us.rows; ++i) us(i, j) *= s[j];
      w = us * dec.vt;
      break;
    }
    case RegKind::SchattenP: {
      SvdResult dec = svd(c);
      std::vector<double> s = prox_lp_vector(dec.s, kappa, reg.p);
      Matrix us = dec.u;
      for (int j = 0; j < us.cols; ++j)
        for (int i = 0; i < us.rows; ++i) us(i, j) *= s[j];
      w = us * dec.vt;
      break;
    }
  }
  if (reg.zero_diag) zero_diagonal(w);
  return w;
}

SolveCResult solve_c_fixed_z(const Matrix& z, const Regularizer& reg, const SolverOptions& opts) {
  if (!all_finite(z)) throw ValidationError("solve_c_fixed_z: non-finite input");
  if (opts.max_iters < 1) throw ValidationError("solve_c_fixed_z: max_iters must be >= 1");
  const int n = z.cols;

  SolveCResult out;
  out.c.zero_diag = reg.zero_diag;

  if (reg.kind == RegKind::Frobenius && !reg.zero_diag) {
    // 1/2||ZC-Z||^2 + lambda/2 ||C||^2 has the ridge solution
    // (Z^T Z + lambda I)^-1 Z^T Z.
    Matrix g = matmul_tn(z, z);
    Matrix a = g;
    for (int i = 0; i < n; ++i) a(i, i) += reg.lambda;
    out.c.c = solve_spd(a, g);
    out.converged = true;
    out.iterations = 0;
    out.objective = evaluate_f(z, out.c, reg).total;
    return out;
  }

  Matrix g = matmul_tn(z, z);  // gradient of the residual is G(C - I)
  double lip = z.rows == 0 || n == 0 ? 0.0 : spectral_norm(z);
  lip *= lip;
  out.c.c = Matrix::zeros(n, n);
  if (lip <= 1e-300) {
    out.converged = true;
    out.objective = evaluate_f(z, out.c, reg).total;
    return out;
  }
  const double step = 1.0 / lip;

  double prev = evaluate_f(z, out.c, reg).total;
  for (int it = 1; it <= opts.max_iters; ++it) {
    Matrix grad = g * out.c.c - g;
    Matrix w = out.c.c - step * grad;
    out.c.c = prox(w, step, reg);
    double obj = evaluate_f(z, out.c, reg).total;
    out.iterations = it;
    if (std::abs(prev - obj) <= opts.tolerance * std::max(1.0, std::abs(prev))) {
      out.converged = true;
      out.objective = obj;
      return out;
    }
    prev = obj;
  }
  out.converged = false;
  out.objective = prev;
  return out;
}

}  // namespace subcol
