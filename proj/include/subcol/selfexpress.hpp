#pragma once

#include <vector>

#include "subcol/numlin.hpp"

namespace subcol {

enum class RegKind { SSC, EnSC, Frobenius, Nuclear, SchattenP };

/// Choice of penalty theta(C) with weight lambda. SSC and EnSC always carry
/// the zero-diagonal constraint; the spectral kinds may opt in.
struct Regularizer {
  RegKind kind = RegKind::SSC;
  double lambda = 1.0;
  double tau_en = 1.0;  // EnSC quadratic weight
  double p = 2.0;       // Schatten exponent, p >= 1
  bool zero_diag = true;

  static Regularizer ssc(double lambda);
  static Regularizer ensc(double lambda, double tau_en = 1.0);
  static Regularizer frobenius(double lambda, bool zero_diag = false);
  static Regularizer nuclear(double lambda, bool zero_diag = false);
  static Regularizer schatten(double lambda, double p, bool zero_diag = false);
};

struct SelfExpression {
  Matrix c;
  bool zero_diag = false;
};

struct FValue {
  double total = 0.0;
  double residual = 0.0;  // 1/2 ||ZC - Z||_F^2
  double penalty = 0.0;   // lambda * theta(C)
};

/// Objective of the self-expressive problem at (z, c).
FValue evaluate_f(const Matrix& z, const SelfExpression& c, const Regularizer& reg);

/// theta(C) without the lambda weight. Returns +inf when a required
/// zero-diagonal constraint is violated.
double evaluate_regularizer(const SelfExpression& c, const Regularizer& reg);

/// argmin_W 1/2 ||W - C||_F^2 + step * lambda * theta(W), with the diagonal
/// projected to zero when the regularizer requires it.
Matrix prox(const Matrix& c, double step, const Regularizer& reg);

/// lp norm of a nonnegative spectrum.
double schatten_norm(const std::vector<double>& s, double p);

/// Proximal map of step * ||.||_p on a nonnegative vector (used on spectra).
std::vector<double> prox_lp_vector(const std::vector<double>& v, double step, double p);

struct SolverOptions {
  int max_iters = 2000;
  double tolerance = 1e-10;
};

struct SolveCResult {
  SelfExpression c;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
};

/// Minimize F(z, C) over C with z held fixed. Frobenius without the
/// zero-diagonal constraint uses the closed-form ridge solve; everything else
/// runs proximal gradient with the exact Lipschitz step 1/||Z^T Z||_2.
SolveCResult solve_c_fixed_z(const Matrix& z, const Regularizer& reg,
                             const SolverOptions& opts = {});

}  // namespace subcol
