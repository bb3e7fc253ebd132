#pragma once

#include <vector>

#include "subcol/numlin.hpp"
#include "subcol/selfexpress.hpp"

namespace subcol {

/// Which norm constraint binds the embedding: whole-matrix (P1) or per-row (P2).
enum class SchemeP { P1, P2 };

enum class TheoremTag { T1, T2, T3, T4 };

struct DegenerateSolution {
  Matrix z_star;
  SelfExpression c_star;
  double objective = 0.0;
  TheoremTag tag = TheoremTag::T1;
};

/// Signed permutation matrix (one +-1 per row and column). seed 0 gives the
/// identity; any other seed draws a random permutation and signs.
Matrix signed_permutation(int n, uint64_t seed);

/// Z* = B Q^T where Q spans the left singular subspace of C*-I at the
/// smallest singular value. b_choice must lie in the constraint set for the
/// scheme; it is validated and rejected otherwise.
Matrix thm1_optimal_z(const SelfExpression& c_star, double tau, SchemeP scheme,
                      const Matrix& b_choice, double tol = 1e-8);

/// Minimum of 1/2 ||Z(C*-I)||_F^2 over `trials` random Z with ||Z||_F^2 = tau.
double thm1_random_search(const SelfExpression& c_star, int d, double tau, long trials,
                          uint64_t seed);

/// Two-point solution: Z* = [z z 0 ...] P, C* = P^T ([[0,1],[1,0]] ⊕ 0) P,
/// with z chosen to satisfy both norm schemes at equality. ||C*||_1 = 2.
DegenerateSolution thm2_canonical(int n, int d, double tau, SchemeP scheme, uint64_t perm_seed);

/// Rank-one solution: C* = q q^T for a unit q (seed 0 gives q = e1),
/// Z* = z q^T. ||C*||_Sp = 1 for every p.
DegenerateSolution thm3_canonical(int n, int d, double tau, double p, uint64_t q_seed);

struct MinL1Result {
  double value = 0.0;  // +inf when infeasible
  bool feasible = false;
  double residual = 0.0;
  Matrix coeffs;
};

/// min ||c||_1 subject to z_vec = z_mat c, by a lasso homotopy sweep
/// (lambda 1e-2 down to 1e-8) followed by a least-squares polish on the
/// recovered support. All columns must share the norm of z_vec.
MinL1Result lemma1_min_l1(const Matrix& z_mat, const Matrix& z_vec);

struct Thm4ColumnReport {
  int column = 0;
  int partner = -1;          // nearest +-duplicate
  double duplicate_gap = 0;  // min over sign of ||Z_i -+ Z_partner||
  bool has_duplicate = false;
  double c_l1 = 0.0;  // ||C_i||_1 for column i
  bool c_l1_ok = false;
  bool support_ok = true;  // every nonzero C_{j,i} pairs column i with a duplicate j
};

struct Thm4Report {
  bool is_degenerate = false;
  std::vector<Thm4ColumnReport> columns;
};

/// Checks the paired-duplicate structure: every column has a +-duplicate
/// within tol*sqrt(tau), every ||C_i||_1 is within tol of 1, and every entry
/// of C above tol links two +-duplicate columns.
Thm4Report thm4_check(const Matrix& z, const SelfExpression& c, double tau, double tol);

struct DegeneracyMetrics {
  double norm_concentration = 0.0;  // share of sum ||Z_i||^2 in the top-2 columns
  double top1_sv_ratio = 0.0;       // sigma_1^2 / sum sigma_i^2 of Z
  double min_pair_gap = 0.0;        // min_i min_{j!=i,sign} ||Z_i -+ Z_j|| / ||Z_i||
  double c_top2_mass = 0.0;         // share of ||C||_1 in the two largest entries
};
DegeneracyMetrics degeneracy_metrics(const Matrix& z, const SelfExpression& c);

struct CollapseCheck {
  bool passed = false;
  int survivor_a = -1;
  int survivor_b = -1;
  double abs_cosine = 0.0;
  double max_other_frac = 0.0;  // largest non-survivor norm over the max norm
};

/// Two-point collapse test: all but two columns must have norm at most
/// small_frac of the largest column norm, and the two surviving columns must
/// be collinear with |cos| >= min_abs_cos.
CollapseCheck thm2_collapse_check(const Matrix& z, double small_frac, double min_abs_cos);

struct BruteForceResult {
  double best_l1 = 0.0;
  long candidates = 0;
};

/// Enumerates every off-diagonal support pattern of C with at most
/// max_support nonzeros, optimizes the magnitudes on the singularity manifold
/// det(C - I) = 0, and returns the best feasible ||C||_1 found.
BruteForceResult thm2_bruteforce(int n, int max_support, int starts_per_pattern, uint64_t seed);

/// Random zero-diagonal C made feasible by alternating projection onto
/// det(C - I) = 0; returns the best ||C||_1 over the verified candidates.
BruteForceResult thm2_random_search(int n, long num_candidates, uint64_t seed);

/// Random C projected onto the feasible set (C - I singular); returns the
/// smallest Schatten-p norm seen.
double thm3_random_search_min(int n, double p, long num_candidates, uint64_t seed);

}  // namespace subcol
