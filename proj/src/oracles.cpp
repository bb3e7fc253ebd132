#include "subcol/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace subcol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double l1_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += std::abs(v);
  return s;
}

}  // namespace

Matrix signed_permutation(int n, uint64_t seed) {
  Matrix p(n, n);
  if (seed == 0) {
    for (int i = 0; i < n; ++i) p(i, i) = 1.0;
    return p;
  }
  Rng rng(seed);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
  for (int i = 0; i < n; ++i) p(i, perm[i]) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return p;
}

Matrix thm1_optimal_z(const SelfExpression& c_star, double tau, SchemeP scheme,
                      const Matrix& b_choice, double tol) {
  const int n = c_star.c.rows;
  if (c_star.c.cols != n) throw ValidationError("thm1_optimal_z: C must be square");
  if (tau <= 0.0) throw ValidationError("thm1_optimal_z: tau must be positive");
  Matrix cmi = c_star.c - Matrix::identity(n);
  SigmaMinSpace space = sigma_min_space(cmi, tol);
  const int r = space.multiplicity;
  if (b_choice.cols != r)
    throw ValidationError("thm1_optimal_z: b_choice must have " + std::to_string(r) +
                          " columns (singular value multiplicity)");
  const int d = b_choice.rows;
  const bool sigma_zero = space.sigma_min <= 1e-10 * std::max(1.0, spectral_norm(cmi));
  const double slack = 1e-8 * std::max(1.0, tau);
  if (scheme == SchemeP::P1) {
    double nsq = frob_norm_sq(b_choice);
    bool ok = sigma_zero ? nsq >= tau - slack : std::abs(nsq - tau) <= slack;
    if (!ok) throw ValidationError("thm1_optimal_z: b_choice violates the P1 norm constraint");
  } else {
    for (int i = 0; i < d; ++i) {
      double nsq = row_norm_sq(b_choice, i);
      bool ok = sigma_zero ? nsq >= tau / d - slack : std::abs(nsq - tau / d) <= slack;
      if (!ok) throw ValidationError("thm1_optimal_z: b_choice violates the P2 row constraint");
    }
  }
  return matmul_nt(b_choice, space.basis);  // B Q^T
}

double thm1_random_search(const SelfExpression& c_star, int d, double tau, long trials,
                          uint64_t seed) {
  const int n = c_star.c.rows;
  Matrix cmi = c_star.c - Matrix::identity(n);
  Rng rng(seed);
  double best = kInf;
  for (long t = 0; t < trials; ++t) {
    Matrix z = random_gaussian(d, n, rng);
    double scale = std::sqrt(tau / frob_norm_sq(z));
    z *= scale;
    best = std::min(best, 0.5 * frob_norm_sq(z * cmi));
  }
  return best;
}

DegenerateSolution thm2_canonical(int n, int d, double tau, SchemeP scheme, uint64_t perm_seed) {
  if (n < 2) throw ValidationError("thm2_canonical: need n >= 2");
  if (d < 1 || tau <= 0.0) throw ValidationError("thm2_canonical: bad d or tau");
  (void)scheme;  // z below meets both schemes at equality
  const double zi = std::sqrt(tau / (2.0 * d));
  Matrix z0(d, n);
  for (int i = 0; i < d; ++i) {
    z0(i, 0) = zi;
    z0(i, 1) = zi;
  }
  Matrix c0(n, n);
  c0(0, 1) = 1.0;
  c0(1, 0) = 1.0;
  Matrix p = signed_permutation(n, perm_seed);
  DegenerateSolution out;
  out.z_star = z0 * p;
  out.c_star.c = transpose(p) * c0 * p;
  out.c_star.zero_diag = true;
  out.objective = l1_norm(out.c_star.c);
  out.tag = TheoremTag::T2;
  return out;
}

DegenerateSolution thm3_canonical(int n, int d, double tau, double p, uint64_t q_seed) {
  if (n < 1 || d < 1) throw ValidationError("thm3_canonical: need n, d >= 1");
  if (tau <= 0.0) throw ValidationError("thm3_canonical: tau must be positive");
  if (p < 1.0) throw ValidationError("thm3_canonical: p must be >= 1");
  Matrix q(n, 1);
  if (q_seed == 0) {
    q(0, 0) = 1.0;
  } else {
    Rng rng(q_seed);
    q = random_gaussian(n, 1, rng);
    double nrm = frob_norm(q);
    while (nrm < 1e-12) {
      q = random_gaussian(n, 1, rng);
      nrm = frob_norm(q);
    }
    q *= 1.0 / nrm;
  }
  Matrix z(d, 1);
  const double zi = std::sqrt(tau / d);
  for (int i = 0; i < d; ++i) z(i, 0) = zi;
  DegenerateSolution out;
  out.z_star = matmul_nt(z, q);
  out.c_star.c = matmul_nt(q, q);
  out.c_star.zero_diag = false;
  out.objective = schatten_norm(svd(out.c_star.c).s, p);
  out.tag = TheoremTag::T3;
  return out;
}

// ---------------------------------------------------------------------------
// Lemma 1 oracle: lasso homotopy then least-squares polish on the support.
// ---------------------------------------------------------------------------

MinL1Result lemma1_min_l1(const Matrix& z_mat, const Matrix& z_vec) {
  if (z_vec.cols != 1) throw ValidationError("lemma1_min_l1: z_vec must be a column");
  if (z_mat.rows != z_vec.rows) throw ValidationError("lemma1_min_l1: dimension mismatch");
  const int n = z_mat.cols;
  const double tau = frob_norm(z_vec);
  if (tau <= 0.0) throw ValidationError("lemma1_min_l1: z_vec must be nonzero");
  for (int j = 0; j < n; ++j) {
    double nrm = std::sqrt(col_norm_sq(z_mat, j));
    if (std::abs(nrm - tau) > 1e-6 * tau)
      throw ValidationError("lemma1_min_l1: columns must share the norm of z_vec");
  }

  const double feas_tol = 1e-8 * std::max(1.0, tau);
  double lip = spectral_norm(z_mat);
  lip *= lip;
  if (lip <= 0.0) return {kInf, false, tau, Matrix(n, 1)};
  const double step = 1.0 / lip;

  Matrix c(n, 1);
  for (double lam = 1e-2; lam >= 0.99e-8; lam *= 0.1) {
    double prev = kInf;
    for (int it = 0; it < 50000; ++it) {
      Matrix r = z_mat * c - z_vec;
      Matrix g = matmul_tn(z_mat, r);
      double obj = 0.5 * frob_norm_sq(r) + lam * l1_norm(c);
      if (std::abs(prev - obj) <= 1e-14 * std::max(1.0, prev) && it > 0) break;
      prev = obj;
      for (int i = 0; i < n; ++i) {
        double v = c(i, 0) - step * g(i, 0);
        double t = step * lam;
        c(i, 0) = v > t ? v - t : (v < -t ? v + t : 0.0);
      }
    }
  }

  MinL1Result out;
  out.coeffs = c;
  out.residual = frob_norm(z_mat * c - z_vec);
  out.value = l1_norm(c);
  out.feasible = out.residual <= feas_tol;

  // polish: least squares restricted to the recovered support
  std::vector<int> support;
  double cmax = max_abs(c);
  for (int i = 0; i < n; ++i)
    if (std::abs(c(i, 0)) > 1e-6 * std::max(1.0, cmax)) support.push_back(i);
  if (!support.empty()) {
    const int m = static_cast<int>(support.size());
    Matrix a(z_mat.rows, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < z_mat.rows; ++i) a(i, j) = z_mat(i, support[j]);
    Matrix ata = matmul_tn(a, a);
    for (int i = 0; i < m; ++i) ata(i, i) += 1e-12;
    Matrix atb = matmul_tn(a, z_vec);
    try {
      Matrix cs = solve_spd(ata, atb);
      Matrix full(n, 1);
      for (int j = 0; j < m; ++j) full(support[j], 0) = cs(j, 0);
      double res = frob_norm(z_mat * full - z_vec);
      double val = l1_norm(full);
      if (res <= feas_tol && (!out.feasible || val < out.value)) {
        out.coeffs = full;
        out.residual = res;
        out.value = val;
        out.feasible = true;
      }
    } catch (const NumericalError&) {
      // singular normal equations: keep the homotopy iterate
    }
  }

  if (!out.feasible) out.value = kInf;
  return out;
}

Thm4Report thm4_check(const Matrix& z, const SelfExpression& c, double tau, double tol) {
  const int n = z.cols;
  if (c.c.rows != n || c.c.cols != n) throw ValidationError("thm4_check: C size mismatch");
  if (tau <= 0.0 || tol <= 0.0) throw ValidationError("thm4_check: tau and tol must be positive");
  const double gap_tol = tol * std::sqrt(tau);

  auto pair_gap = [&](int i, int j) {
    double dm = 0.0, dp = 0.0;
    for (int r = 0; r < z.rows; ++r) {
      double a = z(r, i) - z(r, j), b = z(r, i) + z(r, j);
      dm += a * a;
      dp += b * b;
    }
    return std::sqrt(std::min(dm, dp));
  };

  Thm4Report rep;
  rep.columns.resize(n);
  rep.is_degenerate = true;
  for (int i = 0; i < n; ++i) {
    Thm4ColumnReport& col = rep.columns[i];
    col.column = i;
    col.duplicate_gap = kInf;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double g = pair_gap(i, j);
      if (g < col.duplicate_gap) {
        col.duplicate_gap = g;
        col.partner = j;
      }
    }
    col.has_duplicate = col.duplicate_gap <= gap_tol;
    double l1 = 0.0;
    for (int r = 0; r < n; ++r) l1 += std::abs(c.c(r, i));
    col.c_l1 = l1;
    col.c_l1_ok = l1 >= 1.0 - tol && l1 <= 1.0 + tol;
    col.support_ok = true;
    for (int r = 0; r < n; ++r) {
      if (r == i) continue;
      if (std::abs(c.c(r, i)) > tol && pair_gap(r, i) > gap_tol) col.support_ok = false;
    }
    if (!(col.has_duplicate && col.c_l1_ok && col.support_ok)) rep.is_degenerate = false;
  }
  return rep;
}

DegeneracyMetrics degeneracy_metrics(const Matrix& z, const SelfExpression& c) {
  const int n = z.cols;
  if (n < 2) throw ValidationError("degeneracy_metrics: need at least two columns");
  double total = frob_norm_sq(z);
  if (total <= 0.0) throw ValidationError("degeneracy_metrics: embedding is all zero");

  DegeneracyMetrics m;

  std::vector<double> colsq(n);
  for (int j = 0; j < n; ++j) colsq[j] = col_norm_sq(z, j);
  std::vector<double> sorted = colsq;
  std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());
  m.norm_concentration = (sorted[0] + sorted[1]) / total;

  SvdResult dec = svd(z);
  double ssum = 0.0;
  for (double s : dec.s) ssum += s * s;
  m.top1_sv_ratio = dec.s[0] * dec.s[0] / ssum;

  double gap = kInf;
  for (int i = 0; i < n; ++i) {
    if (colsq[i] <= 0.0) continue;
    double nrm = std::sqrt(colsq[i]);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dm = 0.0, dp = 0.0;
      for (int r = 0; r < z.rows; ++r) {
        double a = z(r, i) - z(r, j), b = z(r, i) + z(r, j);
        dm += a * a;
        dp += b * b;
      }
      gap = std::min(gap, std::sqrt(std::min(dm, dp)) / nrm);
    }
  }
  m.min_pair_gap = std::isfinite(gap) ? gap : 0.0;

  double l1 = 0.0, top1 = 0.0, top2 = 0.0;
  for (double v : c.c.data) {
    double a = std::abs(v);
    l1 += a;
    if (a > top1) {
      top2 = top1;
      top1 = a;
    } else if (a > top2) {
      top2 = a;
    }
  }
  m.c_top2_mass = l1 > 0.0 ? (top1 + top2) / l1 : 0.0;
  return m;
}

CollapseCheck thm2_collapse_check(const Matrix& z, double small_frac, double min_abs_cos) {
  const int n = z.cols;
  if (n < 3) throw ValidationError("thm2_collapse_check: need at least three columns");
  std::vector<double> nrm(n);
  for (int j = 0; j < n; ++j) nrm[j] = std::sqrt(col_norm_sq(z, j));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return nrm[a] > nrm[b]; });

  CollapseCheck out;
  out.survivor_a = order[0];
  out.survivor_b = order[1];
  double zmax = nrm[order[0]];
  if (zmax <= 0.0) return out;
  out.max_other_frac = nrm[order[2]] / zmax;

  double ip = 0.0;
  for (int r = 0; r < z.rows; ++r) ip += z(r, out.survivor_a) * z(r, out.survivor_b);
  double denom = nrm[out.survivor_a] * nrm[out.survivor_b];
  out.abs_cosine = denom > 0.0 ? std::abs(ip) / denom : 0.0;
  out.passed = out.max_other_frac <= small_frac && out.abs_cosine >= min_abs_cos;
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force searches for the two-point theorem.
// ---------------------------------------------------------------------------

namespace {

double det_small(Matrix a) {
  const int n = a.rows;
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

struct PatternProblem {
  int n = 0;
  std::vector<std::pair<int, int>> positions;

  double det_with(const std::vector<double>& vals) const {
    Matrix m = -1.0 * Matrix::identity(n);
    for (size_t k = 0; k < positions.size(); ++k)
      m(positions[k].first, positions[k].second) += vals[k];
    return det_small(m);
  }

  // det(C - I) is affine in each entry; solve entry `pivot` so det vanishes.
  bool solve_pivot(std::vector<double>& vals, int pivot) const {
    std::vector<double> v0 = vals;
    v0[pivot] = 0.0;
    double d0 = det_with(v0);
    v0[pivot] = 1.0;
    double d1 = det_with(v0);
    double a = d1 - d0;
    if (std::abs(a) < 1e-12) return false;
    vals[pivot] = -d0 / a;
    return std::isfinite(vals[pivot]) && std::abs(vals[pivot]) < 1e6;
  }

  static double l1(const std::vector<double>& vals) {
    double s = 0.0;
    for (double v : vals) s += std::abs(v);
    return s;
  }
};

// Verify a candidate really sits on the singularity manifold.
bool verify_singular(const PatternProblem& prob, const std::vector<double>& vals) {
  Matrix c(prob.n, prob.n);
  for (size_t k = 0; k < prob.positions.size(); ++k)
    c(prob.positions[k].first, prob.positions[k].second) = vals[k];
  Matrix cmi = c - Matrix::identity(prob.n);
  SvdResult dec = svd(cmi);
  return dec.s.back() <= 1e-9 * std::max(1.0, dec.s.front());
}

}  // namespace

BruteForceResult thm2_bruteforce(int n, int max_support, int starts_per_pattern, uint64_t seed) {
  if (n < 2 || n > 6) throw ValidationError("thm2_bruteforce: n must be in [2, 6]");
  std::vector<std::pair<int, int>> offdiag;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) offdiag.emplace_back(i, j);
  const int m = static_cast<int>(offdiag.size());

  Rng rng(seed);
  BruteForceResult out;
  out.best_l1 = kInf;

  for (uint32_t mask = 1; mask < (1u << m); ++mask) {
    int bits = __builtin_popcount(mask);
    if (bits > max_support) continue;
    PatternProblem prob;
    prob.n = n;
    for (int b = 0; b < m; ++b)
      if (mask & (1u << b)) prob.positions.push_back(offdiag[b]);
    const int sz = static_cast<int>(prob.positions.size());

    for (int pivot = 0; pivot < sz; ++pivot) {
      for (int start = 0; start < starts_per_pattern; ++start) {
        std::vector<double> vals(sz);
        for (int k = 0; k < sz; ++k) vals[k] = rng.uniform(-1.5, 1.5);
        if (!prob.solve_pivot(vals, pivot)) continue;
        double cur = PatternProblem::l1(vals);

        // coordinate pattern search on the free entries, re-solving the pivot
        for (int round = 0; round < 60; ++round) {
          bool improved = false;
          for (int k = 0; k < sz; ++k) {
            if (k == pivot) continue;
            for (double delta = 1.0; delta >= 1e-7; delta *= 0.5) {
              for (double sign : {-1.0, 1.0}) {
                std::vector<double> trial = vals;
                trial[k] += sign * delta;
                if (!prob.solve_pivot(trial, pivot)) continue;
                double t = PatternProblem::l1(trial);
                if (t < cur - 1e-14) {
                  cur = t;
                  vals = trial;
                  improved = true;
                }
              }
            }
          }
          if (!improved) break;
        }

        if (verify_singular(prob, vals)) {
          ++out.candidates;
          out.best_l1 = std::min(out.best_l1, cur);
        }
      }
    }
  }
  return out;
}

BruteForceResult thm2_random_search(int n, long num_candidates, uint64_t seed) {
  Rng rng(seed);
  BruteForceResult out;
  out.best_l1 = kInf;
  Matrix eye = Matrix::identity(n);
  for (long t = 0; t < num_candidates; ++t) {
    Matrix c = random_uniform(n, n, -2.0, 2.0, rng);
    for (int i = 0; i < n; ++i) c(i, i) = 0.0;
    // alternate: zero the smallest singular value of C - I, re-zero the diagonal
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      Matrix cmi = c - eye;
      SvdResult dec = svd(cmi);
      double smin = dec.s.back();
      if (smin <= 1e-10 * std::max(1.0, dec.s.front())) {
        ok = true;
        break;
      }
      const int last = static_cast<int>(dec.s.size()) - 1;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) -= smin * dec.u(i, last) * dec.vt(last, j);
      for (int i = 0; i < n; ++i) c(i, i) = 0.0;
    }
    if (!ok) continue;
    ++out.candidates;
    out.best_l1 = std::min(out.best_l1, l1_norm(c));
  }
  return out;
}

double thm3_random_search_min(int n, double p, long num_candidates, uint64_t seed) {
  Rng rng(seed);
  double best = kInf;
  Matrix eye = Matrix::identity(n);
  for (long t = 0; t < num_candidates; ++t) {
    Matrix c = random_uniform(n, n, -2.0, 2.0, rng);
    Matrix cmi = c - eye;
    SvdResult dec = svd(cmi);
    // zero the smallest singular value so Z = ZC admits a nonzero Z
    const int last = static_cast<int>(dec.s.size()) - 1;
    double smin = dec.s[last];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) -= smin * dec.u(i, last) * dec.vt(last, j);
    best = std::min(best, schatten_norm(svd(c).s, p));
  }
  return best;
}

}  // namespace subcol
