#pragma once

#include <vector>

#include "subcol/numlin.hpp"
#include "subcol/selfexpress.hpp"

namespace subcol {

struct PostprocessConfig {
  double keep_threshold = 0.9;  // fraction of per-column l1 mass kept
  int sim_rank = 8;             // rank of the shape-interaction SVD
  double power = 2.0;           // entrywise exponent on the final matrix
  bool enabled = true;

  void validate(int n) const;
};

/// Hard-threshold each column to the largest entries carrying keep_threshold
/// of its l1 mass, form the row-normalized shape-interaction matrix
/// |U_r U_r^T| from a rank sim_rank SVD, then raise it entrywise to `power`.
/// Disabled: returns |C| unchanged.
Matrix postprocess_c(const SelfExpression& c, const PostprocessConfig& cfg);

struct Affinity {
  Matrix a;  // symmetric, nonnegative, zero diagonal
};

/// A = (|M| + |M|^T) / 2 with the diagonal zeroed.
Affinity affinity(const Matrix& c_processed);

/// Normalized-Laplacian spectral clustering: bottom-k eigenvectors of
/// I - D^{-1/2} A D^{-1/2}, rows normalized, seeded k-means++ with 20
/// restarts. Labels in [0, k).
std::vector<int> spectral_cluster(const Affinity& a, int k, uint64_t seed);

/// Fraction of points correctly labeled under the best permutation matching
/// of predicted to ground-truth clusters (Hungarian on the confusion matrix).
double accuracy(const std::vector<int>& labels, const std::vector<int>& ground_truth);

}  // namespace subcol
