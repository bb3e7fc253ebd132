#include "subcol/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace subcol {

void PostprocessConfig::validate(int n) const {
  if (keep_threshold <= 0.0 || keep_threshold > 1.0)
    throw ValidationError("PostprocessConfig: keep_threshold must be in (0, 1]");
  if (sim_rank < 1 || sim_rank > n)
    throw ValidationError("PostprocessConfig: sim_rank must be in [1, N]");
  if (power < 1.0) throw ValidationError("PostprocessConfig: power must be >= 1");
}

Matrix postprocess_c(const SelfExpression& c, const PostprocessConfig& cfg) {
  const int n = c.c.rows;
  if (c.c.cols != n) throw ValidationError("postprocess_c: C must be square");
  if (!cfg.enabled) {
    Matrix out = c.c;
    for (double& v : out.data) v = std::abs(v);
    return out;
  }
  cfg.validate(n);

  // 1) per-column mass thresholding
  Matrix t = c.c;
  if (cfg.keep_threshold < 1.0) {
    for (int j = 0; j < n; ++j) {
      std::vector<std::pair<double, int>> entries(n);
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        entries[i] = {std::abs(t(i, j)), i};
        total += entries[i].first;
      }
      if (total <= 0.0) continue;
      std::stable_sort(entries.begin(), entries.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      double cum = 0.0;
      size_t keep = 0;
      while (keep < entries.size() && cum < cfg.keep_threshold * total)
        cum += entries[keep++].first;
      std::vector<char> kept(n, 0);
      for (size_t k = 0; k < keep; ++k) kept[entries[k].second] = 1;
      for (int i = 0; i < n; ++i)
        if (!kept[i]) t(i, j) = 0.0;
    }
  }

  // 2) shape-interaction matrix from the rank-sim_rank left factor
  SvdResult dec = svd(t);
  Matrix ur(n, cfg.sim_rank);
  for (int j = 0; j < cfg.sim_rank; ++j)
    for (int i = 0; i < n; ++i) ur(i, j) = dec.u(i, j);
  for (int i = 0; i < n; ++i) {
    double nrm = std::sqrt(row_norm_sq(ur, i));
    if (nrm > 1e-12)
      for (int j = 0; j < cfg.sim_rank; ++j) ur(i, j) /= nrm;
  }
  Matrix m = matmul_nt(ur, ur);

  // 3) entrywise power on |.|
  for (double& v : m.data) v = std::pow(std::abs(v), cfg.power);
  return m;
}

Affinity affinity(const Matrix& c_processed) {
  const int n = c_processed.rows;
  if (c_processed.cols != n) throw ValidationError("affinity: input must be square");
  Affinity out;
  out.a = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.a(i, j) = 0.5 * (std::abs(c_processed(i, j)) + std::abs(c_processed(j, i)));
  for (int i = 0; i < n; ++i) out.a(i, i) = 0.0;
  return out;
}

namespace {

struct KmeansRun {
  std::vector<int> labels;
  double objective = std::numeric_limits<double>::infinity();
};

double sq_dist_row(const Matrix& x, int i, const Matrix& centers, int c) {
  double s = 0.0;
  for (int j = 0; j < x.cols; ++j) {
    double d = x(i, j) - centers(c, j);
    s += d * d;
  }
  return s;
}

KmeansRun kmeans_once(const Matrix& x, int k, Rng& rng) {
  const int n = x.rows;
  Matrix centers(k, x.cols);

  // k-means++ seeding
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  int first = rng.uniform_int(0, n - 1);
  for (int j = 0; j < x.cols; ++j) centers(0, j) = x(first, j);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], sq_dist_row(x, i, centers, c - 1));
      total += dist[i];
    }
    int pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += dist[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_int(0, n - 1);
    }
    for (int j = 0; j < x.cols; ++j) centers(c, j) = x(pick, j);
  }

  KmeansRun run;
  run.labels.assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist_row(x, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        double d = sq_dist_row(x, i, centers, c);
        if (d < bd) {  // ties keep the lowest-index centroid
          bd = d;
          best = c;
        }
      }
      if (run.labels[i] != best) {
        run.labels[i] = best;
        changed = true;
      }
    }
    // recompute centers; an empty cluster is reseeded from the farthest point
    Matrix sums(k, x.cols);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      ++counts[run.labels[i]];
      for (int j = 0; j < x.cols; ++j) sums(run.labels[i], j) += x(i, j);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (int j = 0; j < x.cols; ++j) centers(c, j) = sums(c, j) / counts[c];
      } else {
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = sq_dist_row(x, i, centers, run.labels[i]);
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        for (int j = 0; j < x.cols; ++j) centers(c, j) = x(far, j);
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
  }

  run.objective = 0.0;
  for (int i = 0; i < n; ++i) run.objective += sq_dist_row(x, i, centers, run.labels[i]);
  return run;
}

}  // namespace

std::vector<int> spectral_cluster(const Affinity& aff, int k, uint64_t seed) {
  const Matrix& a = aff.a;
  const int n = a.rows;
  if (a.cols != n) throw ValidationError("spectral_cluster: affinity must be square");
  if (k < 1 || k > n) throw ValidationError("spectral_cluster: k must be in [1, N]");

  constexpr double kDegreeFloor = 1e-12;
  std::vector<double> dinv(n);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a(i, j);
    dinv[i] = 1.0 / std::sqrt(std::max(deg, kDegreeFloor));
  }
  Matrix lap(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) lap(i, j) = -dinv[i] * a(i, j) * dinv[j];
    lap(i, i) += 1.0;
  }
  // symmetrize away rounding before the eigensolve
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (lap(i, j) + lap(j, i));
      lap(i, j) = v;
      lap(j, i) = v;
    }

  EighResult eig = eigh(lap);
  Matrix rows(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) rows(i, j) = eig.vectors(i, j);
  for (int i = 0; i < n; ++i) {
    double nrm = std::sqrt(row_norm_sq(rows, i));
    if (nrm > 1e-12)
      for (int j = 0; j < k; ++j) rows(i, j) /= nrm;
  }

  Rng rng(seed);
  KmeansRun best;
  for (int restart = 0; restart < 20; ++restart) {
    KmeansRun run = kmeans_once(rows, k, rng);
    // lexicographic (objective, restart index): strict < keeps the earliest
    if (run.objective < best.objective) best = run;
  }
  return best.labels;
}

double accuracy(const std::vector<int>& labels, const std::vector<int>& ground_truth) {
  if (labels.size() != ground_truth.size())
    throw ValidationError("accuracy: label vectors differ in length");
  if (labels.empty()) throw ValidationError("accuracy: empty labels");
  int k = 0;
  for (int v : labels) {
    if (v < 0) throw ValidationError("accuracy: negative label");
    k = std::max(k, v + 1);
  }
  for (int v : ground_truth) {
    if (v < 0) throw ValidationError("accuracy: negative label");
    k = std::max(k, v + 1);
  }

  // confusion[i][j]: predicted i, truth j; maximize the matched mass
  std::vector<std::vector<double>> conf(k, std::vector<double>(k, 0.0));
  for (size_t t = 0; t < labels.size(); ++t) conf[labels[t]][ground_truth[t]] += 1.0;

  // Hungarian algorithm (shortest augmenting paths) on cost = max - conf
  double cmax = 0.0;
  for (auto& row : conf)
    for (double v : row) cmax = std::max(cmax, v);
  const int nn = k;
  std::vector<std::vector<double>> cost(nn, std::vector<double>(nn, 0.0));
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) cost[i][j] = cmax - conf[i][j];

  std::vector<double> u(nn + 1, 0.0), v(nn + 1, 0.0);
  std::vector<int> match(nn + 1, 0), way(nn + 1, 0);
  for (int i = 1; i <= nn; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(nn + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(nn + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= nn; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= nn; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  double correct = 0.0;
  for (int j = 1; j <= nn; ++j)
    if (match[j] > 0) correct += conf[match[j] - 1][j - 1];
  return correct / static_cast<double>(labels.size());
}

}  // namespace subcol
