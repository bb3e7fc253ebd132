#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "subcol/numlin.hpp"

namespace subcol {

struct LabeledDataset {
  Matrix x;                 // one sample per column
  std::vector<int> labels;  // cluster ids, contiguous from 0
  std::string description;
};

/// 2 x (2 n_per) dataset: cluster 0 samples (t, t^2), cluster 1 samples
/// (t, 1 - t^2), t uniform on [-1, 1], plus optional gaussian noise.
LabeledDataset gen_two_parabolas(int n_per, double noise_sd, uint64_t seed);

/// k random sub_dim-dimensional subspaces of R^ambient_d with pairwise
/// principal angles at least angle_min_deg (rejection sampling), n_per
/// unit-norm points on each plus optional gaussian noise.
LabeledDataset gen_union_subspaces(int ambient_d, int sub_dim, int k, int n_per,
                                   double angle_min_deg, double noise_sd, uint64_t seed);

/// Matrix CSV: first line "rows,cols", then one comma-separated line per row.
/// Values are written with 17 significant digits so finite doubles round-trip
/// bit-exactly.
void write_matrix_stream(std::ostream& os, const Matrix& m);
Matrix read_matrix_stream(std::istream& is);
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

/// Labels: one id per line.
void write_labels(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::string& path);

std::string format_double(double v);  // 17 significant digits

}  // namespace subcol
