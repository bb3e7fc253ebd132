#pragma once

#include <string>

#include "subcol/cluster.hpp"
#include "subcol/sedsc.hpp"
#include "subcol/synthdata.hpp"

namespace subcol::cli {

struct DataConfig {
  std::string generator = "two_parabolas";  // or "union_subspaces"
  int n_per = 50;
  double noise_sd = 0.0;
  uint64_t seed = 1;
  // union_subspaces only
  int ambient_d = 2;
  int sub_dim = 1;
  int k = 2;
  double angle_min_deg = 30.0;
  // explicit input files (override the generated defaults for train/cluster)
  std::string file;
  std::string labels_file;

  LabeledDataset generate() const;
};

struct PostprocessSection {
  PostprocessConfig pp;
  int clusters = 2;
  uint64_t cluster_seed = 7;
};

/// Whole experiment configuration. Every field is optional in the JSON
/// document and carries the defaults below; unknown keys are rejected before
/// any compute starts.
struct ExperimentConfig {
  DataConfig data;
  TrainConfig train;  // regularizer/normalization/training sections
  PostprocessSection post;
  std::string out_dir = "out";

  std::string data_path() const;
  std::string labels_path() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace subcol::cli
