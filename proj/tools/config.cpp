#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace subcol::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ValidationError("config: unknown key '" + it.key() + "' in section '" + section +
                            "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(std::string("config: bad value for '") + key + "'");
    }
  }
}

Regularizer parse_regularizer(const json& obj) {
  reject_unknown(obj, "regularizer", {"kind", "lambda", "tau_en", "p", "zero_diag"});
  std::string kind = "ssc";
  double lambda = 1e-4, tau_en = 1.0, p = 2.0;
  bool zero_diag = false;
  read_field(obj, "kind", kind);
  read_field(obj, "lambda", lambda);
  read_field(obj, "tau_en", tau_en);
  read_field(obj, "p", p);
  read_field(obj, "zero_diag", zero_diag);
  if (kind == "ssc") return Regularizer::ssc(lambda);
  if (kind == "ensc") return Regularizer::ensc(lambda, tau_en);
  if (kind == "frobenius") return Regularizer::frobenius(lambda, zero_diag);
  if (kind == "nuclear") return Regularizer::nuclear(lambda, zero_diag);
  if (kind == "schatten") return Regularizer::schatten(lambda, p, zero_diag);
  throw ValidationError("config: unknown regularizer kind '" + kind + "'");
}

NormalizationScheme parse_normalization(const json& obj) {
  reject_unknown(obj, "normalization", {"scheme", "tau", "gamma2"});
  std::string scheme = "none";
  double tau = 1.0, gamma2 = 1e-4;
  read_field(obj, "scheme", scheme);
  read_field(obj, "tau", tau);
  read_field(obj, "gamma2", gamma2);
  if (scheme == "none") return NormalizationScheme::none();
  if (scheme == "dataset") return NormalizationScheme::dataset(tau);
  if (scheme == "channel") return NormalizationScheme::channel(tau);
  if (scheme == "instance") return NormalizationScheme::instance_penalty(tau, gamma2);
  throw ValidationError("config: unknown normalization scheme '" + scheme + "'");
}

}  // namespace

LabeledDataset DataConfig::generate() const {
  if (generator == "two_parabolas") return gen_two_parabolas(n_per, noise_sd, seed);
  if (generator == "union_subspaces")
    return gen_union_subspaces(ambient_d, sub_dim, k, n_per, angle_min_deg, noise_sd, seed);
  throw ValidationError("config: unknown generator '" + generator + "'");
}

std::string ExperimentConfig::data_path() const {
  return data.file.empty() ? out_dir + "/data.csv" : data.file;
}

std::string ExperimentConfig::labels_path() const {
  return data.labels_file.empty() ? out_dir + "/labels.csv" : data.labels_file;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config: document must be a JSON object");
  reject_unknown(doc, "(top level)",
                 {"data", "regularizer", "normalization", "training", "postprocess", "output"});

  ExperimentConfig cfg;

  if (doc.contains("data")) {
    const json& d = doc["data"];
    reject_unknown(d, "data",
                   {"generator", "n_per", "noise_sd", "seed", "ambient_d", "sub_dim", "k",
                    "angle_min_deg", "file", "labels_file"});
    read_field(d, "generator", cfg.data.generator);
    read_field(d, "n_per", cfg.data.n_per);
    read_field(d, "noise_sd", cfg.data.noise_sd);
    read_field(d, "seed", cfg.data.seed);
    read_field(d, "ambient_d", cfg.data.ambient_d);
    read_field(d, "sub_dim", cfg.data.sub_dim);
    read_field(d, "k", cfg.data.k);
    read_field(d, "angle_min_deg", cfg.data.angle_min_deg);
    read_field(d, "file", cfg.data.file);
    read_field(d, "labels_file", cfg.data.labels_file);
    if (cfg.data.n_per < 1) throw ValidationError("config: data.n_per must be >= 1");
    if (cfg.data.noise_sd < 0) throw ValidationError("config: data.noise_sd must be >= 0");
    if (cfg.data.generator != "two_parabolas" && cfg.data.generator != "union_subspaces")
      throw ValidationError("config: unknown generator '" + cfg.data.generator + "'");
  }

  if (doc.contains("regularizer")) cfg.train.reg = parse_regularizer(doc["regularizer"]);
  if (doc.contains("normalization")) cfg.train.norm = parse_normalization(doc["normalization"]);

  if (doc.contains("training")) {
    const json& t = doc["training"];
    reject_unknown(t, "training",
                   {"gamma", "pretrain_iters", "joint_iters", "lr", "seed", "hidden", "embed_dim",
                    "optimizer", "c_max_iters", "c_tolerance"});
    read_field(t, "gamma", cfg.train.gamma);
    read_field(t, "pretrain_iters", cfg.train.pretrain_iters);
    read_field(t, "joint_iters", cfg.train.joint_iters);
    read_field(t, "lr", cfg.train.lr);
    read_field(t, "seed", cfg.train.seed);
    read_field(t, "hidden", cfg.train.hidden);
    read_field(t, "embed_dim", cfg.train.embed_dim);
    read_field(t, "c_max_iters", cfg.train.c_solver.max_iters);
    read_field(t, "c_tolerance", cfg.train.c_solver.tolerance);
    std::string opt = "prox_adam";
    read_field(t, "optimizer", opt);
    if (opt == "prox_adam")
      cfg.train.optimizer = Optimizer::ProxAdam;
    else if (opt == "prox_gd")
      cfg.train.optimizer = Optimizer::ProxGD;
    else
      throw ValidationError("config: unknown optimizer '" + opt + "'");
    cfg.train.validate();
  }

  if (doc.contains("postprocess")) {
    const json& p = doc["postprocess"];
    reject_unknown(p, "postprocess",
                   {"enabled", "keep_threshold", "sim_rank", "power", "clusters", "cluster_seed"});
    read_field(p, "enabled", cfg.post.pp.enabled);
    read_field(p, "keep_threshold", cfg.post.pp.keep_threshold);
    read_field(p, "sim_rank", cfg.post.pp.sim_rank);
    read_field(p, "power", cfg.post.pp.power);
    read_field(p, "clusters", cfg.post.clusters);
    read_field(p, "cluster_seed", cfg.post.cluster_seed);
    if (cfg.post.clusters < 1) throw ValidationError("config: postprocess.clusters must be >= 1");
    if (cfg.post.pp.keep_threshold <= 0.0 || cfg.post.pp.keep_threshold > 1.0)
      throw ValidationError("config: postprocess.keep_threshold must be in (0, 1]");
    if (cfg.post.pp.power < 1.0) throw ValidationError("config: postprocess.power must be >= 1");
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, "output", {"dir"});
    read_field(o, "dir", cfg.out_dir);
    if (cfg.out_dir.empty()) throw ValidationError("config: output.dir must not be empty");
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace subcol::cli
