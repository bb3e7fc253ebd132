#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "log.hpp"

using namespace subcol::cli;

int main(int argc, char** argv) {
  CLI::App app{"self-expressive subspace clustering toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir_override;
  std::string norm_override;
  std::string post_override;
  int64_t seed_override = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out-dir", out_dir_override, "output directory override");
    sub->add_option("--seed", seed_override, "training seed override");
    sub->add_option("--norm-scheme", norm_override,
                    "normalization override: none|dataset|channel|instance");
    sub->add_option("--post-process", post_override, "post-processing override: on|off");
  };

  CLI::App* c_gen = app.add_subcommand("generate", "write a synthetic dataset");
  CLI::App* c_train = app.add_subcommand("train", "pretrain, initialize C, joint training");
  CLI::App* c_verify = app.add_subcommand("verify", "run the theorem oracle suite");
  CLI::App* c_cluster = app.add_subcommand("cluster", "spectral clustering with and without post-processing");
  CLI::App* c_report = app.add_subcommand("report", "SVG plots and metric summary from a run");
  for (CLI::App* sub : {c_gen, c_train, c_verify, c_cluster, c_report}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    if (seed_override >= 0) {
      cfg.train.seed = static_cast<uint64_t>(seed_override);
      cfg.data.seed = static_cast<uint64_t>(seed_override);
    }
    if (!norm_override.empty()) {
      double tau = cfg.train.norm.tau;
      double gamma2 = cfg.train.norm.gamma2 > 0 ? cfg.train.norm.gamma2 : 1e-4;
      if (norm_override == "none")
        cfg.train.norm = subcol::NormalizationScheme::none();
      else if (norm_override == "dataset")
        cfg.train.norm = subcol::NormalizationScheme::dataset(tau);
      else if (norm_override == "channel")
        cfg.train.norm = subcol::NormalizationScheme::channel(tau);
      else if (norm_override == "instance")
        cfg.train.norm = subcol::NormalizationScheme::instance_penalty(tau, gamma2);
      else
        throw subcol::ValidationError("unknown --norm-scheme '" + norm_override + "'");
    }
    if (!post_override.empty()) {
      if (post_override == "on")
        cfg.post.pp.enabled = true;
      else if (post_override == "off")
        cfg.post.pp.enabled = false;
      else
        throw subcol::ValidationError("--post-process must be 'on' or 'off'");
    }
  } catch (const subcol::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const subcol::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }

  if (c_gen->parsed()) return run_guarded(cmd_generate, cfg);
  if (c_train->parsed()) return run_guarded(cmd_train, cfg);
  if (c_verify->parsed()) return run_guarded(cmd_verify, cfg);
  if (c_cluster->parsed()) return run_guarded(cmd_cluster, cfg);
  if (c_report->parsed()) return run_guarded(cmd_report, cfg);
  return kExitValidation;
}
