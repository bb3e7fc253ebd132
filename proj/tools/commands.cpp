#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "log.hpp"
#include "subcol/autoenc.hpp"
#include "subcol/oracles.hpp"
#include "svg.hpp"

namespace subcol::cli {

namespace fs = std::filesystem;

namespace {

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(IoError::Kind::OpenFailed, "cannot create output dir: " + dir);
}

}  // namespace

void write_trace_csv(const std::string& path, const TrainTrace& trace) {
  std::ofstream os(path);
  if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot open for write: " + path);
  os << "iteration,recon_loss,f_residual,f_penalty,z_frob,grad_norm,norm_zero_row,"
        "norm_concentration,top1_sv_ratio,min_pair_gap,c_top2_mass\n";
  for (const TraceRow& r : trace.rows) {
    os << r.iteration << "," << format_double(r.recon_loss) << "," << format_double(r.f_residual)
       << "," << format_double(r.f_penalty) << "," << format_double(r.z_frob) << ","
       << format_double(r.grad_norm) << "," << (r.norm_zero_row ? 1 : 0) << ","
       << format_double(r.metrics.norm_concentration) << ","
       << format_double(r.metrics.top1_sv_ratio) << "," << format_double(r.metrics.min_pair_gap)
       << "," << format_double(r.metrics.c_top2_mass) << "\n";
  }
  os.flush();
  if (!os) throw IoError(IoError::Kind::OpenFailed, "write failed: " + path);
}

TrainTrace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open for read: " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError(IoError::Kind::BadHeader, "trace: missing header");
  TrainTrace trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    TraceRow r;
    int zero_row = 0;
    int got = std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%d,%lf,%lf,%lf,%lf", &r.iteration,
                          &r.recon_loss, &r.f_residual, &r.f_penalty, &r.z_frob, &r.grad_norm,
                          &zero_row, &r.metrics.norm_concentration, &r.metrics.top1_sv_ratio,
                          &r.metrics.min_pair_gap, &r.metrics.c_top2_mass);
    if (got != 11) throw IoError(IoError::Kind::BadToken, "trace: bad row '" + line + "'");
    r.norm_zero_row = zero_row != 0;
    trace.rows.push_back(r);
  }
  return trace;
}

int cmd_generate(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  LabeledDataset ds = cfg.data.generate();
  write_matrix(cfg.out_dir + "/data.csv", ds.x);
  write_labels(cfg.out_dir + "/labels.csv", ds.labels);
  SUBCOL_INFO("generate: wrote %dx%d data and %zu labels to %s", ds.x.rows, ds.x.cols,
              ds.labels.size(), cfg.out_dir.c_str());
  std::printf("generated %s: %d x %d -> %s\n", ds.description.c_str(), ds.x.rows, ds.x.cols,
              cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_train(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  Matrix x = read_matrix(cfg.data_path());
  SUBCOL_INFO("train: loaded %dx%d data from %s", x.rows, x.cols, cfg.data_path().c_str());

  PretrainResult pre = pretrain(x, cfg.train);
  if (pre.trace.aborted) {
    SUBCOL_ERROR("train: %s", pre.trace.abort_reason.c_str());
    write_trace_csv(cfg.out_dir + "/trace_pretrain.csv", pre.trace);
    throw NumericalError(pre.trace.abort_reason);
  }
  Matrix z_init = apply_normalization(encode(x, pre.params), cfg.train.norm);
  write_matrix(cfg.out_dir + "/z_init.csv", z_init);
  write_trace_csv(cfg.out_dir + "/trace_pretrain.csv", pre.trace);

  SolveCResult c0 = init_c(z_init, cfg.train.reg, cfg.train.c_solver);
  SUBCOL_INFO("train: C init %s after %d iterations, objective %.6g",
              c0.converged ? "converged" : "not converged", c0.iterations, c0.objective);

  JointResult joint = train_joint(x, pre.params, c0.c, cfg.train);
  write_trace_csv(cfg.out_dir + "/trace.csv", joint.trace);
  if (joint.trace.aborted) {
    SUBCOL_ERROR("train: %s", joint.trace.abort_reason.c_str());
    throw NumericalError(joint.trace.abort_reason);
  }

  write_params_file(cfg.out_dir + "/params.csv", joint.params);
  write_matrix(cfg.out_dir + "/c.csv", joint.c.c);
  Matrix z_final = apply_normalization(encode(x, joint.params), cfg.train.norm);
  write_matrix(cfg.out_dir + "/z_final.csv", z_final);

  const TraceRow& last = joint.trace.rows.back();
  std::printf("trained %d iterations: recon %.6g, F-residual %.6g, penalty %.6g, |Z|_F %.6g\n",
              last.iteration, last.recon_loss, last.f_residual, last.f_penalty, last.z_frob);
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg) {
  (void)cfg;
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("%-34s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++failures;
  };
  char buf[160];

  {
    DegenerateSolution s = thm2_canonical(6, 2, 1.0, SchemeP::P1, 42);
    double feas = max_abs_diff(s.z_star * s.c_star.c, s.z_star);
    bool diag_ok = true;
    for (int i = 0; i < 6; ++i) diag_ok = diag_ok && s.c_star.c(i, i) == 0.0;
    std::snprintf(buf, sizeof(buf), "l1=%.12f feas=%.2e", s.objective, feas);
    report("thm2 canonical feasibility", std::abs(s.objective - 2.0) < 1e-12 && feas < 1e-12 &&
           diag_ok && std::abs(frob_norm_sq(s.z_star) - 1.0) < 1e-12, buf);
  }
  {
    BruteForceResult bf = thm2_bruteforce(3, 6, 4, 11);
    std::snprintf(buf, sizeof(buf), "best=%.9f over %ld candidates", bf.best_l1, bf.candidates);
    report("thm2 brute force (N=3)", bf.best_l1 >= 2.0 - 1e-6, buf);
  }
  {
    BruteForceResult bf = thm2_bruteforce(4, 4, 3, 12);
    std::snprintf(buf, sizeof(buf), "best=%.9f over %ld candidates", bf.best_l1, bf.candidates);
    report("thm2 brute force (N=4)", bf.best_l1 >= 2.0 - 1e-6, buf);
  }
  {
    BruteForceResult rs = thm2_random_search(4, 20000, 13);
    std::snprintf(buf, sizeof(buf), "best=%.9f over %ld candidates", rs.best_l1, rs.candidates);
    report("thm2 random search (N=4)", rs.best_l1 >= 2.0 - 1e-6, buf);
  }
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    DegenerateSolution s = thm3_canonical(3, 2, 1.0, p, 5);
    double feas = max_abs_diff(s.z_star * s.c_star.c, s.z_star);
    double best = thm3_random_search_min(3, p, 20000, 17);
    std::snprintf(buf, sizeof(buf), "p=%.1f |C|_Sp=%.10f search_best=%.8f feas=%.2e", p,
                  s.objective, best, feas);
    report("thm3 canonical + search", std::abs(s.objective - 1.0) < 1e-10 &&
           best >= 1.0 - 1e-6 && feas < 1e-12, buf);
  }
  {
    Rng rng(3);
    Matrix zm = random_gaussian(3, 6, rng);
    for (int j = 0; j < 6; ++j) {
      double nrm = std::sqrt(col_norm_sq(zm, j));
      for (int i = 0; i < 3; ++i) zm(i, j) /= nrm;
    }
    Matrix zv = get_col(zm, 2);
    MinL1Result dup = lemma1_min_l1(zm, zv);
    std::snprintf(buf, sizeof(buf), "duplicate case value=%.8f", dup.value);
    report("lemma1 duplicate column", dup.feasible && std::abs(dup.value - 1.0) < 1e-4, buf);
  }
  {
    Matrix zm(2, 2);
    zm(0, 0) = 1.0;
    zm(1, 1) = 1.0;
    Matrix zv(2, 1);
    zv(0, 0) = std::sqrt(0.5);
    zv(1, 0) = std::sqrt(0.5);
    MinL1Result r = lemma1_min_l1(zm, zv);
    std::snprintf(buf, sizeof(buf), "value=%.8f (expect sqrt 2)", r.value);
    report("lemma1 2-D analytic case", r.feasible && std::abs(r.value - std::sqrt(2.0)) < 1e-3,
           buf);
  }
  {
    DegenerateSolution s = thm2_canonical(5, 2, 1.0, SchemeP::P1, 0);
    Thm4Report rep = thm4_check(s.z_star, s.c_star, 0.5, 1e-8);
    // only the two duplicate columns satisfy the instance-norm pairing
    bool pair_ok = rep.columns[0].has_duplicate && rep.columns[1].has_duplicate;
    report("thm4 checker on thm2 pair", pair_ok && !rep.is_degenerate,
           "duplicate pair found, zero columns rejected");
  }

  if (failures > 0) {
    std::printf("%d oracle check(s) failed\n", failures);
    return kExitNumerical;
  }
  std::printf("all oracle checks passed\n");
  return kExitOk;
}

int cmd_cluster(const ExperimentConfig& cfg) {
  Matrix c = read_matrix(cfg.out_dir + "/c.csv");
  std::vector<int> truth = read_labels(cfg.labels_path());
  if (static_cast<int>(truth.size()) != c.rows)
    throw ValidationError("cluster: label count " + std::to_string(truth.size()) +
                          " does not match C size " + std::to_string(c.rows));
  SelfExpression se{c, false};

  double acc[2] = {0.0, 0.0};
  for (int mode = 0; mode < 2; ++mode) {
    PostprocessConfig pp = cfg.post.pp;
    pp.enabled = mode == 0;
    pp.sim_rank = std::min(pp.sim_rank, c.rows);
    Matrix m = postprocess_c(se, pp);
    Affinity a = affinity(m);
    std::vector<int> labels = spectral_cluster(a, cfg.post.clusters, cfg.post.cluster_seed);
    acc[mode] = accuracy(labels, truth);
    write_labels(cfg.out_dir + (mode == 0 ? "/labels_post.csv" : "/labels_raw.csv"), labels);
  }
  std::printf("clustering accuracy: %.4f with post-processing, %.4f without\n", acc[0], acc[1]);
  return kExitOk;
}

int cmd_report(const ExperimentConfig& cfg) {
  TrainTrace trace = read_trace_csv(cfg.out_dir + "/trace.csv");
  if (trace.rows.empty()) throw ValidationError("report: trace is empty");
  Matrix z_init = read_matrix(cfg.out_dir + "/z_init.csv");
  Matrix z_final = read_matrix(cfg.out_dir + "/z_final.csv");
  Matrix c = read_matrix(cfg.out_dir + "/c.csv");
  std::vector<int> labels = read_labels(cfg.labels_path());
  if (static_cast<int>(labels.size()) != z_final.cols)
    throw ValidationError("report: label count does not match embedding");

  // (a) |Z|_F against iteration
  std::vector<double> znorm;
  znorm.reserve(trace.rows.size());
  for (const TraceRow& r : trace.rows) znorm.push_back(r.z_frob);
  write_series_svg(cfg.out_dir + "/report_z_norm.svg", znorm, "|Z|_F over training", true);

  // (b) per-class singular values of the final embedding, normalized
  int k = 0;
  for (int v : labels) k = std::max(k, v + 1);
  std::vector<std::vector<double>> profiles;
  for (int cls = 0; cls < k; ++cls) {
    std::vector<int> cols;
    for (int j = 0; j < z_final.cols; ++j)
      if (labels[j] == cls) cols.push_back(j);
    if (cols.empty()) continue;
    Matrix sub(z_final.rows, static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
      for (int i = 0; i < z_final.rows; ++i) sub(i, static_cast<int>(j)) = z_final(i, cols[j]);
    SvdResult dec = svd(sub);
    std::vector<double> prof;
    double s0 = dec.s.empty() || dec.s[0] <= 0 ? 1.0 : dec.s[0];
    for (double s : dec.s) prof.push_back(s / s0);
    profiles.push_back(std::move(prof));
  }
  write_singular_values_svg(cfg.out_dir + "/report_singular_values.svg", profiles,
                            "per-class singular values (normalized)");

  // (c) embedded scatter before/after joint training
  write_scatter_svg(cfg.out_dir + "/report_embedding.svg", z_init, "after pretraining", z_final,
                    "after joint training", "embedded points");

  // (d) |C| heatmap, linear + log color scales
  SelfExpression se{c, false};
  DegeneracyMetrics dm = degeneracy_metrics(z_final, se);
  Matrix c_abs = c;
  for (double& v : c_abs.data) v = std::abs(v);
  write_heatmap_svg(cfg.out_dir + "/report_c_heatmap.svg", c_abs, dm.c_top2_mass);

  // summary CSV of the degeneracy metrics
  {
    std::ofstream os(cfg.out_dir + "/report_metrics.csv");
    if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot write report_metrics.csv");
    os << "norm_concentration,top1_sv_ratio,min_pair_gap,c_top2_mass\n"
       << format_double(dm.norm_concentration) << "," << format_double(dm.top1_sv_ratio) << ","
       << format_double(dm.min_pair_gap) << "," << format_double(dm.c_top2_mass) << "\n";
  }

  std::printf("report: 4 SVG plots and metrics summary written to %s\n", cfg.out_dir.c_str());
  std::printf("final metrics: norm_concentration=%.4f top1_sv_ratio=%.4f c_top2_mass=%.4f\n",
              dm.norm_concentration, dm.top1_sv_ratio, dm.c_top2_mass);
  return kExitOk;
}

int run_guarded(int (*cmd)(const ExperimentConfig&), const ExperimentConfig& cfg) {
  try {
    return cmd(cfg);
  } catch (const ValidationError& e) {
    SUBCOL_ERROR("validation: %s", e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const IoError& e) {
    SUBCOL_ERROR("io: %s", e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const NumericalError& e) {
    SUBCOL_ERROR("numerical: %s", e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}

}  // namespace subcol::cli
