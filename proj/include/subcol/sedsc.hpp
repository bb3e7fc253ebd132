#pragma once

#include <string>
#include <vector>

#include "subcol/autoenc.hpp"
#include "subcol/numlin.hpp"
#include "subcol/oracles.hpp"
#include "subcol/selfexpress.hpp"

namespace subcol {

enum class NormKind { None, Dataset, Channel, InstancePenalty };

/// How the embedding magnitude is controlled during training. Dataset and
/// Channel act as exact renormalization layers on the encoder output;
/// InstancePenalty adds gamma2 * sum_i (||Z_i||^2 - tau)^2 to the objective.
struct NormalizationScheme {
  NormKind kind = NormKind::None;
  double tau = 1.0;
  double gamma2 = 0.0;

  static NormalizationScheme none() { return {NormKind::None, 1.0, 0.0}; }
  static NormalizationScheme dataset(double tau);
  static NormalizationScheme channel(double tau);
  static NormalizationScheme instance_penalty(double tau, double gamma2);
};

/// Optimizer for both training phases. ProxAdam (diagonal-metric steps with
/// matching per-coordinate prox thresholds on C) is the default: plain
/// gradient descent stalls in a non-degenerate stationary point on the
/// synthetic problems at any stable step size. ProxGD is the plain
/// fixed-step proximal gradient variant.
enum class Optimizer { ProxGD, ProxAdam };

struct TrainConfig {
  double gamma = 2.0;
  Regularizer reg = Regularizer::ssc(1e-4);
  NormalizationScheme norm = NormalizationScheme::none();
  int pretrain_iters = 2000;
  int joint_iters = 10000;
  double lr = 1e-3;
  uint64_t seed = 0;
  int hidden = 100;
  int embed_dim = 0;  // 0: same as the input dimension
  Optimizer optimizer = Optimizer::ProxAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  SolverOptions c_solver{2000, 1e-9};

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double recon_loss = 0.0;
  double f_residual = 0.0;
  double f_penalty = 0.0;  // lambda * theta(C)
  double z_frob = 0.0;
  double grad_norm = 0.0;
  bool norm_zero_row = false;  // Channel scheme hit an all-zero row
  DegeneracyMetrics metrics;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  bool aborted = false;
  std::string abort_reason;
};

/// Renormalization layer used by the Dataset and Channel schemes. Identity
/// for None and InstancePenalty. A zero Channel row stays zero and is flagged
/// through zero_row_flag when provided.
Matrix apply_normalization(const Matrix& y, const NormalizationScheme& scheme,
                           bool* zero_row_flag = nullptr);

/// Full smooth-plus-penalty objective of one joint state, with Z the
/// normalized encoder output:
///   gamma/2 ||ZC - Z||^2 + ||X - decode(ZC)||^2
///   + gamma2 sum_i (||Z_i||^2 - tau)^2 + gamma * lambda * theta(C).
double joint_objective(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                       const TrainConfig& cfg);
double joint_smooth_objective(const Matrix& x, const AutoencoderParams& p,
                              const SelfExpression& c, const TrainConfig& cfg);

/// Exact gradients of the smooth part with respect to all autoencoder
/// parameters and C, with gradients flowing through the renormalization.
Gradients joint_gradients(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                          const TrainConfig& cfg);

struct PretrainResult {
  AutoencoderParams params;
  TrainTrace trace;
};

/// Reconstruction-only training (the self-expressive term off, C at the
/// identity), deterministic for a fixed seed.
PretrainResult pretrain(const Matrix& x, const TrainConfig& cfg);

/// C initialization from a fixed embedding: solve_c_fixed_z on z.
SolveCResult init_c(const Matrix& z, const Regularizer& reg, const SolverOptions& opts = {});

struct JointResult {
  AutoencoderParams params;
  SelfExpression c;
  TrainTrace trace;
};

/// Proximal-gradient joint training: per iteration a gradient step on all
/// parameters and C for the smooth terms, then the prox of the (gamma-
/// weighted) regularizer on C.
JointResult train_joint(const Matrix& x, const AutoencoderParams& p0, const SelfExpression& c0,
                        const TrainConfig& cfg);

}  // namespace subcol
