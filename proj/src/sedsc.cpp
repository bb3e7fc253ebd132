#include "subcol/sedsc.hpp"

#include <cmath>

namespace subcol {

NormalizationScheme NormalizationScheme::dataset(double tau) {
  if (tau <= 0.0) throw ValidationError("NormalizationScheme: tau must be positive");
  return {NormKind::Dataset, tau, 0.0};
}

NormalizationScheme NormalizationScheme::channel(double tau) {
  if (tau <= 0.0) throw ValidationError("NormalizationScheme: tau must be positive");
  return {NormKind::Channel, tau, 0.0};
}

NormalizationScheme NormalizationScheme::instance_penalty(double tau, double gamma2) {
  if (tau <= 0.0) throw ValidationError("NormalizationScheme: tau must be positive");
  if (gamma2 < 0.0) throw ValidationError("NormalizationScheme: gamma2 must be nonnegative");
  return {NormKind::InstancePenalty, tau, gamma2};
}

void TrainConfig::validate() const {
  if (lr <= 0.0) throw ValidationError("TrainConfig: lr must be positive");
  if (pretrain_iters < 1 || joint_iters < 1)
    throw ValidationError("TrainConfig: iteration counts must be >= 1");
  if (hidden < 1) throw ValidationError("TrainConfig: hidden width must be >= 1");
  if (gamma < 0.0) throw ValidationError("TrainConfig: gamma must be nonnegative");
  if (embed_dim < 0) throw ValidationError("TrainConfig: embed_dim must be nonnegative");
}

Matrix apply_normalization(const Matrix& y, const NormalizationScheme& scheme,
                           bool* zero_row_flag) {
  if (zero_row_flag) *zero_row_flag = false;
  switch (scheme.kind) {
    case NormKind::None:
    case NormKind::InstancePenalty:
      return y;
    case NormKind::Dataset: {
      double nrm = frob_norm(y);
      if (nrm <= 0.0) {
        if (zero_row_flag) *zero_row_flag = true;
        return y;
      }
      return (std::sqrt(scheme.tau) / nrm) * y;
    }
    case NormKind::Channel: {
      Matrix z = y;
      const double target = std::sqrt(scheme.tau / y.rows);
      for (int i = 0; i < y.rows; ++i) {
        double nrm = std::sqrt(row_norm_sq(y, i));
        if (nrm <= 0.0) {
          if (zero_row_flag) *zero_row_flag = true;
          continue;  // an all-zero row stays zero
        }
        double f = target / nrm;
        for (int j = 0; j < y.cols; ++j) z(i, j) *= f;
      }
      return z;
    }
  }
  throw ValidationError("apply_normalization: unknown scheme");
}

namespace {

// Pull dL/dZ back through the renormalization layer to dL/dY.
Matrix normalization_backward(const Matrix& y, const Matrix& dz,
                              const NormalizationScheme& scheme) {
  switch (scheme.kind) {
    case NormKind::None:
    case NormKind::InstancePenalty:
      return dz;
    case NormKind::Dataset: {
      double nsq = frob_norm_sq(y);
      if (nsq <= 0.0) return Matrix::zeros(y.rows, y.cols);
      double c = std::sqrt(scheme.tau) / std::sqrt(nsq);
      double ip = dot(dz, y);
      Matrix dy = dz;
      double f = ip / nsq;
      for (size_t i = 0; i < dy.data.size(); ++i) dy.data[i] = c * (dz.data[i] - f * y.data[i]);
      return dy;
    }
    case NormKind::Channel: {
      Matrix dy(y.rows, y.cols);
      const double target = std::sqrt(scheme.tau / y.rows);
      for (int i = 0; i < y.rows; ++i) {
        double nsq = row_norm_sq(y, i);
        if (nsq <= 0.0) continue;
        double c = target / std::sqrt(nsq);
        double ip = 0.0;
        for (int j = 0; j < y.cols; ++j) ip += dz(i, j) * y(i, j);
        double f = ip / nsq;
        for (int j = 0; j < y.cols; ++j) dy(i, j) = c * (dz(i, j) - f * y(i, j));
      }
      return dy;
    }
  }
  throw ValidationError("normalization_backward: unknown scheme");
}

struct JointForward {
  LayerCache enc;
  Matrix z;  // normalized embedding
  Matrix s;  // z * c
  LayerCache dec;
  double recon = 0.0;
  double f_residual = 0.0;
  double inst_penalty = 0.0;
  bool zero_row = false;
};

JointForward joint_forward(const Matrix& x, const AutoencoderParams& p, const Matrix& c,
                           const TrainConfig& cfg) {
  JointForward f;
  f.enc = two_layer_forward(x, p.enc_w1, p.enc_b1, p.enc_w2, p.enc_b2);
  f.z = apply_normalization(f.enc.out, cfg.norm, &f.zero_row);
  f.s = f.z * c;
  f.dec = two_layer_forward(f.s, p.dec_w1, p.dec_b1, p.dec_w2, p.dec_b2);
  f.recon = frob_norm_sq(x - f.dec.out);
  f.f_residual = 0.5 * frob_norm_sq(f.s - f.z);
  if (cfg.norm.kind == NormKind::InstancePenalty && cfg.norm.gamma2 != 0.0) {
    for (int j = 0; j < f.z.cols; ++j) {
      double d = col_norm_sq(f.z, j) - cfg.norm.tau;
      f.inst_penalty += cfg.norm.gamma2 * d * d;
    }
  }
  return f;
}

Gradients joint_backward(const Matrix& x, const AutoencoderParams& p, const Matrix& c,
                         const TrainConfig& cfg, const JointForward& f, bool want_c) {
  Matrix dxhat = 2.0 * (f.dec.out - x);
  LayerGrads dg = two_layer_backward(f.s, p.dec_w1, p.dec_w2, f.dec, dxhat);
  Matrix& ds = dg.input;

  Matrix resid = f.s - f.z;
  Matrix dz = matmul_nt(ds, c) + cfg.gamma * (matmul_nt(resid, c) - resid);
  if (cfg.norm.kind == NormKind::InstancePenalty && cfg.norm.gamma2 != 0.0) {
    for (int j = 0; j < f.z.cols; ++j) {
      double fac = 4.0 * cfg.norm.gamma2 * (col_norm_sq(f.z, j) - cfg.norm.tau);
      for (int i = 0; i < f.z.rows; ++i) dz(i, j) += fac * f.z(i, j);
    }
  }

  Matrix dy = normalization_backward(f.enc.out, dz, cfg.norm);
  LayerGrads eg = two_layer_backward(x, p.enc_w1, p.enc_w2, f.enc, dy);

  Gradients out;
  out.enc_w1 = std::move(eg.w1);
  out.enc_b1 = std::move(eg.b1);
  out.enc_w2 = std::move(eg.w2);
  out.enc_b2 = std::move(eg.b2);
  out.dec_w1 = std::move(dg.w1);
  out.dec_b1 = std::move(dg.b1);
  out.dec_w2 = std::move(dg.w2);
  out.dec_b2 = std::move(dg.b2);
  if (want_c) {
    out.c = matmul_tn(f.z, cfg.gamma * resid + ds);
    out.has_c = true;
  }
  return out;
}

void apply_step(AutoencoderParams& p, const Gradients& g, double lr) {
  auto upd = [lr](Matrix& w, const Matrix& gw) {
    for (size_t i = 0; i < w.data.size(); ++i) w.data[i] -= lr * gw.data[i];
  };
  upd(p.enc_w1, g.enc_w1);
  upd(p.enc_b1, g.enc_b1);
  upd(p.enc_w2, g.enc_w2);
  upd(p.enc_b2, g.enc_b2);
  upd(p.dec_w1, g.dec_w1);
  upd(p.dec_b1, g.dec_b1);
  upd(p.dec_w2, g.dec_w2);
  upd(p.dec_b2, g.dec_b2);
}

// Diagonal-metric (Adam) state for one tensor.
struct AdamSlot {
  std::vector<double> m, v;

  void init(size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
  void accumulate(const Matrix& g, double b1, double b2) {
    for (size_t i = 0; i < g.data.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g.data[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g.data[i] * g.data[i];
    }
  }
  // bc1/bc2 are the hoisted bias corrections 1 - beta^t.
  void apply(Matrix& w, double lr, double bc1, double bc2, double eps) const {
    for (size_t i = 0; i < w.data.size(); ++i)
      w.data[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
};

struct AdamState {
  AdamSlot slots[9];  // 8 parameter tensors + C
  long t = 0;

  void init(const AutoencoderParams& p, const Matrix* c) {
    const Matrix* ts[8] = {&p.enc_w1, &p.enc_b1, &p.enc_w2, &p.enc_b2,
                           &p.dec_w1, &p.dec_b1, &p.dec_w2, &p.dec_b2};
    for (int i = 0; i < 8; ++i) slots[i].init(ts[i]->size());
    if (c) slots[8].init(c->size());
  }

  void step(AutoencoderParams& p, Matrix* c, const Gradients& g, const TrainConfig& cfg) {
    ++t;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
    Matrix* ws[8] = {&p.enc_w1, &p.enc_b1, &p.enc_w2, &p.enc_b2,
                     &p.dec_w1, &p.dec_b1, &p.dec_w2, &p.dec_b2};
    const Matrix* gs[8] = {&g.enc_w1, &g.enc_b1, &g.enc_w2, &g.enc_b2,
                           &g.dec_w1, &g.dec_b1, &g.dec_w2, &g.dec_b2};
    for (int i = 0; i < 8; ++i) {
      slots[i].accumulate(*gs[i], cfg.adam_beta1, cfg.adam_beta2);
      slots[i].apply(*ws[i], cfg.lr, bc1, bc2, cfg.adam_eps);
    }
    if (c && g.has_c) {
      slots[8].accumulate(g.c, cfg.adam_beta1, cfg.adam_beta2);
      slots[8].apply(*c, cfg.lr, bc1, bc2, cfg.adam_eps);
    }
  }

  // Soft-threshold C in the same diagonal metric as the gradient step, so the
  // prox matches the per-coordinate step sizes; the diagonal is projected
  // back to zero exactly afterwards when required.
  void prox_c(Matrix& c, const TrainConfig& cfg) const {
    const double kappa = cfg.lr * cfg.gamma * cfg.reg.lambda;
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
    const AdamSlot& s = slots[8];
    switch (cfg.reg.kind) {
      case RegKind::SSC:
      case RegKind::EnSC: {
        for (size_t i = 0; i < c.data.size(); ++i) {
          double th = kappa / (std::sqrt(s.v[i] / bc2) + cfg.adam_eps);
          double x = c.data[i];
          x = x > th ? x - th : (x < -th ? x + th : 0.0);
          if (cfg.reg.kind == RegKind::EnSC) x /= 1.0 + 2.0 * th * cfg.reg.tau_en;
          c.data[i] = x;
        }
        break;
      }
      default: {
        // spectral penalties: fall back to the scalar-step prox with the
        // average effective step
        double mean_scale = 0.0;
        for (size_t i = 0; i < s.v.size(); ++i)
          mean_scale += 1.0 / (std::sqrt(s.v[i] / bc2) + cfg.adam_eps);
        mean_scale /= static_cast<double>(s.v.size());
        Regularizer unit = cfg.reg;
        c = prox(c, cfg.lr * cfg.gamma * mean_scale, unit);
        break;
      }
    }
    if (cfg.reg.zero_diag)
      for (int i = 0; i < c.rows; ++i) c(i, i) = 0.0;
  }
};

bool state_blew_up(const AutoencoderParams& p, double recon) {
  if (!std::isfinite(recon) || recon > 1e12) return true;
  return !all_finite(p.enc_w1) || !all_finite(p.enc_w2) || !all_finite(p.dec_w1) ||
         !all_finite(p.dec_w2);
}

}  // namespace

double joint_smooth_objective(const Matrix& x, const AutoencoderParams& p,
                              const SelfExpression& c, const TrainConfig& cfg) {
  JointForward f = joint_forward(x, p, c.c, cfg);
  return cfg.gamma * f.f_residual + f.recon + f.inst_penalty;
}

double joint_objective(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                       const TrainConfig& cfg) {
  return joint_smooth_objective(x, p, c, cfg) +
         cfg.gamma * cfg.reg.lambda * evaluate_regularizer(c, cfg.reg);
}

Gradients joint_gradients(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                          const TrainConfig& cfg) {
  JointForward f = joint_forward(x, p, c.c, cfg);
  return joint_backward(x, p, c.c, cfg, f, true);
}

PretrainResult pretrain(const Matrix& x, const TrainConfig& cfg) {
  cfg.validate();
  if (!all_finite(x)) throw ValidationError("pretrain: non-finite input");
  const int d_x = x.rows;
  const int d_embed = cfg.embed_dim == 0 ? d_x : cfg.embed_dim;

  Rng rng(cfg.seed);
  PretrainResult out;
  out.params = init_params(d_x, cfg.hidden, d_embed, cfg.hidden, rng);

  TrainConfig pre = cfg;
  pre.gamma = 0.0;  // reconstruction only, C pinned at the identity
  Matrix c_eye = Matrix::identity(x.cols);
  SelfExpression c_id{c_eye, false};

  AdamState adam;
  if (cfg.optimizer == Optimizer::ProxAdam) adam.init(out.params, nullptr);

  for (int it = 1; it <= cfg.pretrain_iters; ++it) {
    JointForward f = joint_forward(x, out.params, c_eye, pre);
    Gradients g = joint_backward(x, out.params, c_eye, pre, f, false);

    TraceRow row;
    row.iteration = it;
    row.recon_loss = f.recon;
    row.z_frob = frob_norm(f.z);
    row.grad_norm = std::sqrt(g.squared_norm());
    row.norm_zero_row = f.zero_row;
    row.metrics = degeneracy_metrics(f.z, c_id);
    out.trace.rows.push_back(row);

    if (state_blew_up(out.params, f.recon)) {
      out.trace.aborted = true;
      out.trace.abort_reason = "pretrain diverged at iteration " + std::to_string(it);
      return out;
    }
    if (cfg.optimizer == Optimizer::ProxAdam)
      adam.step(out.params, nullptr, g, pre);
    else
      apply_step(out.params, g, cfg.lr);
  }
  return out;
}

SolveCResult init_c(const Matrix& z, const Regularizer& reg, const SolverOptions& opts) {
  return solve_c_fixed_z(z, reg, opts);
}

JointResult train_joint(const Matrix& x, const AutoencoderParams& p0, const SelfExpression& c0,
                        const TrainConfig& cfg) {
  cfg.validate();
  p0.check_consistent();
  if (c0.c.rows != x.cols || c0.c.cols != x.cols)
    throw ValidationError("train_joint: C size must match the sample count");

  JointResult out;
  out.params = p0;
  out.c = c0;
  out.c.zero_diag = cfg.reg.zero_diag;

  const double prox_step = cfg.lr * cfg.gamma;

  AdamState adam;
  if (cfg.optimizer == Optimizer::ProxAdam) adam.init(out.params, &out.c.c);

  for (int it = 1; it <= cfg.joint_iters; ++it) {
    JointForward f = joint_forward(x, out.params, out.c.c, cfg);
    Gradients g = joint_backward(x, out.params, out.c.c, cfg, f, true);

    TraceRow row;
    row.iteration = it;
    row.recon_loss = f.recon;
    row.f_residual = f.f_residual;
    row.f_penalty = cfg.reg.lambda * evaluate_regularizer(out.c, cfg.reg);
    row.z_frob = frob_norm(f.z);
    row.grad_norm = std::sqrt(g.squared_norm());
    row.norm_zero_row = f.zero_row;
    row.metrics = degeneracy_metrics(f.z, out.c);
    out.trace.rows.push_back(row);

    if (state_blew_up(out.params, f.recon) || !all_finite(out.c.c)) {
      out.trace.aborted = true;
      out.trace.abort_reason = "joint training diverged at iteration " + std::to_string(it);
      return out;
    }

    if (cfg.optimizer == Optimizer::ProxAdam) {
      adam.step(out.params, &out.c.c, g, cfg);
      if (prox_step > 0.0)
        adam.prox_c(out.c.c, cfg);
      else if (cfg.reg.zero_diag)
        for (int i = 0; i < out.c.c.rows; ++i) out.c.c(i, i) = 0.0;
    } else {
      apply_step(out.params, g, cfg.lr);
      for (size_t i = 0; i < out.c.c.data.size(); ++i) out.c.c.data[i] -= cfg.lr * g.c.data[i];
      if (prox_step > 0.0) {
        out.c.c = prox(out.c.c, prox_step, cfg.reg);
      } else if (cfg.reg.zero_diag) {
        for (int i = 0; i < out.c.c.rows; ++i) out.c.c(i, i) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace subcol
