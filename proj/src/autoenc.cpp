#include "subcol/autoenc.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "subcol/synthdata.hpp"

namespace subcol {

namespace {

void add_col_bias(Matrix& m, const Matrix& b) {
  if (b.rows != m.rows || b.cols != 1) throw ValidationError("bias shape mismatch");
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) += b(i, 0);
}

Matrix relu(const Matrix& a) {
  Matrix r = a;
  for (double& v : r.data) v = v > 0.0 ? v : 0.0;
  return r;
}

Matrix row_sums(const Matrix& m) {
  Matrix s(m.rows, 1);
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols; ++j) acc += m(i, j);
    s(i, 0) = acc;
  }
  return s;
}

}  // namespace

void AutoencoderParams::check_consistent() const {
  auto want = [](const Matrix& m, int r, int c, const char* name) {
    if (m.rows != r || m.cols != c)
      throw ValidationError(std::string("AutoencoderParams: bad shape for ") + name);
  };
  int dx = input_dim(), h = hidden_dim(), d = embed_dim(), hd = dec_hidden_dim(),
      out = output_dim();
  want(enc_w1, h, dx, "enc_w1");
  want(enc_b1, h, 1, "enc_b1");
  want(enc_w2, d, h, "enc_w2");
  want(enc_b2, d, 1, "enc_b2");
  want(dec_w1, hd, d, "dec_w1");
  want(dec_b1, hd, 1, "dec_b1");
  want(dec_w2, out, hd, "dec_w2");
  want(dec_b2, out, 1, "dec_b2");
}

AutoencoderParams init_params(int d_x, int hidden, int d_embed, int hidden_dec, Rng& rng) {
  if (d_x < 1 || hidden < 1 || d_embed < 1 || hidden_dec < 1)
    throw ValidationError("init_params: dimensions must be positive");
  auto layer = [&](int rows, int cols) {
    double s = 1.0 / std::sqrt(static_cast<double>(cols));
    return random_uniform(rows, cols, -s, s, rng);
  };
  AutoencoderParams p;
  p.enc_w1 = layer(hidden, d_x);
  p.enc_b1 = layer(hidden, 1);
  p.enc_w2 = layer(d_embed, hidden);
  p.enc_b2 = layer(d_embed, 1);
  p.dec_w1 = layer(hidden_dec, d_embed);
  p.dec_b1 = layer(hidden_dec, 1);
  p.dec_w2 = layer(d_x, hidden_dec);
  p.dec_b2 = layer(d_x, 1);
  return p;
}

LayerCache two_layer_forward(const Matrix& in, const Matrix& w1, const Matrix& b1,
                             const Matrix& w2, const Matrix& b2) {
  LayerCache c;
  c.a = w1 * in;
  add_col_bias(c.a, b1);
  c.h = relu(c.a);
  c.out = w2 * c.h;
  add_col_bias(c.out, b2);
  return c;
}

LayerGrads two_layer_backward(const Matrix& in, const Matrix& w1, const Matrix& w2,
                              const LayerCache& cache, const Matrix& dout) {
  LayerGrads g;
  g.w2 = matmul_nt(dout, cache.h);
  g.b2 = row_sums(dout);
  Matrix dh = matmul_tn(w2, dout);
  // subgradient 0 at the kink
  for (size_t i = 0; i < dh.data.size(); ++i)
    if (cache.a.data[i] <= 0.0) dh.data[i] = 0.0;
  g.w1 = matmul_nt(dh, in);
  g.b1 = row_sums(dh);
  g.input = matmul_tn(w1, dh);
  return g;
}

Matrix encode(const Matrix& x, const AutoencoderParams& p) {
  if (x.rows != p.input_dim()) throw ValidationError("encode: input dimension mismatch");
  return two_layer_forward(x, p.enc_w1, p.enc_b1, p.enc_w2, p.enc_b2).out;
}

Matrix decode(const Matrix& z, const AutoencoderParams& p) {
  if (z.rows != p.embed_dim()) throw ValidationError("decode: input dimension mismatch");
  return two_layer_forward(z, p.dec_w1, p.dec_b1, p.dec_w2, p.dec_b2).out;
}

double Gradients::squared_norm() const {
  double s = frob_norm_sq(enc_w1) + frob_norm_sq(enc_b1) + frob_norm_sq(enc_w2) +
             frob_norm_sq(enc_b2) + frob_norm_sq(dec_w1) + frob_norm_sq(dec_b1) +
             frob_norm_sq(dec_w2) + frob_norm_sq(dec_b2);
  if (has_c) s += frob_norm_sq(c);
  return s;
}

double autoenc_objective(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                         const LossWeights& w) {
  p.check_consistent();
  Matrix z = encode(x, p);
  if (c.c.rows != z.cols || c.c.cols != z.cols)
    throw ValidationError("autoenc_objective: C size mismatch");
  Matrix s = z * c.c;
  Matrix xhat = decode(s, p);
  double obj = frob_norm_sq(x - xhat);
  obj += 0.5 * w.gamma * frob_norm_sq(s - z);
  if (w.gamma2 != 0.0) {
    for (int j = 0; j < z.cols; ++j) {
      double d = col_norm_sq(z, j) - w.inst_target;
      obj += w.gamma2 * d * d;
    }
  }
  return obj;
}

Gradients backprop(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                   const LossWeights& w, bool want_c) {
  p.check_consistent();
  if (x.rows != p.input_dim()) throw ValidationError("backprop: input dimension mismatch");
  LayerCache enc = two_layer_forward(x, p.enc_w1, p.enc_b1, p.enc_w2, p.enc_b2);
  const Matrix& z = enc.out;
  if (c.c.rows != z.cols || c.c.cols != z.cols)
    throw ValidationError("backprop: C size mismatch");
  Matrix s = z * c.c;
  LayerCache dec = two_layer_forward(s, p.dec_w1, p.dec_b1, p.dec_w2, p.dec_b2);

  Matrix dxhat = 2.0 * (dec.out - x);
  LayerGrads dg = two_layer_backward(s, p.dec_w1, p.dec_w2, dec, dxhat);
  Matrix& ds = dg.input;

  Matrix resid = s - z;
  Matrix dz = matmul_nt(ds, c.c) + w.gamma * (matmul_nt(resid, c.c) - resid);
  if (w.gamma2 != 0.0) {
    for (int j = 0; j < z.cols; ++j) {
      double f = 4.0 * w.gamma2 * (col_norm_sq(z, j) - w.inst_target);
      for (int i = 0; i < z.rows; ++i) dz(i, j) += f * z(i, j);
    }
  }

  LayerGrads eg = two_layer_backward(x, p.enc_w1, p.enc_w2, enc, dz);

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
    out.c = matmul_tn(z, w.gamma * resid + ds);
    out.has_c = true;
  }
  return out;
}

AutoencoderParams scaling_attack(const AutoencoderParams& p, double alpha) {
  if (alpha <= 0.0) throw ValidationError("scaling_attack: alpha must be positive");
  AutoencoderParams out = p;
  out.enc_w2 *= alpha;
  out.enc_b2 *= alpha;
  out.dec_w1 *= 1.0 / alpha;
  return out;
}

AutoencoderParams identity_construction(const Matrix& x, double tau, double alpha,
                                        BetaPolicy policy, int hidden) {
  if (tau <= 0.0) throw ValidationError("identity_construction: tau must be positive");
  if (alpha <= 0.0) throw ValidationError("identity_construction: alpha must be positive");
  const int d = x.rows;
  const int h = hidden < 0 ? d : hidden;
  if (h < d)
    throw ValidationError("identity_construction: hidden width too small to express identity");

  // W1 stacks the identity on top of zero rows, W2 selects it back.
  Matrix w1(h, d), w2(d, h);
  for (int i = 0; i < d; ++i) {
    w1(i, i) = 1.0;
    w2(i, i) = 1.0;
  }

  AutoencoderParams p;
  p.enc_w1 = alpha * w1;
  p.enc_b1 = Matrix::zeros(h, 1);

  double beta = 1.0;
  Matrix offset(d, 1);  // W_e2 b_e1
  if (policy == BetaPolicy::TauCalibrated) {
    Matrix pre = p.enc_w1 * x;
    for (int i = 0; i < h; ++i) {
      double worst = 0.0;
      for (int j = 0; j < x.cols; ++j) worst = std::max(worst, -pre(i, j));
      p.enc_b1(i, 0) = worst + 1.0;
    }
    offset = w2 * p.enc_b1;
    double nrm = frob_norm(offset);
    if (nrm <= 0.0) throw NumericalError("identity_construction: degenerate bias offset");
    beta = tau / nrm;
  } else {
    double lo = 0.0;
    for (double v : x.data) lo = std::min(lo, v);
    if (lo < 0.0)
      throw ValidationError("identity_construction: zero-bias policy needs nonnegative data");
  }
  p.enc_w2 = beta * w2;
  p.enc_b2 = Matrix::zeros(d, 1);

  // Embedded points: Z_i = alpha*beta*X_i + beta*offset.
  p.dec_w1 = (1.0 / beta) * w1;
  p.dec_b1 = Matrix::zeros(h, 1);
  Matrix z(d, x.cols);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < x.cols; ++j) z(i, j) = alpha * beta * x(i, j) + beta * offset(i, 0);
  Matrix dpre = p.dec_w1 * z;
  for (int i = 0; i < h; ++i) {
    double worst = 0.0;
    for (int j = 0; j < x.cols; ++j) worst = std::max(worst, -dpre(i, j));
    p.dec_b1(i, 0) = worst + 1.0;
  }
  p.dec_w2 = (1.0 / alpha) * w2;
  // b_d2 cancels the constant carried through the decoder hidden layer:
  // -(1/alpha) W2 (W1 offset + b_d1).
  Matrix carried = w1 * offset + p.dec_b1;
  p.dec_b2 = (-1.0 / alpha) * (w2 * carried);
  return p;
}

// ---------------------------------------------------------------------------
// Parameter serialization: a name line, then the matrix CSV block.
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kTensorNames[8] = {"enc_w1", "enc_b1", "enc_w2", "enc_b2",
                                         "dec_w1", "dec_b1", "dec_w2", "dec_b2"};

Matrix* tensor_by_index(AutoencoderParams& p, int i) {
  Matrix* ptrs[8] = {&p.enc_w1, &p.enc_b1, &p.enc_w2, &p.enc_b2,
                     &p.dec_w1, &p.dec_b1, &p.dec_w2, &p.dec_b2};
  return ptrs[i];
}

}  // namespace

void write_params(std::ostream& os, const AutoencoderParams& p) {
  AutoencoderParams copy = p;
  for (int i = 0; i < 8; ++i) {
    os << kTensorNames[i] << "\n";
    write_matrix_stream(os, *tensor_by_index(copy, i));
  }
}

AutoencoderParams read_params(std::istream& is) {
  AutoencoderParams p;
  for (int i = 0; i < 8; ++i) {
    std::string name;
    if (!std::getline(is, name))
      throw IoError(IoError::Kind::BadHeader, "params: missing tensor block");
    if (name != kTensorNames[i])
      throw IoError(IoError::Kind::BadHeader,
                    "params: expected tensor '" + std::string(kTensorNames[i]) + "', got '" +
                        name + "'");
    *tensor_by_index(p, i) = read_matrix_stream(is);
  }
  p.check_consistent();
  return p;
}

void write_params_file(const std::string& path, const AutoencoderParams& p) {
  std::ofstream os(path);
  if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot open for write: " + path);
  write_params(os, p);
  if (!os) throw IoError(IoError::Kind::OpenFailed, "write failed: " + path);
}

AutoencoderParams read_params_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open for read: " + path);
  return read_params(is);
}

}  // namespace subcol
