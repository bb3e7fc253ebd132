#pragma once

#include <iosfwd>
#include <string>

#include "subcol/numlin.hpp"
#include "subcol/selfexpress.hpp"

namespace subcol {

/// Single-hidden-layer affine+ReLU encoder and decoder:
///   encode(X) = W_e2 (W_e1 X + b_e1 1^T)_+ + b_e2 1^T
///   decode(S) = W_d2 (W_d1 S + b_d1 1^T)_+ + b_d2 1^T
/// Biases are stored as column vectors.
struct AutoencoderParams {
  Matrix enc_w1, enc_b1, enc_w2, enc_b2;
  Matrix dec_w1, dec_b1, dec_w2, dec_b2;

  int input_dim() const { return enc_w1.cols; }
  int hidden_dim() const { return enc_w1.rows; }
  int embed_dim() const { return enc_w2.rows; }
  int dec_hidden_dim() const { return dec_w1.rows; }
  int output_dim() const { return dec_w2.rows; }

  void check_consistent() const;
};

/// Seeded uniform init on [-s, s] with s = 1/sqrt(fan_in) per layer.
AutoencoderParams init_params(int d_x, int hidden, int d_embed, int hidden_dec, Rng& rng);

Matrix encode(const Matrix& x, const AutoencoderParams& p);
Matrix decode(const Matrix& z, const AutoencoderParams& p);

struct LossWeights {
  double gamma = 1.0;        // weight of the self-expressive residual
  double gamma2 = 0.0;       // instance-penalty weight
  double inst_target = 1.0;  // target squared norm per embedded point
};

struct Gradients {
  Matrix enc_w1, enc_b1, enc_w2, enc_b2;
  Matrix dec_w1, dec_b1, dec_w2, dec_b2;
  Matrix c;
  bool has_c = false;

  double squared_norm() const;
};

/// Loss the gradients below differentiate:
///   gamma/2 ||ZC - Z||_F^2 + ||X - decode(ZC)||_F^2
///   + gamma2 * sum_i (||Z_i||^2 - inst_target)^2,  Z = encode(X).
double autoenc_objective(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                         const LossWeights& w);

/// Exact gradients of the loss above with respect to all parameters and,
/// when want_c is set, the coefficients C. ReLU subgradient at 0 is 0.
Gradients backprop(const Matrix& x, const AutoencoderParams& p, const SelfExpression& c,
                   const LossWeights& w, bool want_c = true);

/// Scale the encoder's final affine layer by alpha and the decoder's first
/// linear weight by 1/alpha. decode(encode(X)) is unchanged while
/// ||encode(X)||_F picks up the factor alpha.
AutoencoderParams scaling_attack(const AutoencoderParams& p, double alpha);

/// Bias/scale policy for identity_construction.
enum class BetaPolicy {
  TauCalibrated,  // hidden biases shifted positive, beta = tau / ||W_e2 b_e1||
  UnitBeta,       // zero hidden bias (input must be nonnegative), beta = 1
};

/// Weights for which all embedded points sit within O(alpha) of a single
/// point of norm about tau while the decoder still reproduces X exactly.
/// Requires square data (embedding dimension equals input dimension) and
/// hidden width at least the input dimension.
AutoencoderParams identity_construction(const Matrix& x, double tau, double alpha,
                                        BetaPolicy policy = BetaPolicy::TauCalibrated,
                                        int hidden = -1);

/// Per-tensor CSV blocks, each preceded by a name line and a shape header.
void write_params(std::ostream& os, const AutoencoderParams& p);
AutoencoderParams read_params(std::istream& is);
void write_params_file(const std::string& path, const AutoencoderParams& p);
AutoencoderParams read_params_file(const std::string& path);

// Layer-level pieces shared with the joint trainer.
struct LayerCache {
  Matrix a;    // pre-activation
  Matrix h;    // relu(a)
  Matrix out;  // w2 h + b2
};
LayerCache two_layer_forward(const Matrix& in, const Matrix& w1, const Matrix& b1,
                             const Matrix& w2, const Matrix& b2);
struct LayerGrads {
  Matrix w1, b1, w2, b2;
  Matrix input;  // gradient with respect to the layer input
};
LayerGrads two_layer_backward(const Matrix& in, const Matrix& w1, const Matrix& w2,
                              const LayerCache& cache, const Matrix& dout);

}  // namespace subcol
