#pragma once

#include <cstdint>
#include <filesystem>

#include "vfa/common.hpp"

namespace vfa {

struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(size_t r, size_t c) { return a[r * cols + c]; }
  double operator()(size_t r, size_t c) const { return a[r * cols + c]; }
};

Vec matvec(const Matrix& m, const Vec& x);

enum class EncoderKind { Linear, OneHidden };

/// Small stand-in encoder: a linear map, or one tanh hidden layer.
struct Encoder {
  EncoderKind kind = EncoderKind::Linear;
  Matrix w1;  // Linear: d x d_raw; OneHidden: h x d_raw
  Matrix w2;  // OneHidden only: d x h
  bool output_normalize = false;

  size_t input_dim() const { return w1.cols; }
  size_t output_dim() const {
    return kind == EncoderKind::Linear ? w1.rows : w2.rows;
  }
};

Vec encode(const Encoder& enc, const Vec& raw);

struct TrainConfig {
  double tau = 0.1;
  int batch_size = 64;
  double learning_rate = 0.5;
  int epochs = 200;
  uint64_t seed = 0;
  bool normalize_in_loss = true;
  bool symmetric_loss = false;
  EncoderKind encoder_kind = EncoderKind::Linear;
  int embed_dim = 16;
  int hidden_dim = 32;     // OneHidden only
  bool tie_output = false; // share the final linear map across branches
};

/// Softmax-contrastive loss over same-identity voice-face rows:
///   -(1/N) sum_i log( exp(z_vi . z_fi / tau) / sum_j exp(z_vi . z_fj / tau) )
/// Row i of both inputs must belong to the same identity. When `normalize`,
/// embeddings are unit-normalized first. `symmetric` averages the
/// voice-anchored and face-anchored directions.
double scc_loss(const std::vector<Vec>& voice_embs,
                const std::vector<Vec>& face_embs, double tau, bool normalize,
                bool symmetric = false);

struct SccGradient {
  std::vector<Vec> voice;
  std::vector<Vec> face;
};

/// Loss plus its exact gradient with respect to the (pre-normalization)
/// inputs.
double scc_loss_grad(const std::vector<Vec>& voice_embs,
                     const std::vector<Vec>& face_embs, double tau,
                     bool normalize, SccGradient& grad, bool symmetric = false);

/// 1 - cos(v, f); distance-like, in [0, 2], lower = better match.
double initial_score(const Vec& v_emb, const Vec& f_emb);

struct TrainResult {
  Encoder voice;
  Encoder face;
  std::vector<double> epoch_loss;
};

/// Mini-batch gradient descent on the SCC loss over same-identity
/// voice-face pairs. Deterministic per config.seed.
TrainResult train_encoders(const std::vector<EmbeddingRecord>& raw_voice,
                           const std::vector<EmbeddingRecord>& raw_face,
                           const TrainConfig& config);

/// Seeded random encoder with the same init scheme training starts from.
Encoder random_encoder(EncoderKind kind, size_t d_raw, size_t embed_dim,
                       size_t hidden_dim, uint64_t seed, bool output_normalize);

// Checkpoint format: "#scc-encoder v1" header, kind, normalize flag, then
// each weight matrix row-major at full round-trip precision.
void save_encoder(const std::filesystem::path& path, const Encoder& enc);
Encoder load_encoder(const std::filesystem::path& path);

}  // namespace vfa
