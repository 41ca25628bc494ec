#include "vfa/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "vfa/vectorstore.hpp"

namespace vfa {

Vec matvec(const Matrix& m, const Vec& x) {
  if (x.size() != m.cols) {
    throw NumericError("matvec: dimension mismatch");
  }
  Vec out(m.rows, 0.0);
  for (size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    const double* row = m.a.data() + r * m.cols;
    for (size_t c = 0; c < m.cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return out;
}

Vec encode(const Encoder& enc, const Vec& raw) {
  if (raw.size() != enc.input_dim()) {
    throw NumericError("encode: raw dimension " + std::to_string(raw.size()) +
                       " does not match encoder input " +
                       std::to_string(enc.input_dim()));
  }
  Vec out = matvec(enc.w1, raw);
  if (enc.kind == EncoderKind::OneHidden) {
    for (double& v : out) v = std::tanh(v);
    out = matvec(enc.w2, out);
  }
  if (enc.output_normalize) out = normalize(out);
  return out;
}

namespace {

void validate_loss_inputs(const std::vector<Vec>& v, const std::vector<Vec>& f,
                          double tau) {
  if (tau <= 0.0) throw NumericError("scc_loss: tau must be positive");
  if (v.empty() || v.size() != f.size()) {
    throw NumericError("scc_loss: need equal, nonzero voice/face counts");
  }
  const size_t d = v[0].size();
  for (const Vec& x : v) {
    if (x.size() != d) throw NumericError("scc_loss: mixed dimensions");
  }
  for (const Vec& x : f) {
    if (x.size() != d) throw NumericError("scc_loss: mixed dimensions");
  }
}

/// Shared forward/backward pass; grad output is optional.
double scc_core(const std::vector<Vec>& voice_in, const std::vector<Vec>& face_in,
                double tau, bool normalize_inputs, bool symmetric,
                SccGradient* grad) {
  validate_loss_inputs(voice_in, face_in, tau);
  const size_t n = voice_in.size();

  std::vector<Vec> zv(n), zf(n);
  for (size_t i = 0; i < n; ++i) {
    zv[i] = normalize_inputs ? normalize(voice_in[i]) : voice_in[i];
    zf[i] = normalize_inputs ? normalize(face_in[i]) : face_in[i];
  }

  // scaled dot-product matrix s_ij = z_vi . z_fj / tau
  std::vector<double> s(n * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) s[i * n + j] = dot(zv[i], zf[j]) / tau;
  }

  // coeff_ij accumulates dL/ds_ij * (1/tau factor applied later)
  std::vector<double> coeff;
  if (grad) coeff.assign(n * n, 0.0);

  double loss_rows = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double m = s[i * n];
    for (size_t j = 1; j < n; ++j) m = std::max(m, s[i * n + j]);
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += std::exp(s[i * n + j] - m);
    const double lse = m + std::log(sum);
    loss_rows += lse - s[i * n + i];
    if (grad) {
      for (size_t j = 0; j < n; ++j) {
        double p = std::exp(s[i * n + j] - m) / sum;
        if (j == i) p -= 1.0;
        coeff[i * n + j] += p;
      }
    }
  }
  double loss = loss_rows / static_cast<double>(n);

  if (symmetric) {
    double loss_cols = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double m = s[j];
      for (size_t i = 1; i < n; ++i) m = std::max(m, s[i * n + j]);
      double sum = 0.0;
      for (size_t i = 0; i < n; ++i) sum += std::exp(s[i * n + j] - m);
      const double lse = m + std::log(sum);
      loss_cols += lse - s[j * n + j];
      if (grad) {
        for (size_t i = 0; i < n; ++i) {
          double p = std::exp(s[i * n + j] - m) / sum;
          if (i == j) p -= 1.0;
          coeff[i * n + j] += p;
        }
      }
    }
    loss = 0.5 * (loss + loss_cols / static_cast<double>(n));
  }

  if (grad) {
    const double scale =
        (symmetric ? 0.5 : 1.0) / (static_cast<double>(n) * tau);
    const size_t d = zv[0].size();
    grad->voice.assign(n, Vec(d, 0.0));
    grad->face.assign(n, Vec(d, 0.0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        const double c = coeff[i * n + j] * scale;
        if (c == 0.0) continue;
        for (size_t t = 0; t < d; ++t) {
          grad->voice[i][t] += c * zf[j][t];
          grad->face[j][t] += c * zv[i][t];
        }
      }
    }
    if (normalize_inputs) {
      // chain through z = x/|x|:  g_x = (g_z - (g_z . z) z) / |x|
      for (size_t i = 0; i < n; ++i) {
        const double nv = norm(voice_in[i]);
        const double gv_dot = dot(grad->voice[i], zv[i]);
        for (size_t t = 0; t < zv[i].size(); ++t) {
          grad->voice[i][t] = (grad->voice[i][t] - gv_dot * zv[i][t]) / nv;
        }
        const double nf = norm(face_in[i]);
        const double gf_dot = dot(grad->face[i], zf[i]);
        for (size_t t = 0; t < zf[i].size(); ++t) {
          grad->face[i][t] = (grad->face[i][t] - gf_dot * zf[i][t]) / nf;
        }
      }
    }
  }
  return loss;
}

}  // namespace

double scc_loss(const std::vector<Vec>& voice_embs,
                const std::vector<Vec>& face_embs, double tau, bool normalize,
                bool symmetric) {
  return scc_core(voice_embs, face_embs, tau, normalize, symmetric, nullptr);
}

double scc_loss_grad(const std::vector<Vec>& voice_embs,
                     const std::vector<Vec>& face_embs, double tau,
                     bool normalize, SccGradient& grad, bool symmetric) {
  return scc_core(voice_embs, face_embs, tau, normalize, symmetric, &grad);
}

double initial_score(const Vec& v_emb, const Vec& f_emb) {
  return 1.0 - cosine_similarity(v_emb, f_emb);
}

namespace {

Matrix random_matrix(size_t rows, size_t cols, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (double& v : m.a) v = dist(rng);
  return m;
}

Encoder make_encoder(EncoderKind kind, size_t d_raw, size_t embed_dim,
                     size_t hidden_dim, std::mt19937_64& rng) {
  Encoder enc;
  enc.kind = kind;
  if (kind == EncoderKind::Linear) {
    enc.w1 = random_matrix(embed_dim, d_raw, rng);
  } else {
    enc.w1 = random_matrix(hidden_dim, d_raw, rng);
    enc.w2 = random_matrix(embed_dim, hidden_dim, rng);
  }
  return enc;
}

struct TrainPair {
  size_t voice_idx;
  size_t face_idx;
};

struct EncoderGrads {
  Matrix w1;
  Matrix w2;
};

/// Forward through one branch without output normalization; returns the
/// hidden activations needed for backprop (OneHidden only).
Vec forward(const Encoder& enc, const Vec& x, Vec* hidden) {
  Vec h = matvec(enc.w1, x);
  if (enc.kind == EncoderKind::Linear) return h;
  for (double& v : h) v = std::tanh(v);
  if (hidden) *hidden = h;
  return matvec(enc.w2, h);
}

void backward(const Encoder& enc, const Vec& x, const Vec& hidden,
              const Vec& g_out, EncoderGrads& grads) {
  if (enc.kind == EncoderKind::Linear) {
    for (size_t r = 0; r < enc.w1.rows; ++r) {
      for (size_t c = 0; c < enc.w1.cols; ++c) {
        grads.w1(r, c) += g_out[r] * x[c];
      }
    }
    return;
  }
  for (size_t r = 0; r < enc.w2.rows; ++r) {
    for (size_t c = 0; c < enc.w2.cols; ++c) {
      grads.w2(r, c) += g_out[r] * hidden[c];
    }
  }
  Vec g_h(enc.w2.cols, 0.0);
  for (size_t r = 0; r < enc.w2.rows; ++r) {
    for (size_t c = 0; c < enc.w2.cols; ++c) {
      g_h[c] += enc.w2(r, c) * g_out[r];
    }
  }
  for (size_t c = 0; c < g_h.size(); ++c) {
    g_h[c] *= 1.0 - hidden[c] * hidden[c];  // tanh'
  }
  for (size_t r = 0; r < enc.w1.rows; ++r) {
    for (size_t c = 0; c < enc.w1.cols; ++c) {
      grads.w1(r, c) += g_h[r] * x[c];
    }
  }
}

void apply_step(Encoder& enc, const EncoderGrads& grads, double lr) {
  for (size_t i = 0; i < enc.w1.a.size(); ++i) enc.w1.a[i] -= lr * grads.w1.a[i];
  for (size_t i = 0; i < enc.w2.a.size(); ++i) enc.w2.a[i] -= lr * grads.w2.a[i];
}

}  // namespace

Encoder random_encoder(EncoderKind kind, size_t d_raw, size_t embed_dim,
                       size_t hidden_dim, uint64_t seed,
                       bool output_normalize) {
  std::mt19937_64 rng(derive_seed(seed, "init"));
  Encoder enc = make_encoder(kind, d_raw, embed_dim, hidden_dim, rng);
  enc.output_normalize = output_normalize;
  return enc;
}

TrainResult train_encoders(const std::vector<EmbeddingRecord>& raw_voice,
                           const std::vector<EmbeddingRecord>& raw_face,
                           const TrainConfig& config) {
  if (config.epochs < 1) throw NumericError("train: epochs must be >= 1");
  if (config.tau <= 0.0) throw NumericError("train: tau must be positive");
  if (config.batch_size < 2) {
    throw NumericError("train: batch_size must be >= 2");
  }
  if (config.learning_rate <= 0.0) {
    throw NumericError("train: learning_rate must be positive");
  }
  if (raw_voice.empty() || raw_face.empty()) {
    throw DataError("train: empty record set");
  }
  const size_t d_raw = raw_voice[0].vector.size();
  for (const auto& r : raw_voice) {
    if (r.vector.size() != d_raw) throw DataError("train: mixed raw dims");
  }
  for (const auto& r : raw_face) {
    if (r.vector.size() != d_raw) throw DataError("train: mixed raw dims");
  }

  // same-identity pairing: identities in order of first voice appearance,
  // cyclic pairing of the two modalities' samples
  std::map<std::string, std::vector<size_t>> faces_by_identity;
  for (size_t i = 0; i < raw_face.size(); ++i) {
    if (raw_face[i].identity) {
      faces_by_identity[*raw_face[i].identity].push_back(i);
    }
  }
  std::vector<std::string> identity_order;
  std::map<std::string, std::vector<size_t>> voices_by_identity;
  for (size_t i = 0; i < raw_voice.size(); ++i) {
    if (!raw_voice[i].identity) continue;
    auto [it, inserted] =
        voices_by_identity.try_emplace(*raw_voice[i].identity);
    if (inserted) identity_order.push_back(*raw_voice[i].identity);
    it->second.push_back(i);
  }

  std::vector<TrainPair> pairs;
  size_t usable_identities = 0;
  for (const std::string& id : identity_order) {
    auto fit = faces_by_identity.find(id);
    if (fit == faces_by_identity.end()) continue;
    ++usable_identities;
    const auto& vs = voices_by_identity[id];
    const auto& fs = fit->second;
    const size_t m = std::max(vs.size(), fs.size());
    for (size_t i = 0; i < m; ++i) {
      pairs.push_back({vs[i % vs.size()], fs[i % fs.size()]});
    }
  }
  if (usable_identities < 2) {
    throw DataError("train: need at least 2 identities with both modalities");
  }

  std::mt19937_64 init_rng(derive_seed(config.seed, "init"));
  TrainResult result;
  result.voice = make_encoder(config.encoder_kind, d_raw, config.embed_dim,
                              config.hidden_dim, init_rng);
  result.face = make_encoder(config.encoder_kind, d_raw, config.embed_dim,
                             config.hidden_dim, init_rng);
  Matrix& voice_out =
      config.encoder_kind == EncoderKind::Linear ? result.voice.w1
                                                 : result.voice.w2;
  Matrix& face_out =
      config.encoder_kind == EncoderKind::Linear ? result.face.w1
                                                 : result.face.w2;
  if (config.tie_output) face_out = voice_out;

  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::mt19937_64 epoch_rng(
        derive_seed(config.seed, "epoch", static_cast<uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), epoch_rng);

    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(
          order.size(), start + static_cast<size_t>(config.batch_size));
      const size_t n = end - start;
      if (n < 2) continue;  // a singleton batch has zero loss and gradient

      std::vector<Vec> zv(n), zf(n), hv(n), hf(n);
      for (size_t b = 0; b < n; ++b) {
        const TrainPair& p = pairs[order[start + b]];
        zv[b] = forward(result.voice, raw_voice[p.voice_idx].vector, &hv[b]);
        zf[b] = forward(result.face, raw_face[p.face_idx].vector, &hf[b]);
      }

      SccGradient grad;
      const double loss =
          scc_loss_grad(zv, zf, config.tau, config.normalize_in_loss, grad,
                        config.symmetric_loss);
      epoch_loss += loss * static_cast<double>(n);

      EncoderGrads gv{Matrix(result.voice.w1.rows, result.voice.w1.cols),
                      Matrix(result.voice.w2.rows, result.voice.w2.cols)};
      EncoderGrads gf{Matrix(result.face.w1.rows, result.face.w1.cols),
                      Matrix(result.face.w2.rows, result.face.w2.cols)};
      for (size_t b = 0; b < n; ++b) {
        const TrainPair& p = pairs[order[start + b]];
        backward(result.voice, raw_voice[p.voice_idx].vector, hv[b],
                 grad.voice[b], gv);
        backward(result.face, raw_face[p.face_idx].vector, hf[b], grad.face[b],
                 gf);
      }
      if (config.tie_output) {
        Matrix& gvo =
            config.encoder_kind == EncoderKind::Linear ? gv.w1 : gv.w2;
        Matrix& gfo =
            config.encoder_kind == EncoderKind::Linear ? gf.w1 : gf.w2;
        for (size_t i = 0; i < gvo.a.size(); ++i) {
          const double s = gvo.a[i] + gfo.a[i];
          gvo.a[i] = s;
          gfo.a[i] = s;
        }
      }
      apply_step(result.voice, gv, config.learning_rate);
      apply_step(result.face, gf, config.learning_rate);
    }
    result.epoch_loss.push_back(epoch_loss /
                                static_cast<double>(pairs.size()));
  }

  result.voice.output_normalize = config.normalize_in_loss;
  result.face.output_normalize = config.normalize_in_loss;
  return result;
}

namespace {

void write_matrix(std::string& out, const Matrix& m) {
  out += "matrix " + std::to_string(m.rows) + " " + std::to_string(m.cols) +
         "\n";
  for (size_t r = 0; r < m.rows; ++r) {
    for (size_t c = 0; c < m.cols; ++c) {
      if (c) out += ' ';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
}

}  // namespace

void save_encoder(const std::filesystem::path& path, const Encoder& enc) {
  std::string out = "#scc-encoder v1\n";
  out += std::string("kind ") +
         (enc.kind == EncoderKind::Linear ? "linear" : "onehidden") + "\n";
  out += std::string("normalize ") + (enc.output_normalize ? "1" : "0") + "\n";
  write_matrix(out, enc.w1);
  if (enc.kind == EncoderKind::OneHidden) write_matrix(out, enc.w2);
  write_file_atomic(path, out);
}

Encoder load_encoder(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open encoder file: " + path.string());
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw DataError(path.string() + ": truncated encoder file (missing " +
                      what + ")");
    }
    return line;
  };
  if (next_line("header") != "#scc-encoder v1") {
    throw DataError(path.string() + ": not a v1 encoder checkpoint");
  }
  Encoder enc;
  {
    std::istringstream ss(next_line("kind"));
    std::string key, kind;
    ss >> key >> kind;
    if (key != "kind") throw DataError(path.string() + ": expected kind line");
    if (kind == "linear") {
      enc.kind = EncoderKind::Linear;
    } else if (kind == "onehidden") {
      enc.kind = EncoderKind::OneHidden;
    } else {
      throw DataError(path.string() + ": unknown encoder kind '" + kind + "'");
    }
  }
  {
    std::istringstream ss(next_line("normalize"));
    std::string key;
    int flag = 0;
    ss >> key >> flag;
    if (key != "normalize") {
      throw DataError(path.string() + ": expected normalize line");
    }
    enc.output_normalize = flag != 0;
  }
  auto read_matrix = [&]() {
    std::istringstream ss(next_line("matrix header"));
    std::string key;
    size_t rows = 0, cols = 0;
    ss >> key >> rows >> cols;
    if (key != "matrix" || rows == 0 || cols == 0) {
      throw DataError(path.string() + ": bad matrix header");
    }
    Matrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
      std::istringstream row(next_line("matrix row"));
      for (size_t c = 0; c < cols; ++c) {
        std::string tok;
        if (!(row >> tok)) {
          throw DataError(path.string() + ": short matrix row");
        }
        m(r, c) = parse_double(tok, path.string());
      }
    }
    return m;
  };
  enc.w1 = read_matrix();
  if (enc.kind == EncoderKind::OneHidden) enc.w2 = read_matrix();
  return enc;
}

}  // namespace vfa
