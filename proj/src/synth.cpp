#include "vfa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "vfa/vectorstore.hpp"

namespace vfa {

OutlierKind parse_outlier_kind(std::string_view s) {
  if (s == "label-swap") return OutlierKind::LabelSwap;
  if (s == "noise-blast") return OutlierKind::NoiseBlast;
  if (s == "cross-gender-swap") return OutlierKind::CrossGenderSwap;
  throw DataError("unknown outlier kind '" + std::string(s) + "'");
}

std::string to_string(OutlierKind k) {
  switch (k) {
    case OutlierKind::LabelSwap:
      return "label-swap";
    case OutlierKind::NoiseBlast:
      return "noise-blast";
    case OutlierKind::CrossGenderSwap:
      return "cross-gender-swap";
  }
  return "?";
}

namespace {

Vec gaussian_vec(size_t dim, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> dist(0.0, sigma);
  Vec v(dim);
  for (double& x : v) x = dist(rng);
  return v;
}

void validate(const SynthConfig& c) {
  if (c.identities < 2) throw NumericError("synth: identities must be >= 2");
  if (c.samples_per_identity < 1) {
    throw NumericError("synth: samples_per_identity must be >= 1");
  }
  if (c.languages < 1) throw NumericError("synth: languages must be >= 1");
  if (c.dim_latent < 2 || c.dim_raw < 2 || c.dim_embed < 2) {
    throw NumericError("synth: all dimensions must be >= 2");
  }
  if (c.noise_sigma < 0.0) throw NumericError("synth: negative noise_sigma");
  if (c.outlier_rate < 0.0 || c.outlier_rate >= 1.0) {
    throw NumericError("synth: outlier_rate must be in [0, 1)");
  }
}

struct SampleMeta {
  Modality modality;
  int identity;
  int sample_no;
  int language;  // -1 for faces
};

}  // namespace

SynthOutput generate(const SynthConfig& config) {
  validate(config);
  const size_t de = static_cast<size_t>(config.dim_embed);
  const size_t dl = static_cast<size_t>(config.dim_latent);
  const size_t dr = static_cast<size_t>(config.dim_raw);

  std::mt19937_64 model_rng(derive_seed(config.seed, "model"));

  // gender offsets: +/- gap/2 along one random unit direction
  Vec gdir = normalize(gaussian_vec(de, model_rng));
  std::array<Vec, 2> gender_vec;
  for (int g = 0; g < 2; ++g) {
    gender_vec[g] = gdir;
    const double scale = (g == 0 ? 0.5 : -0.5) * config.gender_gap;
    for (double& x : gender_vec[g]) x *= scale;
  }

  // identity latents lifted into the embedding space
  const double lift_scale = 1.0 / std::sqrt(static_cast<double>(dl));
  std::vector<Vec> lift(de);
  for (Vec& row : lift) row = gaussian_vec(dl, model_rng, lift_scale);
  std::vector<Vec> identity_embed(config.identities, Vec(de, 0.0));
  for (int id = 0; id < config.identities; ++id) {
    Vec latent = gaussian_vec(dl, model_rng);
    for (size_t r = 0; r < de; ++r) {
      double s = 0.0;
      for (size_t c = 0; c < dl; ++c) s += lift[r][c] * latent[c];
      identity_embed[id][r] = s;
    }
  }

  // identity spread scales language offsets and outlier blasts
  Vec mean_embed(de, 0.0);
  for (const Vec& e : identity_embed) {
    for (size_t j = 0; j < de; ++j) mean_embed[j] += e[j];
  }
  for (double& x : mean_embed) x /= config.identities;
  double spread_sq = 0.0;
  for (const Vec& e : identity_embed) {
    double s = 0.0;
    for (size_t j = 0; j < de; ++j) {
      const double d = e[j] - mean_embed[j];
      s += d * d;
    }
    spread_sq += s;
  }
  const double spread = std::sqrt(spread_sq / config.identities);

  std::vector<Vec> lang_offset(config.languages);
  for (int l = 0; l < config.languages; ++l) {
    Vec off = normalize(gaussian_vec(de, model_rng));
    for (double& x : off) x *= config.language_scale * spread;
    lang_offset[l] = off;
  }

  // full-rank-ish random raw-feature maps per modality
  const double map_scale = 1.0 / std::sqrt(static_cast<double>(de));
  std::array<std::vector<Vec>, 2> raw_map;
  for (auto& m : raw_map) {
    m.resize(dr);
    for (Vec& row : m) row = gaussian_vec(de, model_rng, map_scale);
  }

  auto gender_of = [](int id) { return id % 2; };

  SynthOutput out;
  std::vector<SampleMeta> meta;
  std::vector<Vec> embeds;
  std::mt19937_64 noise_rng(derive_seed(config.seed, "noise"));

  auto make_sample = [&](Modality m, int id, int k, std::mt19937_64& rng) {
    Vec emb = identity_embed[id];
    const Vec& gv = gender_vec[gender_of(id)];
    for (size_t j = 0; j < de; ++j) emb[j] += gv[j];
    int lang = -1;
    if (m == Modality::Voice) {
      lang = k % config.languages;
      for (size_t j = 0; j < de; ++j) emb[j] += lang_offset[lang][j];
    }
    if (config.noise_sigma > 0.0) {
      Vec eps = gaussian_vec(de, rng, config.noise_sigma);
      for (size_t j = 0; j < de; ++j) emb[j] += eps[j];
    }
    return std::pair<Vec, int>(std::move(emb), lang);
  };

  for (int mi = 0; mi < 2; ++mi) {
    const Modality m = mi == 0 ? Modality::Voice : Modality::Face;
    for (int id = 0; id < config.identities; ++id) {
      for (int k = 0; k < config.samples_per_identity; ++k) {
        auto [emb, lang] = make_sample(m, id, k, noise_rng);
        meta.push_back({m, id, k, lang});
        embeds.push_back(std::move(emb));
      }
    }
  }

  // outlier contamination; selection is a shuffle prefix and each sample's
  // corruption draws come from its own derived stream, so raising the rate
  // only adds outliers without disturbing the rest
  const size_t total = embeds.size();
  const auto n_out =
      static_cast<size_t>(std::lround(config.outlier_rate * total));
  std::vector<size_t> perm(total);
  for (size_t i = 0; i < total; ++i) perm[i] = i;
  {
    std::mt19937_64 sel_rng(derive_seed(config.seed, "outlier-select"));
    std::shuffle(perm.begin(), perm.end(), sel_rng);
  }
  std::vector<bool> outlier(total, false);
  for (size_t o = 0; o < n_out; ++o) {
    const size_t i = perm[o];
    outlier[i] = true;
    std::mt19937_64 rng(derive_seed(config.seed, "outlier", i));
    switch (config.outlier_kind) {
      case OutlierKind::NoiseBlast: {
        // per-coordinate sigma chosen so the blast norm is ~1.2x the
        // identity spread: corrupting, but recoverable in principle
        const double sigma =
            1.2 * spread / std::sqrt(static_cast<double>(de));
        Vec blast = gaussian_vec(embeds[i].size(), rng, sigma);
        for (size_t j = 0; j < embeds[i].size(); ++j) embeds[i][j] += blast[j];
        break;
      }
      case OutlierKind::LabelSwap: {
        // content from a different identity under the recorded label
        std::uniform_int_distribution<int> pick(0, config.identities - 2);
        int other = pick(rng);
        if (other >= meta[i].identity) ++other;
        Vec emb = identity_embed[other];
        const Vec& gv = gender_vec[gender_of(other)];
        for (size_t j = 0; j < de; ++j) emb[j] += gv[j];
        if (meta[i].modality == Modality::Voice) {
          for (size_t j = 0; j < de; ++j) {
            emb[j] += lang_offset[meta[i].language][j];
          }
        }
        if (config.noise_sigma > 0.0) {
          Vec eps = gaussian_vec(de, rng, config.noise_sigma);
          for (size_t j = 0; j < de; ++j) emb[j] += eps[j];
        }
        embeds[i] = std::move(emb);
        break;
      }
      case OutlierKind::CrossGenderSwap: {
        const int own = gender_of(meta[i].identity);
        for (size_t j = 0; j < de; ++j) {
          embeds[i][j] += gender_vec[1 - own][j] - gender_vec[own][j];
        }
        break;
      }
    }
  }

  for (size_t i = 0; i < total; ++i) {
    const SampleMeta& sm = meta[i];
    const std::string prefix = sm.modality == Modality::Voice ? "v" : "f";
    EmbeddingRecord emb_rec;
    emb_rec.sample_id = prefix + std::to_string(sm.identity) + "_" +
                        std::to_string(sm.sample_no);
    emb_rec.modality = sm.modality;
    emb_rec.identity = "id" + std::to_string(sm.identity);
    emb_rec.vector = embeds[i];

    EmbeddingRecord raw_rec = emb_rec;
    raw_rec.vector.assign(dr, 0.0);
    const auto& map = raw_map[sm.modality == Modality::Voice ? 0 : 1];
    for (size_t r = 0; r < dr; ++r) {
      double s = 0.0;
      for (size_t c = 0; c < de; ++c) s += map[r][c] * embeds[i][c];
      raw_rec.vector[r] = s;
    }

    out.truth.samples.push_back({emb_rec.sample_id,
                                 "id" + std::to_string(sm.identity),
                                 gender_of(sm.identity), sm.language,
                                 outlier[i]});
    out.embeddings.push_back(std::move(emb_rec));
    out.raw.push_back(std::move(raw_rec));
  }

  // manifest: every positive pair, then an equal number of distinct random
  // negatives (balanced verification protocol)
  for (int id = 0; id < config.identities; ++id) {
    for (int kv = 0; kv < config.samples_per_identity; ++kv) {
      for (int kf = 0; kf < config.samples_per_identity; ++kf) {
        TestPair p;
        p.voice_id = "v" + std::to_string(id) + "_" + std::to_string(kv);
        p.face_id = "f" + std::to_string(id) + "_" + std::to_string(kf);
        p.label = true;
        out.pairs.push_back(std::move(p));
      }
    }
  }
  const size_t n_pos = out.pairs.size();
  std::mt19937_64 neg_rng(derive_seed(config.seed, "pairs"));
  std::uniform_int_distribution<int> pick_id(0, config.identities - 1);
  std::uniform_int_distribution<int> pick_k(0, config.samples_per_identity - 1);
  std::set<std::pair<std::string, std::string>> used;
  while (out.pairs.size() < 2 * n_pos) {
    const int vid = pick_id(neg_rng);
    const int fid = pick_id(neg_rng);
    if (vid == fid) continue;
    TestPair p;
    p.voice_id = "v" + std::to_string(vid) + "_" + std::to_string(pick_k(neg_rng));
    p.face_id = "f" + std::to_string(fid) + "_" + std::to_string(pick_k(neg_rng));
    p.label = false;
    if (!used.emplace(p.voice_id, p.face_id).second) continue;
    out.pairs.push_back(std::move(p));
  }
  return out;
}

std::string serialize_truth_csv(const GroundTruth& truth) {
  std::string out = "sample_id,identity,gender,language,outlier\n";
  for (const SampleTruth& s : truth.samples) {
    out += s.sample_id;
    out += ',';
    out += s.identity;
    out += ',';
    out += std::to_string(s.gender);
    out += ',';
    out += std::to_string(s.language);
    out += ',';
    out += s.outlier ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_truth_csv(const std::filesystem::path& path,
                     const GroundTruth& truth) {
  write_file_atomic(path, serialize_truth_csv(truth));
}

}  // namespace vfa
