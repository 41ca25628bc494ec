#pragma once

#include <cstdint>
#include <filesystem>

#include "vfa/common.hpp"

namespace vfa {

enum class OutlierKind { LabelSwap, NoiseBlast, CrossGenderSwap };

OutlierKind parse_outlier_kind(std::string_view s);
std::string to_string(OutlierKind k);

struct SynthConfig {
  int identities = 20;
  int samples_per_identity = 4;  // per modality
  int languages = 2;             // voice samples carry a language offset
  int dim_latent = 16;
  int dim_raw = 64;
  int dim_embed = 32;
  double noise_sigma = 0.05;
  double outlier_rate = 0.0;
  OutlierKind outlier_kind = OutlierKind::NoiseBlast;
  uint64_t seed = 0;
  double gender_gap = 9.0;       // separation between gender offsets
  double language_scale = 0.3;   // language offset norm relative to spread
};

struct SampleTruth {
  std::string sample_id;
  std::string identity;
  int gender = 0;
  int language = 0;  // -1 for faces (no spoken language)
  bool outlier = false;
};

struct GroundTruth {
  std::vector<SampleTruth> samples;
};

struct SynthOutput {
  std::vector<EmbeddingRecord> raw;         // dim_raw features, A_m . emb
  std::vector<EmbeddingRecord> embeddings;  // dim_embed shared-space vectors
  std::vector<TestPair> pairs;  // all positives plus as many random negatives
  GroundTruth truth;
};

/// Seeded synthetic stand-in for a multilingual voice-face corpus: identity
/// latents, a gender offset, per-language voice offsets, gaussian sample
/// noise, and controllable outlier contamination. Fully deterministic per
/// seed; the outlier set is prefix-nested as outlier_rate grows.
SynthOutput generate(const SynthConfig& config);

std::string serialize_truth_csv(const GroundTruth& truth);
void write_truth_csv(const std::filesystem::path& path,
                     const GroundTruth& truth);

}  // namespace vfa
