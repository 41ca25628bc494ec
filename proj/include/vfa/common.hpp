#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vfa {

using Vec = std::vector<double>;

/// File or input-content problem (missing file, malformed line, bad id).
/// Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate numeric input (zero vector, non-positive temperature,
/// dimension mismatch). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

enum class Modality { Voice, Face };

std::string to_string(Modality m);
Modality parse_modality(std::string_view s);

struct EmbeddingRecord {
  std::string sample_id;
  Modality modality = Modality::Voice;
  std::optional<std::string> identity;  // absent at inference
  Vec vector;
};

struct TestPair {
  std::string voice_id;
  std::string face_id;
  std::optional<bool> label;  // true = same identity
};

struct ScoreEntry {
  std::string voice_id;
  std::string face_id;
  double score = 0.0;
};

struct ScoreSet {
  std::vector<ScoreEntry> entries;
};

/// Shortest round-trip-exact decimal form (at most 17 significant digits).
std::string format_double(double v);

/// Strict double parse of the whole token.
double parse_double(std::string_view s, const std::string& context);

uint64_t splitmix64(uint64_t x);

/// Deterministic per-stage seed derivation, so stages can be re-run in
/// isolation while all randomness flows from one top-level seed.
uint64_t derive_seed(uint64_t seed, std::string_view label);
uint64_t derive_seed(uint64_t seed, std::string_view label, uint64_t index);

}  // namespace vfa
