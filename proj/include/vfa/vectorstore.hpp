#pragma once

#include <filesystem>
#include <unordered_map>

#include "vfa/common.hpp"

namespace vfa {

/// Cosine similarity a·b / (|a||b|), in [-1, 1].
/// Zero-norm input is an error, not 0: a silent default would mask an
/// upstream encoder collapse.
double cosine_similarity(const Vec& a, const Vec& b);

/// Euclidean distance |a - b|.
double l2_distance(const Vec& a, const Vec& b);

double norm(const Vec& v);
double dot(const Vec& a, const Vec& b);

/// v / |v|; error on the zero vector.
Vec normalize(const Vec& v);

// --- file formats ---------------------------------------------------------
//
// Embedding file: UTF-8 text, LF endings, header "#dim <d>", then one record
// per line: sample_id TAB modality TAB identity TAB v1 v2 ... vd.
// identity is "-" when absent. Values use shortest round-trip decimals
// (<= 17 significant digits).
//
// Pair manifest: CSV, header "voice_id,face_id,label", label in {0,1,""}.
// Score file: CSV, header "voice_id,face_id,score", row order = manifest.

std::vector<EmbeddingRecord> read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path,
                      const std::vector<EmbeddingRecord>& records);
std::string serialize_embeddings(const std::vector<EmbeddingRecord>& records);

std::vector<TestPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path,
                 const std::vector<TestPair>& pairs);
std::string serialize_pairs(const std::vector<TestPair>& pairs);

ScoreSet read_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, const ScoreSet& scores);
std::string serialize_scores(const ScoreSet& scores);

/// Whole-file write through a temp file + rename, so an error never leaves a
/// partially written output behind.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

/// Id -> record lookup split by modality. Duplicate sample ids are rejected
/// at build time (sample_id is the join key across files).
class EmbeddingIndex {
 public:
  explicit EmbeddingIndex(const std::vector<EmbeddingRecord>& records);

  const EmbeddingRecord& voice(const std::string& id) const;
  const EmbeddingRecord& face(const std::string& id) const;
  const std::vector<EmbeddingRecord>& records() const { return records_; }

 private:
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, size_t> voice_by_id_;
  std::unordered_map<std::string, size_t> face_by_id_;
};

}  // namespace vfa
