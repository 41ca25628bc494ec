#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "vfa/cluster.hpp"
#include "vfa/common.hpp"

namespace vfa {

/// Members of one (modality, gender-cluster) candidate set.
/// Cluster indices are arbitrary labels; no semantic gender is assigned —
/// only cross-modal match/mismatch matters downstream.
struct CandidateSet {
  Modality modality = Modality::Voice;
  int gender_cluster = 0;
  std::vector<size_t> members;          // indices into the modality's records
  std::vector<bool> gender_inlier;      // per member
  std::vector<int> identity_assignment; // per member, -1 before/without one
  std::vector<bool> identity_inlier;    // per member; implies gender_inlier
  std::optional<ClusterModel> identity_model;
  std::optional<ElbowReport> elbow;     // present when n came from the elbow
};

struct ModalityView {
  std::vector<std::string> ids;
  std::vector<Vec> vectors;
};

struct RefineConfig {
  ThresholdRule gender_threshold = ThresholdRule::percentile(90.0);   // T^m
  ThresholdRule identity_threshold = ThresholdRule::percentile(90.0); // T^g
  double sim_threshold = 0.8;  // T^alpha
  double alpha = 0.5;          // reward shrink factor, in (0, 1]
  std::optional<int> identity_cluster_count;  // fixed n; elbow otherwise
  std::optional<int> elbow_target;  // default: half the candidate-set size
  int max_elbow_candidates = 24;
  int gender_cluster_count = 2;  // 1 forces a single gender cluster
  bool literal_reward_rule = false;  // reward when sim < T^alpha instead
  KMeansOptions kmeans;
};

struct GenderClustering {
  ClusterModel voice_model;
  ClusterModel face_model;
  std::vector<CandidateSet> sets;  // voice clusters first, then face
  // voice gender label g corresponds to face cluster face_cluster_for[g];
  // aligned by minimal total center distance (embeddings share one space)
  std::vector<int> face_cluster_for;
};

/// k=2 (or forced k=1) K-Means per modality plus T^m inlier flags and the
/// cross-modal cluster alignment.
GenderClustering gender_cluster(const ModalityView& voice,
                                const ModalityView& face,
                                const RefineConfig& config, uint64_t seed);

/// K-Means over the gender-inlier members only; fills identity assignments
/// and T^g inlier flags. n comes from config or the elbow method.
void identity_cluster(CandidateSet& cset, const ModalityView& data,
                      const RefineConfig& config, uint64_t seed);

struct PrototypeTable {
  struct Entry {
    // per identity cluster: mean of identity-inlier members, absent when the
    // cluster has no inliers
    std::vector<std::optional<Vec>> prototypes;
    std::vector<int> counts;
  };
  // indexed [modality][gender cluster]
  std::array<std::vector<Entry>, 2> entries;

  Entry& at(Modality m, int gender);
  const Entry& at(Modality m, int gender) const;
};

PrototypeTable compute_prototypes(const std::vector<CandidateSet>& csets,
                                  const ModalityView& voice,
                                  const ModalityView& face,
                                  int gender_cluster_count);

struct SimilarityMatrix {
  int gender = 0;  // voice-side gender cluster label
  std::vector<int> voice_clusters;  // identity-cluster ids of the rows
  std::vector<int> face_clusters;   // identity-cluster ids of the columns
  std::vector<std::vector<double>> values;

  std::optional<double> value_for(int voice_cluster, int face_cluster) const;
};

/// Cosine similarity between every present voice prototype and face
/// prototype of one gender (prototypes are already encoder outputs; no
/// re-encoding).
SimilarityMatrix prototype_similarity(const PrototypeTable& table,
                                      int voice_gender, int face_gender);

struct ScoreBounds {
  double lower = 0.0;  // B_l: min of the initial scores
  double upper = 0.0;  // B_u: max of the initial scores
};

struct AuditEntry {
  std::string voice_id;
  std::string face_id;
  std::string rule;  // "reward" or "penalty"
  double before = 0.0;
  double after = 0.0;
};

struct RefineOutcome {
  ScoreSet refined;
  ScoreBounds bounds;
  GenderClustering gender;
  PrototypeTable prototypes;
  std::vector<SimilarityMatrix> similarities;  // one per voice gender label
  std::vector<AuditEntry> audit;
};

/// Full chaining-cluster pass: gender clusters, identity clusters,
/// prototypes, prototype similarity, then the reward/penalty score rules.
/// Embeddings must cover every id referenced by the pairs.
RefineOutcome refine_scores(const std::vector<TestPair>& pairs,
                            const ScoreSet& initial,
                            const std::vector<EmbeddingRecord>& embeddings,
                            const RefineConfig& config, uint64_t seed);

std::string serialize_similarity_csv(const SimilarityMatrix& sim);
void write_similarity_csv(const std::filesystem::path& path,
                          const SimilarityMatrix& sim);
std::string serialize_audit_csv(const std::vector<AuditEntry>& audit);
void write_audit_csv(const std::filesystem::path& path,
                     const std::vector<AuditEntry>& audit);

}  // namespace vfa
