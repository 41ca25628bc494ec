#include "vfa/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "vfa/vectorstore.hpp"

namespace vfa {

PrototypeTable::Entry& PrototypeTable::at(Modality m, int gender) {
  return entries[m == Modality::Voice ? 0 : 1][gender];
}

const PrototypeTable::Entry& PrototypeTable::at(Modality m, int gender) const {
  return entries[m == Modality::Voice ? 0 : 1][gender];
}

GenderClustering gender_cluster(const ModalityView& voice,
                                const ModalityView& face,
                                const RefineConfig& config, uint64_t seed) {
  const int k = config.gender_cluster_count;
  if (k != 1 && k != 2) {
    throw NumericError("gender_cluster_count must be 1 or 2");
  }
  if (voice.vectors.size() < static_cast<size_t>(std::max(2, k)) ||
      face.vectors.size() < static_cast<size_t>(std::max(2, k))) {
    throw NumericError("gender_cluster: need at least 2 samples per modality");
  }

  GenderClustering out;
  out.voice_model = kmeans_fit(voice.vectors, k,
                               derive_seed(seed, "gender-voice"), config.kmeans);
  out.face_model = kmeans_fit(face.vectors, k,
                              derive_seed(seed, "gender-face"), config.kmeans);

  const std::vector<size_t> voice_inliers =
      distance_filter(out.voice_model, config.gender_threshold);
  const std::vector<size_t> face_inliers =
      distance_filter(out.face_model, config.gender_threshold);
  std::vector<bool> voice_inlier(voice.vectors.size(), false);
  for (size_t i : voice_inliers) voice_inlier[i] = true;
  std::vector<bool> face_inlier(face.vectors.size(), false);
  for (size_t i : face_inliers) face_inlier[i] = true;

  auto build_sets = [&](Modality m, const ClusterModel& model,
                        const std::vector<bool>& inlier) {
    for (int g = 0; g < k; ++g) {
      CandidateSet cset;
      cset.modality = m;
      cset.gender_cluster = g;
      for (size_t i = 0; i < model.assignments.size(); ++i) {
        if (model.assignments[i] != g) continue;
        cset.members.push_back(i);
        cset.gender_inlier.push_back(inlier[i]);
        cset.identity_assignment.push_back(-1);
        cset.identity_inlier.push_back(false);
      }
      out.sets.push_back(std::move(cset));
    }
  };
  build_sets(Modality::Voice, out.voice_model, voice_inlier);
  build_sets(Modality::Face, out.face_model, face_inlier);

  // cross-modal label alignment: the embeddings share one space, so match
  // gender centers by minimal total center distance
  if (k == 1) {
    out.face_cluster_for = {0};
  } else {
    const double keep =
        l2_distance(out.voice_model.centers[0], out.face_model.centers[0]) +
        l2_distance(out.voice_model.centers[1], out.face_model.centers[1]);
    const double swap =
        l2_distance(out.voice_model.centers[0], out.face_model.centers[1]) +
        l2_distance(out.voice_model.centers[1], out.face_model.centers[0]);
    out.face_cluster_for = keep <= swap ? std::vector<int>{0, 1}
                                        : std::vector<int>{1, 0};
  }
  return out;
}

void identity_cluster(CandidateSet& cset, const ModalityView& data,
                      const RefineConfig& config, uint64_t seed) {
  std::vector<size_t> inlier_pos;  // positions within cset.members
  std::vector<Vec> points;
  for (size_t p = 0; p < cset.members.size(); ++p) {
    if (!cset.gender_inlier[p]) continue;
    inlier_pos.push_back(p);
    points.push_back(data.vectors[cset.members[p]]);
  }
  if (points.empty()) return;  // nothing to cluster; prototypes stay absent

  int n = 0;
  if (config.identity_cluster_count) {
    n = *config.identity_cluster_count;
    if (n < 1 || static_cast<size_t>(n) > points.size()) {
      throw NumericError("identity cluster count " + std::to_string(n) +
                         " exceeds gender-inlier count " +
                         std::to_string(points.size()));
    }
  } else if (points.size() < 3) {
    n = 1;
  } else {
    std::vector<int> candidates;
    const int hi = std::min<int>(config.max_elbow_candidates,
                                 static_cast<int>(points.size()));
    for (int k = 2; k <= hi; ++k) candidates.push_back(k);
    const int target =
        config.elbow_target
            ? *config.elbow_target
            : std::max(1, static_cast<int>(points.size()) / 2);
    ElbowReport report = elbow_select(points, candidates, target,
                                      derive_seed(seed, "elbow"), config.kmeans);
    n = report.selected;
    cset.elbow = std::move(report);
  }

  ClusterModel model =
      kmeans_fit(points, n, derive_seed(seed, "identity"), config.kmeans);
  const std::vector<size_t> inliers =
      distance_filter(model, config.identity_threshold);
  std::vector<bool> inlier_flag(points.size(), false);
  for (size_t i : inliers) inlier_flag[i] = true;

  for (size_t i = 0; i < inlier_pos.size(); ++i) {
    cset.identity_assignment[inlier_pos[i]] = model.assignments[i];
    cset.identity_inlier[inlier_pos[i]] = inlier_flag[i];
  }
  cset.identity_model = std::move(model);
}

PrototypeTable compute_prototypes(const std::vector<CandidateSet>& csets,
                                  const ModalityView& voice,
                                  const ModalityView& face,
                                  int gender_cluster_count) {
  PrototypeTable table;
  table.entries[0].resize(gender_cluster_count);
  table.entries[1].resize(gender_cluster_count);

  for (const CandidateSet& cset : csets) {
    const ModalityView& data =
        cset.modality == Modality::Voice ? voice : face;
    PrototypeTable::Entry& entry = table.at(cset.modality, cset.gender_cluster);
    const int k = cset.identity_model ? cset.identity_model->k : 0;
    entry.prototypes.assign(k, std::nullopt);
    entry.counts.assign(k, 0);
    if (k == 0) continue;

    const size_t dim = data.vectors.empty() ? 0 : data.vectors[0].size();
    std::vector<Vec> sums(k, Vec(dim, 0.0));
    for (size_t p = 0; p < cset.members.size(); ++p) {
      if (!cset.identity_inlier[p]) continue;
      const int c = cset.identity_assignment[p];
      ++entry.counts[c];
      const Vec& v = data.vectors[cset.members[p]];
      for (size_t j = 0; j < dim; ++j) sums[c][j] += v[j];
    }
    for (int c = 0; c < k; ++c) {
      if (entry.counts[c] == 0) continue;  // absent, not zero
      Vec proto(dim);
      for (size_t j = 0; j < dim; ++j) {
        proto[j] = sums[c][j] / static_cast<double>(entry.counts[c]);
      }
      entry.prototypes[c] = std::move(proto);
    }
  }
  return table;
}

std::optional<double> SimilarityMatrix::value_for(int voice_cluster,
                                                  int face_cluster) const {
  const auto vit =
      std::find(voice_clusters.begin(), voice_clusters.end(), voice_cluster);
  const auto fit =
      std::find(face_clusters.begin(), face_clusters.end(), face_cluster);
  if (vit == voice_clusters.end() || fit == face_clusters.end()) {
    return std::nullopt;
  }
  return values[vit - voice_clusters.begin()][fit - face_clusters.begin()];
}

SimilarityMatrix prototype_similarity(const PrototypeTable& table,
                                      int voice_gender, int face_gender) {
  const PrototypeTable::Entry& ve = table.at(Modality::Voice, voice_gender);
  const PrototypeTable::Entry& fe = table.at(Modality::Face, face_gender);

  SimilarityMatrix sim;
  sim.gender = voice_gender;
  for (size_t c = 0; c < ve.prototypes.size(); ++c) {
    if (ve.prototypes[c]) sim.voice_clusters.push_back(static_cast<int>(c));
  }
  for (size_t c = 0; c < fe.prototypes.size(); ++c) {
    if (fe.prototypes[c]) sim.face_clusters.push_back(static_cast<int>(c));
  }
  if (sim.voice_clusters.empty() || sim.face_clusters.empty()) {
    throw NumericError("prototype_similarity: a modality has no prototypes");
  }
  for (int vc : sim.voice_clusters) {
    std::vector<double> row;
    for (int fc : sim.face_clusters) {
      row.push_back(
          cosine_similarity(*ve.prototypes[vc], *fe.prototypes[fc]));
    }
    sim.values.push_back(std::move(row));
  }
  return sim;
}

namespace {

/// Every embedding record of one modality, in file order; clustering uses the
/// whole population, not just the samples the pair manifest happens to touch.
ModalityView collect_view(const std::vector<EmbeddingRecord>& embeddings,
                          Modality m) {
  ModalityView view;
  for (const EmbeddingRecord& rec : embeddings) {
    if (rec.modality != m) continue;
    view.ids.push_back(rec.sample_id);
    view.vectors.push_back(rec.vector);
  }
  return view;
}

struct MemberRef {
  const CandidateSet* cset = nullptr;
  size_t position = 0;
};

/// Resolve the identity cluster a sample speaks for: identity-inliers use
/// their own assignment; everything else falls back to the nearest present
/// prototype of its modality and gender.
std::optional<int> resolve_identity_cluster(const MemberRef& ref,
                                            const PrototypeTable::Entry& entry,
                                            const Vec& vec) {
  if (ref.cset != nullptr && ref.cset->identity_inlier[ref.position]) {
    const int c = ref.cset->identity_assignment[ref.position];
    if (c >= 0 && entry.prototypes[c]) return c;
  }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < entry.prototypes.size(); ++c) {
    if (!entry.prototypes[c]) continue;
    const double d = l2_distance(vec, *entry.prototypes[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

}  // namespace

RefineOutcome refine_scores(const std::vector<TestPair>& pairs,
                            const ScoreSet& initial,
                            const std::vector<EmbeddingRecord>& embeddings,
                            const RefineConfig& config, uint64_t seed) {
  if (pairs.empty()) throw DataError("refine: empty pair list");
  if (pairs.size() != initial.entries.size()) {
    throw DataError("refine: score set and pair manifest differ in length");
  }
  if (config.alpha <= 0.0 || config.alpha > 1.0) {
    throw NumericError("refine: alpha must be in (0, 1]");
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (initial.entries[i].voice_id != pairs[i].voice_id ||
        initial.entries[i].face_id != pairs[i].face_id) {
      throw DataError("refine: score row " + std::to_string(i + 1) +
                      " does not match the pair manifest");
    }
  }

  const EmbeddingIndex index(embeddings);
  for (const TestPair& p : pairs) {
    index.voice(p.voice_id);  // throws if a pair references a missing id
    index.face(p.face_id);
  }
  const ModalityView voice = collect_view(embeddings, Modality::Voice);
  const ModalityView face = collect_view(embeddings, Modality::Face);
  std::unordered_map<std::string, size_t> voice_pos, face_pos;
  for (size_t i = 0; i < voice.ids.size(); ++i) voice_pos[voice.ids[i]] = i;
  for (size_t i = 0; i < face.ids.size(); ++i) face_pos[face.ids[i]] = i;

  RefineOutcome out;
  out.bounds.lower = initial.entries[0].score;
  out.bounds.upper = initial.entries[0].score;
  for (const ScoreEntry& e : initial.entries) {
    out.bounds.lower = std::min(out.bounds.lower, e.score);
    out.bounds.upper = std::max(out.bounds.upper, e.score);
  }

  out.gender = gender_cluster(voice, face, config, seed);
  for (size_t s = 0; s < out.gender.sets.size(); ++s) {
    CandidateSet& cset = out.gender.sets[s];
    const ModalityView& data =
        cset.modality == Modality::Voice ? voice : face;
    identity_cluster(cset, data, config, derive_seed(seed, "identity-set", s));
  }
  out.prototypes = compute_prototypes(out.gender.sets, voice, face,
                                      config.gender_cluster_count);

  for (int g = 0; g < config.gender_cluster_count; ++g) {
    try {
      out.similarities.push_back(prototype_similarity(
          out.prototypes, g, out.gender.face_cluster_for[g]));
    } catch (const NumericError&) {
      // a gender with no prototypes on one side gets an empty matrix; the
      // reward rule simply never fires for it
      SimilarityMatrix empty;
      empty.gender = g;
      out.similarities.push_back(std::move(empty));
    }
  }

  // per-sample membership lookup, per modality
  std::unordered_map<size_t, MemberRef> voice_member, face_member;
  for (const CandidateSet& cset : out.gender.sets) {
    auto& map =
        cset.modality == Modality::Voice ? voice_member : face_member;
    for (size_t p = 0; p < cset.members.size(); ++p) {
      map[cset.members[p]] = MemberRef{&cset, p};
    }
  }

  out.refined = initial;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const size_t vi = voice_pos.at(pairs[i].voice_id);
    const size_t fi = face_pos.at(pairs[i].face_id);
    const int gv = out.gender.voice_model.assignments[vi];
    const int gf = out.gender.face_model.assignments[fi];
    const double before = out.refined.entries[i].score;
    double after = before;
    std::string rule;

    if (out.gender.face_cluster_for[gv] != gf) {
      // gender mismatch penalty: hard maximal-distance verdict
      after = out.bounds.upper;
      rule = "penalty";
    } else {
      const SimilarityMatrix& sim = out.similarities[gv];
      const auto cv = resolve_identity_cluster(
          voice_member.at(vi), out.prototypes.at(Modality::Voice, gv),
          voice.vectors[vi]);
      const auto cf = resolve_identity_cluster(
          face_member.at(fi),
          out.prototypes.at(Modality::Face, out.gender.face_cluster_for[gv]),
          face.vectors[fi]);
      if (cv && cf) {
        const auto value = sim.value_for(*cv, *cf);
        if (value) {
          const bool fire = config.literal_reward_rule
                                ? *value < config.sim_threshold
                                : *value >= config.sim_threshold;
          if (fire) {
            after = out.bounds.lower +
                    (before - out.bounds.lower) * config.alpha;
            rule = "reward";
          }
        }
      }
    }

    if (after != before) {
      out.refined.entries[i].score = after;
      out.audit.push_back({pairs[i].voice_id, pairs[i].face_id, rule, before,
                           after});
    }
  }
  return out;
}

std::string serialize_similarity_csv(const SimilarityMatrix& sim) {
  std::string out = "voice_cluster";
  for (int fc : sim.face_clusters) out += ",f" + std::to_string(fc);
  out += '\n';
  for (size_t r = 0; r < sim.voice_clusters.size(); ++r) {
    out += "v" + std::to_string(sim.voice_clusters[r]);
    for (size_t c = 0; c < sim.face_clusters.size(); ++c) {
      out += ',';
      out += format_double(sim.values[r][c]);
    }
    out += '\n';
  }
  return out;
}

void write_similarity_csv(const std::filesystem::path& path,
                          const SimilarityMatrix& sim) {
  write_file_atomic(path, serialize_similarity_csv(sim));
}

std::string serialize_audit_csv(const std::vector<AuditEntry>& audit) {
  std::string out = "voice_id,face_id,rule,before,after\n";
  for (const AuditEntry& e : audit) {
    out += e.voice_id;
    out += ',';
    out += e.face_id;
    out += ',';
    out += e.rule;
    out += ',';
    out += format_double(e.before);
    out += ',';
    out += format_double(e.after);
    out += '\n';
  }
  return out;
}

void write_audit_csv(const std::filesystem::path& path,
                     const std::vector<AuditEntry>& audit) {
  write_file_atomic(path, serialize_audit_csv(audit));
}

}  // namespace vfa
