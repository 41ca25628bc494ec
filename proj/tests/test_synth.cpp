#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vfa/cluster.hpp"
#include "vfa/contrastive.hpp"
#include "vfa/evaluation.hpp"
#include "vfa/synth.hpp"
#include "vfa/vectorstore.hpp"

using namespace vfa;

namespace {

ScoreSet score_pairs(const SynthOutput& data) {
  const EmbeddingIndex index(data.embeddings);
  ScoreSet scores;
  for (const auto& p : data.pairs) {
    scores.entries.push_back(
        {p.voice_id, p.face_id,
         initial_score(index.voice(p.voice_id).vector,
                       index.face(p.face_id).vector)});
  }
  return scores;
}

}  // namespace

TEST_CASE("generated corpus shape and labeling") {
  SynthConfig cfg;
  cfg.identities = 8;
  cfg.samples_per_identity = 3;
  cfg.seed = 4;
  const SynthOutput data = generate(cfg);

  const size_t per_modality = 8 * 3;
  CHECK(data.raw.size() == 2 * per_modality);
  CHECK(data.embeddings.size() == 2 * per_modality);
  CHECK(data.truth.samples.size() == 2 * per_modality);

  std::map<std::string, std::string> identity_of;
  for (const auto& r : data.embeddings) {
    REQUIRE(r.identity.has_value());
    identity_of[r.sample_id] = *r.identity;
    CHECK(r.vector.size() == size_t(cfg.dim_embed));
  }
  for (const auto& r : data.raw) {
    CHECK(r.vector.size() == size_t(cfg.dim_raw));
  }

  // pairs: every positive, equally many negatives, labels consistent
  size_t positives = 0, negatives = 0;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : data.pairs) {
    REQUIRE(p.label.has_value());
    CHECK(*p.label ==
          (identity_of.at(p.voice_id) == identity_of.at(p.face_id)));
    CHECK(seen.insert({p.voice_id, p.face_id}).second);  // no duplicates
    (*p.label ? positives : negatives) += 1;
  }
  CHECK(positives == per_modality * 3);  // every voice x same-identity face
  CHECK(negatives == positives);

  // truth metadata: voices carry a language, faces do not
  for (const auto& t : data.truth.samples) {
    const bool is_voice = t.sample_id[0] == 'v';
    CHECK((t.language >= 0) == is_voice);
    CHECK((t.gender == 0 || t.gender == 1));
    CHECK(!t.outlier);  // rate 0
  }
  const std::string csv = serialize_truth_csv(data.truth);
  CHECK(csv.rfind("sample_id,identity,gender,language,outlier\n", 0) == 0);
}

TEST_CASE("generation is deterministic per seed") {
  SynthConfig cfg;
  cfg.identities = 6;
  cfg.samples_per_identity = 2;
  cfg.outlier_rate = 0.2;
  cfg.seed = 77;
  const SynthOutput a = generate(cfg);
  const SynthOutput b = generate(cfg);
  CHECK(serialize_embeddings(a.raw) == serialize_embeddings(b.raw));
  CHECK(serialize_embeddings(a.embeddings) ==
        serialize_embeddings(b.embeddings));
  CHECK(serialize_pairs(a.pairs) == serialize_pairs(b.pairs));
  CHECK(serialize_truth_csv(a.truth) == serialize_truth_csv(b.truth));

  cfg.seed = 78;
  const SynthOutput c = generate(cfg);
  CHECK(serialize_embeddings(a.embeddings) !=
        serialize_embeddings(c.embeddings));
}

TEST_CASE("outlier bookkeeping") {
  SynthConfig cfg;
  cfg.identities = 10;
  cfg.samples_per_identity = 5;
  cfg.seed = 21;

  SUBCASE("count is the rounded fraction of all samples") {
    for (double rate : {0.0, 0.1, 0.25, 0.3}) {
      cfg.outlier_rate = rate;
      const SynthOutput data = generate(cfg);
      size_t flagged = 0;
      for (const auto& t : data.truth.samples) flagged += t.outlier;
      CHECK(flagged ==
            size_t(std::lround(rate * double(data.truth.samples.size()))));
    }
  }

  SUBCASE("outlier sets nest as the rate grows") {
    cfg.outlier_rate = 0.1;
    const SynthOutput small = generate(cfg);
    cfg.outlier_rate = 0.3;
    const SynthOutput large = generate(cfg);
    std::set<std::string> big;
    for (const auto& t : large.truth.samples) {
      if (t.outlier) big.insert(t.sample_id);
    }
    for (const auto& t : small.truth.samples) {
      if (t.outlier) CHECK(big.count(t.sample_id) == 1);
    }
  }

  SUBCASE("every corruption kind parses and runs") {
    for (const char* name :
         {"label-swap", "noise-blast", "cross-gender-swap"}) {
      cfg.outlier_kind = parse_outlier_kind(name);
      CHECK(to_string(cfg.outlier_kind) == name);
      cfg.outlier_rate = 0.2;
      const SynthOutput data = generate(cfg);
      CHECK(data.embeddings.size() == 100);
    }
    CHECK_THROWS_AS(parse_outlier_kind("melt"), DataError);
  }
}

TEST_CASE("clean corpora separate positives from negatives") {
  SynthConfig cfg;
  cfg.identities = 12;
  cfg.samples_per_identity = 3;
  cfg.noise_sigma = 0.0;
  cfg.seed = 31;
  const SynthOutput data = generate(cfg);
  const ScoreSet scores = score_pairs(data);

  double worst_pos = -1.0, best_neg = 3.0;
  for (size_t i = 0; i < scores.entries.size(); ++i) {
    const double s = scores.entries[i].score;
    if (*data.pairs[i].label) {
      worst_pos = std::max(worst_pos, s);
    } else {
      best_neg = std::min(best_neg, s);
    }
  }
  CHECK(worst_pos < best_neg);
  CHECK(eer(scores, data.pairs).eer == 0.0);
}

TEST_CASE("gender split is recoverable from the embeddings") {
  SynthConfig cfg;
  cfg.identities = 20;
  cfg.samples_per_identity = 4;
  cfg.seed = 13;
  const SynthOutput data = generate(cfg);

  std::map<std::string, int> truth_gender;
  for (const auto& t : data.truth.samples) {
    truth_gender[t.sample_id] = t.gender;
  }

  for (Modality m : {Modality::Voice, Modality::Face}) {
    std::vector<Vec> points;
    std::vector<int> truth;
    for (const auto& r : data.embeddings) {
      if (r.modality != m) continue;
      points.push_back(r.vector);
      truth.push_back(truth_gender.at(r.sample_id));
    }
    const ClusterModel model = kmeans_fit(points, 2, 5);
    size_t agree = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
      agree += model.assignments[i] == truth[i];
    }
    const double acc =
        std::max(agree, truth.size() - agree) / double(truth.size());
    CHECK(acc >= 0.99);
  }
}

TEST_CASE("outlier contamination does not improve raw EER") {
  size_t degraded = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig cfg;
    cfg.identities = 12;
    cfg.samples_per_identity = 3;
    cfg.seed = seed;

    cfg.outlier_rate = 0.0;
    const double clean = eer(score_pairs(generate(cfg)),
                             generate(cfg).pairs).eer;
    cfg.outlier_rate = 0.3;
    const SynthOutput noisy = generate(cfg);
    const double stressed = eer(score_pairs(noisy), noisy.pairs).eer;
    CHECK(stressed >= clean - 1e-12);
    degraded += stressed > clean;
  }
  CHECK(degraded >= 5);  // contamination visibly hurts on most seeds
}
