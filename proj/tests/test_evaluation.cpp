#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vfa/evaluation.hpp"

using namespace vfa;

namespace {

/// Brute-force EER oracle: naive per-threshold counting over the same sweep
/// definition (midpoints plus sentinels), crossing by linear interpolation.
/// Independent of the sorted-prefix implementation path.
double brute_force_eer(const std::vector<double>& scores,
                       const std::vector<bool>& labels) {
  std::vector<double> distinct = scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> sweep;
  sweep.push_back(distinct.front() - 1.0);
  for (size_t i = 0; i + 1 < distinct.size(); ++i) {
    sweep.push_back((distinct[i] + distinct[i + 1]) / 2.0);
  }
  sweep.push_back(distinct.back() + 1.0);

  auto rates = [&](double t) {
    size_t imp = 0, imp_acc = 0, gen = 0, gen_rej = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (labels[i]) {
        ++gen;
        if (scores[i] > t) ++gen_rej;
      } else {
        ++imp;
        if (scores[i] <= t) ++imp_acc;
      }
    }
    return std::pair<double, double>(double(imp_acc) / imp,
                                     double(gen_rej) / gen);
  };

  double prev_far = 0.0, prev_frr = 1.0;
  bool have_prev = false;
  for (double t : sweep) {
    const auto [far, frr] = rates(t);
    if (far >= frr) {
      if (far == frr || !have_prev) return far;
      const double denom = (far - prev_far) + (prev_frr - frr);
      const double s = (prev_frr - prev_far) / denom;
      return prev_far + s * (far - prev_far);
    }
    prev_far = far;
    prev_frr = frr;
    have_prev = true;
  }
  return 1.0;
}

}  // namespace

TEST_CASE("far and frr at fixed thresholds") {
  const std::vector<double> scores = {0.1, 0.9};
  const std::vector<bool> labels = {true, false};

  auto [far, frr] = far_frr(scores, labels, 0.0);
  CHECK(far == 0.0);
  CHECK(frr == 1.0);

  std::tie(far, frr) = far_frr(scores, labels, 1.0);
  CHECK(far == 1.0);
  CHECK(frr == 0.0);

  std::tie(far, frr) = far_frr(scores, labels, 0.5);
  CHECK(far == 0.0);
  CHECK(frr == 0.0);

  // ties at the threshold count as accepts
  std::tie(far, frr) = far_frr({0.5, 0.5}, labels, 0.5);
  CHECK(far == 1.0);
  CHECK(frr == 0.0);

  CHECK_THROWS_AS(far_frr({0.1}, {true}, 0.5), DataError);   // empty class
  CHECK_THROWS_AS(far_frr({0.1}, {false}, 0.5), DataError);
}

TEST_CASE("eer on analytic cases") {
  SUBCASE("perfect separation") {
    const EvalResult r = eer({0.1, 0.2, 0.8, 0.9}, {true, true, false, false});
    CHECK(r.eer == 0.0);
  }
  SUBCASE("perfectly inverted") {
    const EvalResult r = eer({0.8, 0.9, 0.1, 0.2}, {true, true, false, false});
    CHECK(r.eer == 1.0);
  }
  SUBCASE("interleaved case gives exactly one third") {
    const EvalResult r = eer({0.1, 0.2, 0.6, 0.4, 0.8, 0.9},
                             {true, true, true, false, false, false});
    CHECK(r.eer == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("eer properties") {
  std::mt19937_64 rng(111);
  std::uniform_int_distribution<int> size_dist(2, 50);
  std::uniform_real_distribution<double> score_dist(0.0, 2.0);
  std::bernoulli_distribution label_dist(0.5);

  for (int trial = 0; trial < 300; ++trial) {
    const int n = size_dist(rng);
    std::vector<double> scores;
    std::vector<bool> labels;
    bool has_gen = false, has_imp = false;
    for (int i = 0; i < n; ++i) {
      scores.push_back(score_dist(rng));
      const bool l = label_dist(rng);
      labels.push_back(l);
      (l ? has_gen : has_imp) = true;
    }
    if (!has_gen || !has_imp) continue;

    const EvalResult r = eer(scores, labels);
    CHECK(r.eer >= 0.0);
    CHECK(r.eer <= 1.0);
    CHECK(r.eer == doctest::Approx(brute_force_eer(scores, labels))
                       .epsilon(1e-9));

    // ROC monotonicity: far non-decreasing, frr non-increasing
    for (size_t i = 1; i < r.roc_points.size(); ++i) {
      CHECK(r.roc_points[i].far >= r.roc_points[i - 1].far);
      CHECK(r.roc_points[i].frr <= r.roc_points[i - 1].frr);
    }

    // invariance under strictly increasing score transforms
    std::vector<double> mapped = scores;
    for (double& s : mapped) s = std::exp(1.7 * s) + 0.3 * s;
    CHECK(eer(mapped, labels).eer == doctest::Approx(r.eer).epsilon(1e-9));

    // role swap with negated scores is symmetric
    std::vector<double> negated = scores;
    for (double& s : negated) s = -s;
    std::vector<bool> flipped = labels;
    flipped.flip();
    CHECK(eer(negated, flipped).eer == doctest::Approx(r.eer).epsilon(1e-9));
  }
}

TEST_CASE("eer over score sets checks manifest alignment") {
  ScoreSet scores;
  scores.entries = {{"v1", "f1", 0.1}, {"v1", "f2", 0.9}};
  std::vector<TestPair> pairs = {{"v1", "f1", true}, {"v1", "f2", false}};
  CHECK(eer(scores, pairs).eer == 0.0);

  pairs[1].label.reset();
  CHECK_THROWS_AS(eer(scores, pairs), DataError);
  pairs[1] = {"v9", "f2", false};
  CHECK_THROWS_AS(eer(scores, pairs), DataError);
}

TEST_CASE("report arithmetic and display rule") {
  SUBCASE("single configuration") {
    const Report r = make_report({{"only", 0.123}});
    CHECK(r.overall == 0.123);
  }
  SUBCASE("headline table layout") {
    const Report r = make_report({{"eng-eng", 17.1},
                                  {"eng-urdu", 28.2},
                                  {"urdu-eng", 18.3},
                                  {"urdu-urdu", 18.4}});
    CHECK(display_one_decimal(r.overall) == "20.5");
  }
  SUBCASE("ablation table layout rounds 29.55 up") {
    const Report r = make_report({{"a", 32.6}, {"b", 34.3}, {"c", 25.2},
                                  {"d", 26.1}});
    CHECK(display_one_decimal(r.overall) == "29.6");
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(make_report({}), DataError);
  }
  SUBCASE("csv layout") {
    const Report r = make_report({{"a", 0.5}, {"b", 0.25}});
    CHECK(serialize_report_csv(r) ==
          "config,eer\na,0.5\nb,0.25\noverall,0.375\n");
  }
}
