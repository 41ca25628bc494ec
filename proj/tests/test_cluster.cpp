#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vfa/cluster.hpp"
#include "vfa/vectorstore.hpp"

using namespace vfa;

namespace {

/// Seeded gaussian blob generator.
std::vector<Vec> make_blobs(const std::vector<Vec>& centers, size_t per_blob,
                            double sigma, uint64_t seed,
                            std::vector<int>* truth = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Vec> points;
  for (size_t c = 0; c < centers.size(); ++c) {
    for (size_t i = 0; i < per_blob; ++i) {
      Vec p = centers[c];
      for (double& x : p) x += noise(rng);
      points.push_back(std::move(p));
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  return points;
}

}  // namespace

TEST_CASE("kmeans on symmetric pairs") {
  const std::vector<Vec> points = {{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  const ClusterModel model = kmeans_fit(points, 2, 1);
  CHECK(model.inertia == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<Vec> centers = model.centers;
  std::sort(centers.begin(), centers.end());
  CHECK(centers[0][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(centers[0][1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(centers[1][0] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(centers[1][1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kmeans edge cases") {
  SUBCASE("k=1 center is the mean") {
    std::mt19937_64 rng(2);
    const std::vector<Vec> points = {
        testutil::random_vec(3, rng), testutil::random_vec(3, rng),
        testutil::random_vec(3, rng), testutil::random_vec(3, rng)};
    const ClusterModel model = kmeans_fit(points, 1, 0);
    Vec mean(3, 0.0);
    for (const Vec& p : points) {
      for (size_t j = 0; j < 3; ++j) mean[j] += p[j];
    }
    for (size_t j = 0; j < 3; ++j) {
      CHECK(model.centers[0][j] ==
            doctest::Approx(mean[j] / 4.0).epsilon(1e-12));
    }
  }
  SUBCASE("k equal to distinct point count gives zero inertia") {
    const std::vector<Vec> points = {{0, 0}, {5, 5}, {9, 1}};
    const ClusterModel model = kmeans_fit(points, 3, 7);
    CHECK(model.inertia == doctest::Approx(0.0).epsilon(1e-18));
  }
  SUBCASE("invalid k") {
    const std::vector<Vec> points = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(kmeans_fit(points, 0, 0), NumericError);
    CHECK_THROWS_AS(kmeans_fit(points, 3, 0), NumericError);
  }
  SUBCASE("duplicated identical points: empty-cluster repair, no crash") {
    const std::vector<Vec> points(6, Vec{1.0, 2.0});
    const ClusterModel model = kmeans_fit(points, 2, 3);
    CHECK(model.inertia == doctest::Approx(0.0).epsilon(1e-18));
  }
}

TEST_CASE("kmeans invariants over seeded runs") {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 rng(seed * 31 + 1);
    std::vector<Vec> points;
    const size_t n = 20 + seed % 30;
    const size_t dim = 2 + seed % 4;
    for (size_t i = 0; i < n; ++i) {
      points.push_back(testutil::random_vec(dim, rng, -5.0, 5.0));
    }
    const int k = 1 + static_cast<int>(seed % 5);
    const ClusterModel model = kmeans_fit(points, k, seed);

    // inertia non-increasing across Lloyd iterations
    for (size_t i = 1; i < model.inertia_history.size(); ++i) {
      CHECK(model.inertia_history[i] <= model.inertia_history[i - 1] + 1e-9);
    }
    CHECK(model.inertia == model.inertia_history.back());

    // inertia equals the sum of squared distances
    double sum_sq = 0.0;
    for (double d : model.distances) sum_sq += d * d;
    CHECK(model.inertia == doctest::Approx(sum_sq).epsilon(1e-9));

    // converged model is a fixed point under reassignment
    for (size_t i = 0; i < points.size(); ++i) {
      const auto [c, d] = kmeans_assign(model, points[i]);
      CHECK(c == model.assignments[i]);
      CHECK(d == doctest::Approx(model.distances[i]).epsilon(1e-12));
    }

    // bitwise reproducible per seed
    const ClusterModel again = kmeans_fit(points, k, seed);
    CHECK(again.assignments == model.assignments);
    for (int c = 0; c < k; ++c) CHECK(again.centers[c] == model.centers[c]);
    CHECK(again.inertia == model.inertia);
  }
}

TEST_CASE("kmeans_assign") {
  const std::vector<Vec> points = {{0, 0}, {0, 2}, {10, 0}, {10, 2}};
  const ClusterModel model = kmeans_fit(points, 2, 5);

  SUBCASE("a center maps to itself") {
    const auto [c, d] = kmeans_assign(model, model.centers[1]);
    CHECK(c == 1);
    CHECK(d == 0.0);
  }
  SUBCASE("exact ties go to the lowest index") {
    Vec mid(2);
    for (size_t j = 0; j < 2; ++j) {
      mid[j] = 0.5 * (model.centers[0][j] + model.centers[1][j]);
    }
    const auto [c, d] = kmeans_assign(model, mid);
    CHECK(c == 0);
    CHECK(d > 0.0);
  }
  SUBCASE("matches an exhaustive nearest-center scan") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec p = testutil::random_vec(2, rng, -5.0, 15.0);
      const auto [c, d] = kmeans_assign(model, p);
      int best = 0;
      double best_d = l2_distance(p, model.centers[0]);
      for (size_t i = 1; i < model.centers.size(); ++i) {
        const double cd = l2_distance(p, model.centers[i]);
        if (cd < best_d) {
          best_d = cd;
          best = static_cast<int>(i);
        }
      }
      CHECK(c == best);
      CHECK(d == doctest::Approx(best_d).epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(kmeans_assign(model, Vec{1, 2, 3}), NumericError);
  }
}

TEST_CASE("elbow selection") {
  SUBCASE("single candidate is selected") {
    const std::vector<Vec> points = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    const ElbowReport report = elbow_select(points, {3}, 2, 0);
    CHECK(report.selected == 3);
  }

  SUBCASE("four separated blobs with target 4") {
    const std::vector<Vec> centers = {{0, 0}, {20, 0}, {0, 20}, {20, 20}};
    const std::vector<Vec> points = make_blobs(centers, 15, 0.5, 123);
    const ElbowReport report = elbow_select(points, {2, 3, 4, 5, 6, 7, 8}, 4, 9);
    CHECK(report.selected == 4);
    REQUIRE(report.totals.size() == 7);
    // totals non-increasing in k (best of restarts per candidate)
    for (size_t i = 1; i < report.totals.size(); ++i) {
      CHECK(report.totals[i] <= report.totals[i - 1] + 1e-6);
      CHECK(report.diffs[i] ==
            doctest::Approx(report.totals[i - 1] - report.totals[i])
                .epsilon(1e-12));
    }
  }

  SUBCASE("empty candidate list") {
    const std::vector<Vec> points = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(elbow_select(points, {}, 1, 0), NumericError);
  }

  SUBCASE("csv export") {
    const std::vector<Vec> points = {{0, 0}, {0, 1}, {9, 0}, {9, 1}};
    const ElbowReport report = elbow_select(points, {1, 2}, 2, 0);
    const std::string csv = serialize_elbow_csv(report);
    CHECK(csv.rfind("k,total_l2,diff\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }
}

TEST_CASE("distance filter") {
  const std::vector<Vec> points = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4},
                                   {0, 5}, {0, 6}, {0, 7}, {0, 8}, {0, 40}};
  const ClusterModel model = kmeans_fit(points, 1, 0);

  SUBCASE("infinite threshold keeps everything") {
    const auto kept = distance_filter(
        model, ThresholdRule::absolute(std::numeric_limits<double>::infinity()));
    CHECK(kept.size() == points.size());
  }
  SUBCASE("zero threshold keeps only points on the center") {
    const auto kept = distance_filter(model, ThresholdRule::absolute(0.0));
    CHECK(kept.empty());  // mean coincides with no sample here
  }
  SUBCASE("90th percentile on 10 samples keeps the 9 nearest") {
    const auto kept = distance_filter(model, ThresholdRule::percentile(90.0));
    CHECK(kept.size() == 9);
    // the far outlier (index 9) must be the one dropped
    CHECK(std::find(kept.begin(), kept.end(), 9) == kept.end());
  }
  SUBCASE("nearest-rank percentile matches a brute-force oracle") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Vec> pts;
      const size_t n = 3 + trial % 20;
      for (size_t i = 0; i < n; ++i) {
        pts.push_back(testutil::random_vec(2, rng, -3.0, 3.0));
      }
      const ClusterModel m = kmeans_fit(pts, 1, trial);
      const double p = 5.0 + (trial * 7) % 95;
      const auto kept = distance_filter(m, ThresholdRule::percentile(p));

      // oracle: sort distances, nearest-rank threshold, count <=
      std::vector<double> sorted = m.distances;
      std::sort(sorted.begin(), sorted.end());
      const size_t rank = std::max<size_t>(
          1, static_cast<size_t>(std::ceil(p / 100.0 * n)));
      const double thr = sorted[rank - 1];
      size_t expect = 0;
      for (double d : m.distances) {
        if (d <= thr) ++expect;
      }
      CHECK(kept.size() == expect);
    }
  }
  SUBCASE("monotone in the threshold") {
    const auto small = distance_filter(model, ThresholdRule::absolute(2.0));
    const auto large = distance_filter(model, ThresholdRule::absolute(5.0));
    CHECK(std::includes(large.begin(), large.end(), small.begin(),
                        small.end()));
  }
  SUBCASE("percentile out of range") {
    CHECK_THROWS_AS(distance_filter(model, ThresholdRule::percentile(0.0)),
                    NumericError);
    CHECK_THROWS_AS(distance_filter(model, ThresholdRule::percentile(101.0)),
                    NumericError);
  }
}
