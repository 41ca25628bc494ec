#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "vfa/common.hpp"

namespace vfa {

struct ClusterModel {
  int k = 0;
  std::vector<Vec> centers;
  std::vector<int> assignments;    // per sample, in [0, k)
  std::vector<double> distances;   // per sample, L2 to own center
  double inertia = 0.0;            // sum of squared distances
  std::vector<double> inertia_history;  // per Lloyd iteration, winning restart
};

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;   // relative inertia change
  int restarts = 5;
};

/// Lloyd's algorithm with k-means++ seeding; among restarts the lowest
/// inertia wins (ties by lowest restart index). Empty clusters are reseeded
/// at the point farthest from its current center. Deterministic per seed.
ClusterModel kmeans_fit(const std::vector<Vec>& points, int k, uint64_t seed,
                        const KMeansOptions& opts = {});

/// Nearest center and its distance; exact ties go to the lowest index.
std::pair<int, double> kmeans_assign(const ClusterModel& model,
                                     const Vec& point);

struct ThresholdRule {
  enum class Kind { Absolute, Percentile };
  Kind kind = Kind::Percentile;
  double value = 90.0;

  static ThresholdRule absolute(double t) {
    return {Kind::Absolute, t};
  }
  static ThresholdRule percentile(double p) {
    return {Kind::Percentile, p};
  }
};

/// Resolve a rule to a concrete distance threshold. Percentiles use the
/// nearest-rank method over the given distances; valid range is (0, 100].
double resolve_threshold(const ThresholdRule& rule,
                         const std::vector<double>& distances);

/// Indices of samples whose distance to their center is <= the threshold.
std::vector<size_t> distance_filter(const ClusterModel& model,
                                    const ThresholdRule& rule);

struct ElbowReport {
  std::vector<int> candidates;
  std::vector<double> totals;  // plain (unsquared) L2 sums per candidate
  std::vector<double> diffs;   // totals[i-1] - totals[i]; diffs[0] = 0
  int selected = 0;
};

/// Fits every candidate k (best of restarts each, shared seed schedule) and
/// picks the candidate whose diff lands in the top quartile of diffs and
/// whose k is nearest to `target` (ties to the smaller k).
ElbowReport elbow_select(const std::vector<Vec>& points,
                         const std::vector<int>& k_candidates, int target,
                         uint64_t seed, const KMeansOptions& opts = {});

std::string serialize_elbow_csv(const ElbowReport& report);
void write_elbow_csv(const std::filesystem::path& path,
                     const ElbowReport& report);

}  // namespace vfa
