#include "vfa/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "vfa/vectorstore.hpp"

namespace vfa {

namespace {

double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct Assignment {
  std::vector<int> labels;
  std::vector<double> sq_dists;
  double inertia = 0.0;
};

Assignment assign_all(const std::vector<Vec>& points,
                      const std::vector<Vec>& centers) {
  Assignment a;
  a.labels.resize(points.size());
  a.sq_dists.resize(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = squared_distance(points[i], centers[0]);
    for (size_t c = 1; c < centers.size(); ++c) {
      const double d = squared_distance(points[i], centers[c]);
      if (d < best_d) {  // strict: exact ties keep the lowest index
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    a.labels[i] = best;
    a.sq_dists[i] = best_d;
    a.inertia += best_d;
  }
  return a;
}

std::vector<Vec> kmeanspp_init(const std::vector<Vec>& points, int k,
                               std::mt19937_64& rng) {
  const size_t n = points.size();
  std::vector<Vec> centers;
  centers.reserve(k);
  std::uniform_int_distribution<size_t> first(0, n - 1);
  centers.push_back(points[first(rng)]);

  std::vector<double> sq(n);
  for (size_t i = 0; i < n; ++i) sq[i] = squared_distance(points[i], centers[0]);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double d : sq) total += d;
    size_t chosen = 0;
    if (total > 0.0) {
      const double r = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (size_t i = 0; i < n; ++i) {
        acc += sq[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    } else {
      // all remaining mass zero (duplicate points); pick uniformly
      chosen = first(rng);
    }
    centers.push_back(points[chosen]);
    for (size_t i = 0; i < n; ++i) {
      sq[i] = std::min(sq[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

struct RunResult {
  std::vector<Vec> centers;
  Assignment assignment;
  std::vector<double> history;
};

RunResult lloyd_run(const std::vector<Vec>& points, int k, uint64_t run_seed,
                    const KMeansOptions& opts) {
  std::mt19937_64 rng(run_seed);
  const size_t n = points.size();
  const size_t dim = points[0].size();

  RunResult run;
  run.centers = kmeanspp_init(points, k, rng);
  run.assignment = assign_all(points, run.centers);
  run.history.push_back(run.assignment.inertia);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // update step: centers become cluster means
    std::vector<Vec> sums(k, Vec(dim, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      const int c = run.assignment.labels[i];
      ++counts[c];
      for (size_t j = 0; j < dim; ++j) sums[c][j] += points[i][j];
    }
    std::vector<bool> repaired(n, false);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (size_t j = 0; j < dim; ++j) {
          run.centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        }
      } else {
        // empty-cluster repair: reseed at the point farthest from its
        // current center (skipping points already used this round)
        size_t far_idx = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          if (repaired[i]) continue;
          if (run.assignment.sq_dists[i] > far_d) {
            far_d = run.assignment.sq_dists[i];
            far_idx = i;
          }
        }
        run.centers[c] = points[far_idx];
        repaired[far_idx] = true;
      }
    }

    const double prev = run.assignment.inertia;
    Assignment next = assign_all(points, run.centers);
    const bool stable = next.labels == run.assignment.labels;
    run.assignment = std::move(next);
    run.history.push_back(run.assignment.inertia);
    if (stable) break;
    if (prev > 0.0 && (prev - run.assignment.inertia) / prev < opts.tol) break;
  }
  return run;
}

}  // namespace

ClusterModel kmeans_fit(const std::vector<Vec>& points, int k, uint64_t seed,
                        const KMeansOptions& opts) {
  if (k <= 0) throw NumericError("kmeans_fit: k must be positive");
  if (points.empty() || static_cast<size_t>(k) > points.size()) {
    throw NumericError("kmeans_fit: k (" + std::to_string(k) +
                       ") exceeds sample count (" +
                       std::to_string(points.size()) + ")");
  }
  const size_t dim = points[0].size();
  for (const Vec& p : points) {
    if (p.size() != dim) throw NumericError("kmeans_fit: mixed dimensions");
  }

  RunResult best;
  bool have_best = false;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    RunResult run = lloyd_run(points, k, derive_seed(seed, "kmeans", r), opts);
    if (!have_best || run.assignment.inertia < best.assignment.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }

  ClusterModel model;
  model.k = k;
  model.centers = std::move(best.centers);
  model.assignments = std::move(best.assignment.labels);
  model.distances.resize(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    model.distances[i] = std::sqrt(best.assignment.sq_dists[i]);
  }
  model.inertia = best.assignment.inertia;
  model.inertia_history = std::move(best.history);
  return model;
}

std::pair<int, double> kmeans_assign(const ClusterModel& model,
                                     const Vec& point) {
  if (model.centers.empty()) throw NumericError("kmeans_assign: empty model");
  if (point.size() != model.centers[0].size()) {
    throw NumericError("kmeans_assign: dimension mismatch");
  }
  int best = 0;
  double best_d = squared_distance(point, model.centers[0]);
  for (size_t c = 1; c < model.centers.size(); ++c) {
    const double d = squared_distance(point, model.centers[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return {best, std::sqrt(best_d)};
}

double resolve_threshold(const ThresholdRule& rule,
                         const std::vector<double>& distances) {
  if (rule.kind == ThresholdRule::Kind::Absolute) return rule.value;
  if (rule.value <= 0.0 || rule.value > 100.0) {
    throw NumericError("percentile must be in (0, 100]");
  }
  if (distances.empty()) {
    throw NumericError("percentile threshold over empty distance set");
  }
  std::vector<double> sorted = distances;
  std::sort(sorted.begin(), sorted.end());
  // nearest-rank percentile
  const size_t rank = std::max<size_t>(
      1, static_cast<size_t>(
             std::ceil(rule.value / 100.0 * static_cast<double>(sorted.size()))));
  return sorted[std::min(rank, sorted.size()) - 1];
}

std::vector<size_t> distance_filter(const ClusterModel& model,
                                    const ThresholdRule& rule) {
  const double threshold = resolve_threshold(rule, model.distances);
  std::vector<size_t> inliers;
  for (size_t i = 0; i < model.distances.size(); ++i) {
    if (model.distances[i] <= threshold) inliers.push_back(i);
  }
  return inliers;
}

ElbowReport elbow_select(const std::vector<Vec>& points,
                         const std::vector<int>& k_candidates, int target,
                         uint64_t seed, const KMeansOptions& opts) {
  if (k_candidates.empty()) {
    throw NumericError("elbow_select: empty candidate list");
  }
  if (!std::is_sorted(k_candidates.begin(), k_candidates.end())) {
    throw NumericError("elbow_select: candidates must be sorted ascending");
  }
  if (target < 1) throw NumericError("elbow_select: target must be >= 1");

  KMeansOptions run_opts = opts;
  run_opts.restarts = std::max(5, opts.restarts);

  ElbowReport report;
  report.candidates = k_candidates;
  for (int k : k_candidates) {
    ClusterModel model = kmeans_fit(
        points, k, derive_seed(seed, "elbow", static_cast<uint64_t>(k)),
        run_opts);
    double total = 0.0;
    for (double d : model.distances) total += d;
    report.totals.push_back(total);
  }
  report.diffs.resize(report.totals.size(), 0.0);
  for (size_t i = 1; i < report.totals.size(); ++i) {
    report.diffs[i] = report.totals[i - 1] - report.totals[i];
  }

  if (k_candidates.size() == 1) {
    report.selected = k_candidates[0];
    return report;
  }

  // eligible candidates: diff in the top quartile (nearest-rank 75th
  // percentile over diffs of candidates with a predecessor)
  std::vector<double> diffs(report.diffs.begin() + 1, report.diffs.end());
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  const size_t rank = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(0.75 * static_cast<double>(sorted.size()))));
  const double cutoff = sorted[rank - 1];

  int best_k = -1;
  for (size_t i = 1; i < report.candidates.size(); ++i) {
    if (report.diffs[i] < cutoff) continue;
    const int k = report.candidates[i];
    if (best_k < 0 || std::abs(k - target) < std::abs(best_k - target)) {
      best_k = k;
    }
  }
  report.selected = best_k;
  return report;
}

std::string serialize_elbow_csv(const ElbowReport& report) {
  std::string out = "k,total_l2,diff\n";
  for (size_t i = 0; i < report.candidates.size(); ++i) {
    out += std::to_string(report.candidates[i]);
    out += ',';
    out += format_double(report.totals[i]);
    out += ',';
    out += format_double(report.diffs[i]);
    out += '\n';
  }
  return out;
}

void write_elbow_csv(const std::filesystem::path& path,
                     const ElbowReport& report) {
  write_file_atomic(path, serialize_elbow_csv(report));
}

}  // namespace vfa
