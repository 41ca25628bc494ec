#pragma once

#include <filesystem>

#include "vfa/common.hpp"

namespace vfa {

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct EvalResult {
  double eer = 0.0;
  double threshold_at_eer = 0.0;
  std::vector<RocPoint> roc_points;
};

/// Scores are distance-like: accept iff score <= threshold (ties accept).
/// far = accepted impostors / impostors, frr = rejected genuines / genuines.
std::pair<double, double> far_frr(const std::vector<double>& scores,
                                  const std::vector<bool>& labels,
                                  double threshold);

/// Threshold sweep at midpoints between adjacent distinct scores plus
/// sentinels; EER at the FAR/FRR crossing, linearly interpolated between the
/// two adjacent sweep points when no exact equality exists.
EvalResult eer(const std::vector<double>& scores,
               const std::vector<bool>& labels);

/// Pulls scores/labels out of a ScoreSet and its labeled manifest (order and
/// ids must agree).
EvalResult eer(const ScoreSet& scores, const std::vector<TestPair>& pairs);

struct ReportRow {
  std::string config;
  double eer = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  double overall = 0.0;  // unweighted mean
};

Report make_report(const std::vector<ReportRow>& rows);

/// One-decimal display rule used for human-readable EER percentages
/// (machine output keeps full precision). Half-away-from-zero after damping
/// accumulated binary error, so 29.55 displays as "29.6".
std::string display_one_decimal(double value);

std::string serialize_report_csv(const Report& report);
void write_report_csv(const std::filesystem::path& path, const Report& report);

std::string serialize_roc_csv(const EvalResult& result);
void write_roc_csv(const std::filesystem::path& path, const EvalResult& result);

}  // namespace vfa
