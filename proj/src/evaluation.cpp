#include "vfa/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "vfa/vectorstore.hpp"

namespace vfa {

namespace {

struct SplitScores {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

SplitScores split_scores(const std::vector<double>& scores,
                         const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw DataError("score/label count mismatch");
  }
  SplitScores out;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("non-finite score");
    (labels[i] ? out.genuine : out.impostor).push_back(scores[i]);
  }
  if (out.genuine.empty()) throw DataError("no genuine pairs");
  if (out.impostor.empty()) throw DataError("no impostor pairs");
  return out;
}

}  // namespace

std::pair<double, double> far_frr(const std::vector<double>& scores,
                                  const std::vector<bool>& labels,
                                  double threshold) {
  SplitScores s = split_scores(scores, labels);
  size_t accepted_imp = 0;
  for (double v : s.impostor) {
    if (v <= threshold) ++accepted_imp;
  }
  size_t rejected_gen = 0;
  for (double v : s.genuine) {
    if (v > threshold) ++rejected_gen;
  }
  return {static_cast<double>(accepted_imp) / s.impostor.size(),
          static_cast<double>(rejected_gen) / s.genuine.size()};
}

EvalResult eer(const std::vector<double>& scores,
               const std::vector<bool>& labels) {
  SplitScores s = split_scores(scores, labels);
  std::sort(s.genuine.begin(), s.genuine.end());
  std::sort(s.impostor.begin(), s.impostor.end());

  std::vector<double> distinct = scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  std::vector<double> sweep;
  sweep.push_back(distinct.front() - 1.0);
  for (size_t i = 0; i + 1 < distinct.size(); ++i) {
    sweep.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  }
  sweep.push_back(distinct.back() + 1.0);

  EvalResult result;
  result.roc_points.reserve(sweep.size());
  for (double t : sweep) {
    const auto imp_acc = std::upper_bound(s.impostor.begin(), s.impostor.end(),
                                          t) -
                         s.impostor.begin();
    const auto gen_acc = std::upper_bound(s.genuine.begin(), s.genuine.end(),
                                          t) -
                         s.genuine.begin();
    RocPoint p;
    p.threshold = t;
    p.far = static_cast<double>(imp_acc) / s.impostor.size();
    p.frr = 1.0 - static_cast<double>(gen_acc) / s.genuine.size();
    result.roc_points.push_back(p);
  }

  // far - frr is non-decreasing along the sweep; find the crossing
  size_t idx = result.roc_points.size();
  for (size_t i = 0; i < result.roc_points.size(); ++i) {
    if (result.roc_points[i].far >= result.roc_points[i].frr) {
      idx = i;
      break;
    }
  }
  if (idx == result.roc_points.size()) {
    // cannot happen: the last sweep point has far = 1, frr = 0
    throw NumericError("eer: no FAR/FRR crossing found");
  }
  const RocPoint& hi = result.roc_points[idx];
  if (hi.far == hi.frr || idx == 0) {
    result.eer = hi.far;
    result.threshold_at_eer = hi.threshold;
  } else {
    const RocPoint& lo = result.roc_points[idx - 1];
    const double denom = (hi.far - lo.far) + (lo.frr - hi.frr);
    const double t = (lo.frr - lo.far) / denom;
    result.eer = lo.far + t * (hi.far - lo.far);
    result.threshold_at_eer = lo.threshold + t * (hi.threshold - lo.threshold);
  }
  return result;
}

EvalResult eer(const ScoreSet& scores, const std::vector<TestPair>& pairs) {
  if (scores.entries.size() != pairs.size()) {
    throw DataError("score set and pair manifest differ in length");
  }
  std::vector<double> values;
  std::vector<bool> labels;
  values.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    const ScoreEntry& e = scores.entries[i];
    const TestPair& p = pairs[i];
    if (e.voice_id != p.voice_id || e.face_id != p.face_id) {
      throw DataError("score row " + std::to_string(i + 1) +
                      " does not match the pair manifest");
    }
    if (!p.label) {
      throw DataError("pair " + p.voice_id + "," + p.face_id +
                      " has no label");
    }
    values.push_back(e.score);
    labels.push_back(*p.label);
  }
  return eer(values, labels);
}

Report make_report(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw DataError("report: no configurations");
  Report report;
  report.rows = rows;
  double sum = 0.0;
  for (const ReportRow& r : rows) sum += r.eer;
  report.overall = sum / static_cast<double>(rows.size());
  return report;
}

std::string display_one_decimal(double value) {
  // damp accumulated binary error before the final half-away-from-zero round
  const double damped = std::round(value * 1e9) / 1e9;
  const double rounded = std::round(damped * 10.0) / 10.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", rounded);
  return buf;
}

std::string serialize_report_csv(const Report& report) {
  std::string out = "config,eer\n";
  for (const ReportRow& r : report.rows) {
    out += r.config;
    out += ',';
    out += format_double(r.eer);
    out += '\n';
  }
  out += "overall,";
  out += format_double(report.overall);
  out += '\n';
  return out;
}

void write_report_csv(const std::filesystem::path& path,
                      const Report& report) {
  write_file_atomic(path, serialize_report_csv(report));
}

std::string serialize_roc_csv(const EvalResult& result) {
  std::string out = "threshold,far,frr\n";
  for (const RocPoint& p : result.roc_points) {
    out += format_double(p.threshold);
    out += ',';
    out += format_double(p.far);
    out += ',';
    out += format_double(p.frr);
    out += '\n';
  }
  return out;
}

void write_roc_csv(const std::filesystem::path& path,
                   const EvalResult& result) {
  write_file_atomic(path, serialize_roc_csv(result));
}

}  // namespace vfa
