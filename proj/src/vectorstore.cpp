#include "vfa/vectorstore.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace vfa {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw NumericError("dimension mismatch: " + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double cosine_similarity(const Vec& a, const Vec& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw NumericError("cosine_similarity: zero-norm input");
  }
  return dot(a, b) / (na * nb);
}

double l2_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw NumericError("l2_distance: dimension mismatch");
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec normalize(const Vec& v) {
  const double n = norm(v);
  if (n == 0.0) throw NumericError("normalize: zero vector");
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<std::string> lines;
  if (content.empty()) return lines;
  if (content.back() == '\n') content.pop_back();
  return split(content, '\n');
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out << content;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<EmbeddingRecord> read_embeddings(
    const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<EmbeddingRecord> records;
  if (lines.empty()) return records;

  const std::string& header = lines[0];
  if (header.rfind("#dim ", 0) != 0) {
    throw DataError(path.string() + ":1: expected header \"#dim <d>\"");
  }
  size_t dim = 0;
  try {
    dim = std::stoul(header.substr(5));
  } catch (const std::exception&) {
    throw DataError(path.string() + ":1: bad dimension in header");
  }

  std::unordered_map<std::string, size_t> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::vector<std::string> fields = split(lines[i], '\t');
    if (fields.size() != 4) {
      throw DataError(where + ": expected 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    EmbeddingRecord rec;
    rec.sample_id = fields[0];
    if (rec.sample_id.empty()) throw DataError(where + ": empty sample_id");
    rec.modality = parse_modality(fields[1]);
    if (fields[2] != "-") rec.identity = fields[2];
    const std::vector<std::string> values = split(fields[3], ' ');
    if (values.size() != dim) {
      throw DataError(where + ": expected " + std::to_string(dim) +
                      " values, got " + std::to_string(values.size()));
    }
    rec.vector.reserve(dim);
    for (const std::string& v : values) {
      rec.vector.push_back(parse_double(v, where));
    }
    if (!seen.emplace(rec.sample_id, i).second) {
      throw DataError(where + ": duplicate sample_id '" + rec.sample_id + "'");
    }
    records.push_back(std::move(rec));
  }
  if (!records.empty() && dim < 2) {
    throw DataError(path.string() + ": dimension must be >= 2, got " +
                    std::to_string(dim));
  }
  return records;
}

std::string serialize_embeddings(const std::vector<EmbeddingRecord>& records) {
  const size_t dim = records.empty() ? 0 : records[0].vector.size();
  std::string out = "#dim " + std::to_string(dim) + "\n";
  for (const EmbeddingRecord& rec : records) {
    if (rec.vector.size() != dim) {
      throw DataError("inconsistent dimension for sample '" + rec.sample_id +
                      "'");
    }
    out += rec.sample_id;
    out += '\t';
    out += to_string(rec.modality);
    out += '\t';
    out += rec.identity ? *rec.identity : "-";
    out += '\t';
    for (size_t i = 0; i < rec.vector.size(); ++i) {
      if (i) out += ' ';
      out += format_double(rec.vector[i]);
    }
    out += '\n';
  }
  return out;
}

void write_embeddings(const std::filesystem::path& path,
                      const std::vector<EmbeddingRecord>& records) {
  write_file_atomic(path, serialize_embeddings(records));
}

std::vector<TestPair> read_pairs(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw DataError(path.string() + ": empty pair manifest");
  if (lines[0] != "voice_id,face_id,label") {
    throw DataError(path.string() +
                    ":1: expected header \"voice_id,face_id,label\"");
  }
  std::vector<TestPair> pairs;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != 3) {
      throw DataError(where + ": expected 3 comma-separated fields");
    }
    TestPair p;
    p.voice_id = fields[0];
    p.face_id = fields[1];
    if (p.voice_id.empty() || p.face_id.empty()) {
      throw DataError(where + ": empty id");
    }
    if (fields[2] == "1") {
      p.label = true;
    } else if (fields[2] == "0") {
      p.label = false;
    } else if (!fields[2].empty()) {
      throw DataError(where + ": label must be 0, 1 or empty");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::string serialize_pairs(const std::vector<TestPair>& pairs) {
  std::string out = "voice_id,face_id,label\n";
  for (const TestPair& p : pairs) {
    out += p.voice_id;
    out += ',';
    out += p.face_id;
    out += ',';
    if (p.label) out += *p.label ? "1" : "0";
    out += '\n';
  }
  return out;
}

void write_pairs(const std::filesystem::path& path,
                 const std::vector<TestPair>& pairs) {
  write_file_atomic(path, serialize_pairs(pairs));
}

ScoreSet read_scores(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw DataError(path.string() + ": empty score file");
  if (lines[0] != "voice_id,face_id,score") {
    throw DataError(path.string() +
                    ":1: expected header \"voice_id,face_id,score\"");
  }
  ScoreSet scores;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != 3) {
      throw DataError(where + ": expected 3 comma-separated fields");
    }
    ScoreEntry e;
    e.voice_id = fields[0];
    e.face_id = fields[1];
    e.score = parse_double(fields[2], where);
    scores.entries.push_back(std::move(e));
  }
  return scores;
}

std::string serialize_scores(const ScoreSet& scores) {
  std::string out = "voice_id,face_id,score\n";
  for (const ScoreEntry& e : scores.entries) {
    out += e.voice_id;
    out += ',';
    out += e.face_id;
    out += ',';
    out += format_double(e.score);
    out += '\n';
  }
  return out;
}

void write_scores(const std::filesystem::path& path, const ScoreSet& scores) {
  write_file_atomic(path, serialize_scores(scores));
}

EmbeddingIndex::EmbeddingIndex(const std::vector<EmbeddingRecord>& records)
    : records_(records) {
  for (size_t i = 0; i < records_.size(); ++i) {
    auto& map = records_[i].modality == Modality::Voice ? voice_by_id_
                                                        : face_by_id_;
    if (!map.emplace(records_[i].sample_id, i).second) {
      throw DataError("duplicate sample_id '" + records_[i].sample_id + "'");
    }
  }
}

const EmbeddingRecord& EmbeddingIndex::voice(const std::string& id) const {
  auto it = voice_by_id_.find(id);
  if (it == voice_by_id_.end()) {
    throw DataError("unknown voice sample_id '" + id + "'");
  }
  return records_[it->second];
}

const EmbeddingRecord& EmbeddingIndex::face(const std::string& id) const {
  auto it = face_by_id_.find(id);
  if (it == face_by_id_.end()) {
    throw DataError("unknown face sample_id '" + id + "'");
  }
  return records_[it->second];
}

}  // namespace vfa
