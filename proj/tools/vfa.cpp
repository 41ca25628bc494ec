// vfa — voice-face association pipeline CLI.
//
// Subcommands: synth, train, embed, score, refine, eval, pipeline, replay.
// Exit codes: 0 success, 1 usage error, 2 data/format error,
// 3 numeric/degenerate-input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vfa/chain.hpp"
#include "vfa/cluster.hpp"
#include "vfa/common.hpp"
#include "vfa/contrastive.hpp"
#include "vfa/evaluation.hpp"
#include "vfa/synth.hpp"
#include "vfa/vectorstore.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

int run(const std::vector<std::string>& args);

void write_manifest(const fs::path& path, const std::string& subcommand,
                    const std::vector<std::string>& argv, uint64_t seed,
                    const json& config, const json& inputs,
                    const json& outputs) {
  json m;
  m["tool"] = "vfa";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  m["argv"] = argv;
  m["config"] = config;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  vfa::write_file_atomic(path, m.dump(2) + "\n");
}

struct SynthArgs {
  std::string out_dir;
  vfa::SynthConfig cfg;
  std::string outlier_kind = "noise-blast";
};

void add_synth_options(CLI::App* cmd, SynthArgs& a) {
  cmd->add_option("--out", a.out_dir, "output directory")->required();
  cmd->add_option("--seed", a.cfg.seed, "master seed");
  cmd->add_option("--identities", a.cfg.identities, "identity count");
  cmd->add_option("--samples", a.cfg.samples_per_identity,
                  "samples per identity per modality");
  cmd->add_option("--languages", a.cfg.languages, "spoken language count");
  cmd->add_option("--dim-latent", a.cfg.dim_latent, "identity latent dim");
  cmd->add_option("--dim-raw", a.cfg.dim_raw, "raw feature dim");
  cmd->add_option("--dim-embed", a.cfg.dim_embed, "embedding dim");
  cmd->add_option("--noise-sigma", a.cfg.noise_sigma, "per-sample noise");
  cmd->add_option("--outlier-rate", a.cfg.outlier_rate, "outlier fraction");
  cmd->add_option("--outlier-kind", a.outlier_kind,
                  "label-swap | noise-blast | cross-gender-swap");
  cmd->add_option("--gender-gap", a.cfg.gender_gap, "gender separation");
  cmd->add_option("--language-scale", a.cfg.language_scale,
                  "language offset scale");
}

json synth_config_json(const vfa::SynthConfig& c) {
  json j;
  j["identities"] = c.identities;
  j["samples_per_identity"] = c.samples_per_identity;
  j["languages"] = c.languages;
  j["dim_latent"] = c.dim_latent;
  j["dim_raw"] = c.dim_raw;
  j["dim_embed"] = c.dim_embed;
  j["noise_sigma"] = c.noise_sigma;
  j["outlier_rate"] = c.outlier_rate;
  j["outlier_kind"] = vfa::to_string(c.outlier_kind);
  j["gender_gap"] = c.gender_gap;
  j["language_scale"] = c.language_scale;
  return j;
}

void run_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
  vfa::SynthConfig cfg = a.cfg;
  cfg.outlier_kind = vfa::parse_outlier_kind(a.outlier_kind);
  const vfa::SynthOutput out = vfa::generate(cfg);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  vfa::write_embeddings(dir / "raw.tsv", out.raw);
  vfa::write_embeddings(dir / "embeddings.tsv", out.embeddings);
  vfa::write_pairs(dir / "pairs.csv", out.pairs);
  vfa::write_truth_csv(dir / "truth.csv", out.truth);
  write_manifest(dir / "synth.manifest.json", "synth", argv, cfg.seed,
                 synth_config_json(cfg),
                 json::object(),
                 {{"raw", "raw.tsv"},
                  {"embeddings", "embeddings.tsv"},
                  {"pairs", "pairs.csv"},
                  {"truth", "truth.csv"}});
}

struct TrainArgs {
  std::string raw_path;
  std::string voice_out;
  std::string face_out;
  std::string loss_out;
  vfa::TrainConfig cfg;
  std::string encoder = "linear";
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--raw", a.raw_path, "raw feature file")->required();
  cmd->add_option("--voice-encoder", a.voice_out, "voice encoder output")
      ->required();
  cmd->add_option("--face-encoder", a.face_out, "face encoder output")
      ->required();
  cmd->add_option("--loss-curve", a.loss_out, "per-epoch loss CSV output");
  cmd->add_option("--seed", a.cfg.seed, "master seed");
  cmd->add_option("--tau", a.cfg.tau, "softmax temperature");
  cmd->add_option("--batch-size", a.cfg.batch_size, "batch size");
  cmd->add_option("--learning-rate", a.cfg.learning_rate, "GD step size");
  cmd->add_option("--epochs", a.cfg.epochs, "training epochs");
  cmd->add_option("--encoder", a.encoder, "linear | onehidden");
  cmd->add_option("--embed-dim", a.cfg.embed_dim, "embedding dim");
  cmd->add_option("--hidden-dim", a.cfg.hidden_dim, "hidden layer dim");
  cmd->add_flag("--normalize-in-loss,!--no-normalize-in-loss",
                a.cfg.normalize_in_loss, "unit-normalize inside the loss");
  cmd->add_flag("--symmetric-loss", a.cfg.symmetric_loss,
                "average both anchoring directions");
  cmd->add_flag("--tie-output", a.cfg.tie_output,
                "share the output layer across branches");
}

json train_config_json(const vfa::TrainConfig& c) {
  json j;
  j["tau"] = c.tau;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["normalize_in_loss"] = c.normalize_in_loss;
  j["symmetric_loss"] = c.symmetric_loss;
  j["encoder"] = c.encoder_kind == vfa::EncoderKind::Linear ? "linear"
                                                            : "onehidden";
  j["embed_dim"] = c.embed_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["tie_output"] = c.tie_output;
  return j;
}

void run_train(const TrainArgs& a, const std::vector<std::string>& argv) {
  vfa::TrainConfig cfg = a.cfg;
  if (a.encoder == "linear") {
    cfg.encoder_kind = vfa::EncoderKind::Linear;
  } else if (a.encoder == "onehidden") {
    cfg.encoder_kind = vfa::EncoderKind::OneHidden;
  } else {
    throw vfa::DataError("unknown encoder kind '" + a.encoder + "'");
  }

  const auto records = vfa::read_embeddings(a.raw_path);
  std::vector<vfa::EmbeddingRecord> voice, face;
  for (const auto& r : records) {
    (r.modality == vfa::Modality::Voice ? voice : face).push_back(r);
  }
  const vfa::TrainResult result = vfa::train_encoders(voice, face, cfg);
  vfa::save_encoder(a.voice_out, result.voice);
  vfa::save_encoder(a.face_out, result.face);
  if (!a.loss_out.empty()) {
    std::string csv = "epoch,loss\n";
    for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
      csv += std::to_string(e) + "," + vfa::format_double(result.epoch_loss[e]) +
             "\n";
    }
    vfa::write_file_atomic(a.loss_out, csv);
  }
  write_manifest(fs::path(a.voice_out).string() + ".manifest.json", "train",
                 argv, cfg.seed, train_config_json(cfg),
                 {{"raw", a.raw_path}},
                 {{"voice_encoder", a.voice_out},
                  {"face_encoder", a.face_out}});
}

struct EmbedArgs {
  std::string raw_path;
  std::string voice_enc;
  std::string face_enc;
  std::string out;
};

void run_embed(const EmbedArgs& a, const std::vector<std::string>& argv) {
  const vfa::Encoder voice = vfa::load_encoder(a.voice_enc);
  const vfa::Encoder face = vfa::load_encoder(a.face_enc);
  const auto records = vfa::read_embeddings(a.raw_path);
  std::vector<vfa::EmbeddingRecord> encoded;
  encoded.reserve(records.size());
  for (const auto& r : records) {
    vfa::EmbeddingRecord e = r;
    e.vector = vfa::encode(
        r.modality == vfa::Modality::Voice ? voice : face, r.vector);
    encoded.push_back(std::move(e));
  }
  vfa::write_embeddings(a.out, encoded);
  write_manifest(a.out + ".manifest.json", "embed", argv, 0, json::object(),
                 {{"raw", a.raw_path},
                  {"voice_encoder", a.voice_enc},
                  {"face_encoder", a.face_enc}},
                 {{"embeddings", a.out}});
}

struct ScoreArgs {
  std::string embeddings;
  std::string pairs;
  std::string out;
};

vfa::ScoreSet initial_scores(const std::vector<vfa::TestPair>& pairs,
                             const vfa::EmbeddingIndex& index) {
  vfa::ScoreSet scores;
  scores.entries.reserve(pairs.size());
  for (const auto& p : pairs) {
    vfa::ScoreEntry e;
    e.voice_id = p.voice_id;
    e.face_id = p.face_id;
    e.score = vfa::initial_score(index.voice(p.voice_id).vector,
                                 index.face(p.face_id).vector);
    scores.entries.push_back(std::move(e));
  }
  return scores;
}

void run_score(const ScoreArgs& a, const std::vector<std::string>& argv) {
  const vfa::EmbeddingIndex index(vfa::read_embeddings(a.embeddings));
  const auto pairs = vfa::read_pairs(a.pairs);
  const vfa::ScoreSet scores = initial_scores(pairs, index);
  vfa::write_scores(a.out, scores);
  write_manifest(a.out + ".manifest.json", "score", argv, 0, json::object(),
                 {{"embeddings", a.embeddings}, {"pairs", a.pairs}},
                 {{"scores", a.out}});
}

struct RefineArgs {
  std::string embeddings;
  std::string pairs;
  std::string scores;
  std::string out;
  std::string report_dir;
  uint64_t seed = 0;
  vfa::RefineConfig cfg;
  double gender_percentile = 90.0;
  double identity_percentile = 90.0;
  double gender_abs = -1.0;
  double identity_abs = -1.0;
  int clusters = 0;
  int elbow_target = 0;
};

void add_refine_options(CLI::App* cmd, RefineArgs& a) {
  cmd->add_option("--sim-threshold", a.cfg.sim_threshold,
                  "prototype similarity reward threshold");
  cmd->add_option("--alpha", a.cfg.alpha, "reward shrink factor in (0,1]");
  cmd->add_option("--gender-percentile", a.gender_percentile,
                  "gender inlier percentile threshold");
  cmd->add_option("--identity-percentile", a.identity_percentile,
                  "identity inlier percentile threshold");
  cmd->add_option("--gender-threshold", a.gender_abs,
                  "absolute gender distance threshold (overrides percentile)");
  cmd->add_option("--identity-threshold", a.identity_abs,
                  "absolute identity distance threshold (overrides "
                  "percentile)");
  cmd->add_option("--clusters", a.clusters,
                  "fixed identity cluster count (0 = elbow method)");
  cmd->add_option("--elbow-target", a.elbow_target,
                  "elbow target cluster count (0 = half the set size)");
  cmd->add_option("--elbow-max", a.cfg.max_elbow_candidates,
                  "largest candidate k for the elbow sweep");
  cmd->add_option("--gender-clusters", a.cfg.gender_cluster_count,
                  "gender cluster count (1 disables the gender split)");
  cmd->add_flag("--literal-reward", a.cfg.literal_reward_rule,
                "reward when similarity is below the threshold");
  cmd->add_option("--restarts", a.cfg.kmeans.restarts, "K-Means restarts");
  cmd->add_option("--max-iter", a.cfg.kmeans.max_iter, "K-Means max iterations");
  cmd->add_option("--tol", a.cfg.kmeans.tol, "K-Means convergence tolerance");
}

vfa::RefineConfig resolve_refine_config(const RefineArgs& a) {
  vfa::RefineConfig cfg = a.cfg;
  cfg.gender_threshold = a.gender_abs >= 0.0
                             ? vfa::ThresholdRule::absolute(a.gender_abs)
                             : vfa::ThresholdRule::percentile(a.gender_percentile);
  cfg.identity_threshold =
      a.identity_abs >= 0.0
          ? vfa::ThresholdRule::absolute(a.identity_abs)
          : vfa::ThresholdRule::percentile(a.identity_percentile);
  if (a.clusters > 0) cfg.identity_cluster_count = a.clusters;
  if (a.elbow_target > 0) cfg.elbow_target = a.elbow_target;
  return cfg;
}

json refine_config_json(const vfa::RefineConfig& cfg) {
  auto rule = [](const vfa::ThresholdRule& r) {
    json j;
    j["kind"] = r.kind == vfa::ThresholdRule::Kind::Absolute ? "absolute"
                                                             : "percentile";
    j["value"] = r.value;
    return j;
  };
  json j;
  j["gender_threshold"] = rule(cfg.gender_threshold);
  j["identity_threshold"] = rule(cfg.identity_threshold);
  j["sim_threshold"] = cfg.sim_threshold;
  j["alpha"] = cfg.alpha;
  if (cfg.identity_cluster_count) {
    j["identity_cluster_count"] = *cfg.identity_cluster_count;
  }
  if (cfg.elbow_target) j["elbow_target"] = *cfg.elbow_target;
  j["max_elbow_candidates"] = cfg.max_elbow_candidates;
  j["gender_clusters"] = cfg.gender_cluster_count;
  j["literal_reward_rule"] = cfg.literal_reward_rule;
  return j;
}

void write_refine_reports(const fs::path& dir, const vfa::RefineOutcome& out) {
  vfa::write_audit_csv(dir / "audit.csv", out.audit);
  for (const auto& sim : out.similarities) {
    vfa::write_similarity_csv(
        dir / ("similarity_g" + std::to_string(sim.gender) + ".csv"), sim);
  }
  for (const auto& cset : out.gender.sets) {
    if (!cset.elbow) continue;
    const std::string name = "elbow_" + vfa::to_string(cset.modality) + "_g" +
                             std::to_string(cset.gender_cluster) + ".csv";
    vfa::write_elbow_csv(dir / name, *cset.elbow);
  }
}

void run_refine(const RefineArgs& a, const std::vector<std::string>& argv) {
  const vfa::RefineConfig cfg = resolve_refine_config(a);
  const auto embeddings = vfa::read_embeddings(a.embeddings);
  const auto pairs = vfa::read_pairs(a.pairs);
  const vfa::ScoreSet initial = vfa::read_scores(a.scores);
  const vfa::RefineOutcome out =
      vfa::refine_scores(pairs, initial, embeddings, cfg, a.seed);
  vfa::write_scores(a.out, out.refined);
  const fs::path dir =
      a.report_dir.empty() ? fs::path(a.out).parent_path() : fs::path(a.report_dir);
  if (!dir.empty()) fs::create_directories(dir);
  write_refine_reports(dir.empty() ? fs::path(".") : dir, out);
  write_manifest(a.out + ".manifest.json", "refine", argv, a.seed,
                 refine_config_json(cfg),
                 {{"embeddings", a.embeddings},
                  {"pairs", a.pairs},
                  {"scores", a.scores}},
                 {{"refined", a.out}});
}

struct EvalArgs {
  std::vector<std::string> scores;
  std::vector<std::string> pairs;
  std::vector<std::string> configs;
  std::string out;
  std::string roc;
};

void run_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
  if (a.scores.size() != a.pairs.size()) {
    throw vfa::DataError("--scores and --pairs counts differ");
  }
  if (!a.configs.empty() && a.configs.size() != a.scores.size()) {
    throw vfa::DataError("--config count must match --scores");
  }
  std::vector<vfa::ReportRow> rows;
  vfa::EvalResult last;
  for (size_t i = 0; i < a.scores.size(); ++i) {
    const vfa::ScoreSet scores = vfa::read_scores(a.scores[i]);
    const auto pairs = vfa::read_pairs(a.pairs[i]);
    last = vfa::eer(scores, pairs);
    const std::string name =
        a.configs.empty() ? "config" + std::to_string(i) : a.configs[i];
    rows.push_back({name, last.eer});
  }
  const vfa::Report report = vfa::make_report(rows);
  vfa::write_report_csv(a.out, report);
  if (!a.roc.empty()) {
    if (a.scores.size() != 1) {
      throw vfa::DataError("--roc needs exactly one score set");
    }
    vfa::write_roc_csv(a.roc, last);
  }
  for (const auto& row : report.rows) {
    std::cout << row.config << ": EER "
              << vfa::display_one_decimal(row.eer * 100.0) << "%\n";
  }
  std::cout << "overall: EER "
            << vfa::display_one_decimal(report.overall * 100.0) << "%\n";
  write_manifest(a.out + ".manifest.json", "eval", argv, 0, json::object(),
                 {{"scores", a.scores}, {"pairs", a.pairs}},
                 {{"report", a.out}});
}

struct PipelineArgs {
  std::string out_dir;
  uint64_t seed = 0;
  SynthArgs synth;
  TrainArgs train;
  RefineArgs refine;
};

void run_pipeline(PipelineArgs& a, const std::vector<std::string>& argv) {
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);

  // stage seeds derive from the single pipeline seed
  a.synth.cfg.seed = vfa::derive_seed(a.seed, "synth-stage");
  a.synth.out_dir = dir.string();
  run_synth(a.synth, argv);

  a.train.cfg.seed = vfa::derive_seed(a.seed, "train-stage");
  a.train.raw_path = (dir / "raw.tsv").string();
  a.train.voice_out = (dir / "voice.enc").string();
  a.train.face_out = (dir / "face.enc").string();
  a.train.loss_out = (dir / "train_loss.csv").string();
  a.train.cfg.embed_dim = a.synth.cfg.dim_embed;
  run_train(a.train, argv);

  EmbedArgs embed{a.train.raw_path, a.train.voice_out, a.train.face_out,
                  (dir / "encoded.tsv").string()};
  run_embed(embed, argv);

  ScoreArgs score{embed.out, (dir / "pairs.csv").string(),
                  (dir / "scores.csv").string()};
  run_score(score, argv);

  a.refine.seed = vfa::derive_seed(a.seed, "refine-stage");
  a.refine.embeddings = embed.out;
  a.refine.pairs = score.pairs;
  a.refine.scores = score.out;
  a.refine.out = (dir / "refined.csv").string();
  a.refine.report_dir = dir.string();
  run_refine(a.refine, argv);

  EvalArgs eval;
  eval.scores = {score.out, a.refine.out};
  eval.pairs = {score.pairs, score.pairs};
  eval.configs = {"initial", "refined"};
  eval.out = (dir / "report.csv").string();
  run_eval(eval, argv);

  json config;
  config["synth"] = synth_config_json(a.synth.cfg);
  config["train"] = train_config_json(a.train.cfg);
  config["refine"] = refine_config_json(resolve_refine_config(a.refine));
  write_manifest(dir / "pipeline.manifest.json", "pipeline", argv, a.seed,
                 config, json::object(), {{"report", "report.csv"}});
}

int run_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw vfa::DataError("cannot open manifest: " + manifest_path);
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw vfa::DataError("bad manifest: " + std::string(e.what()));
  }
  if (!m.contains("argv") || !m["argv"].is_array()) {
    throw vfa::DataError("manifest has no argv to replay");
  }
  std::vector<std::string> args;
  for (const auto& v : m["argv"]) args.push_back(v.get<std::string>());
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"voice-face association pipeline"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs,
                 "worker bound for parallel stages (output is deterministic "
                 "regardless)");

  SynthArgs synth_args;
  add_synth_options(app.add_subcommand("synth", "generate a benchmark"),
                    synth_args);

  TrainArgs train_args;
  add_train_options(app.add_subcommand("train", "train SCC encoders"),
                    train_args);

  EmbedArgs embed_args;
  CLI::App* embed = app.add_subcommand("embed", "apply trained encoders");
  embed->add_option("--raw", embed_args.raw_path, "raw feature file")
      ->required();
  embed->add_option("--voice-encoder", embed_args.voice_enc, "voice encoder")
      ->required();
  embed->add_option("--face-encoder", embed_args.face_enc, "face encoder")
      ->required();
  embed->add_option("--out", embed_args.out, "embedding output")->required();

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "compute initial pair scores");
  score->add_option("--embeddings", score_args.embeddings, "embedding file")
      ->required();
  score->add_option("--pairs", score_args.pairs, "pair manifest")->required();
  score->add_option("--out", score_args.out, "score CSV output")->required();

  RefineArgs refine_args;
  CLI::App* refine =
      app.add_subcommand("refine", "chaining-cluster score refinement");
  refine->add_option("--embeddings", refine_args.embeddings, "embedding file")
      ->required();
  refine->add_option("--pairs", refine_args.pairs, "pair manifest")->required();
  refine->add_option("--scores", refine_args.scores, "initial score CSV")
      ->required();
  refine->add_option("--out", refine_args.out, "refined score CSV")->required();
  refine->add_option("--report-dir", refine_args.report_dir,
                     "directory for audit/elbow/similarity CSVs");
  refine->add_option("--seed", refine_args.seed, "master seed");
  add_refine_options(refine, refine_args);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "FAR/FRR/EER report");
  eval->add_option("--scores", eval_args.scores, "score CSV (repeatable)")
      ->required();
  eval->add_option("--pairs", eval_args.pairs,
                   "labeled pair manifest (repeatable)")
      ->required();
  eval->add_option("--config", eval_args.configs, "row name per score set");
  eval->add_option("--out", eval_args.out, "report CSV output")->required();
  eval->add_option("--roc", eval_args.roc, "ROC points CSV output");

  PipelineArgs pipe_args;
  CLI::App* pipe = app.add_subcommand("pipeline", "run every stage");
  pipe->add_option("--out", pipe_args.out_dir, "output directory")->required();
  pipe->add_option("--seed", pipe_args.seed, "master seed");
  pipe->add_option("--identities", pipe_args.synth.cfg.identities,
                   "identity count");
  pipe->add_option("--samples", pipe_args.synth.cfg.samples_per_identity,
                   "samples per identity per modality");
  pipe->add_option("--languages", pipe_args.synth.cfg.languages,
                   "language count");
  pipe->add_option("--noise-sigma", pipe_args.synth.cfg.noise_sigma,
                   "sample noise");
  pipe->add_option("--outlier-rate", pipe_args.synth.cfg.outlier_rate,
                   "outlier fraction");
  pipe->add_option("--outlier-kind", pipe_args.synth.outlier_kind,
                   "outlier kind");
  pipe->add_option("--epochs", pipe_args.train.cfg.epochs, "training epochs");
  pipe->add_option("--tau", pipe_args.train.cfg.tau, "softmax temperature");
  pipe->add_option("--learning-rate", pipe_args.train.cfg.learning_rate,
                   "GD step size");
  add_refine_options(pipe, pipe_args.refine);

  std::string manifest_path;
  CLI::App* replay = app.add_subcommand("replay", "re-run a stored manifest");
  replay->add_option("manifest", manifest_path, "manifest JSON")->required();

  // CLI11 parses argv-style reversed vectors; hand it strings directly
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand("synth")) {
    run_synth(synth_args, args);
  } else if (app.got_subcommand("train")) {
    run_train(train_args, args);
  } else if (app.got_subcommand("embed")) {
    run_embed(embed_args, args);
  } else if (app.got_subcommand("score")) {
    run_score(score_args, args);
  } else if (app.got_subcommand("refine")) {
    run_refine(refine_args, args);
  } else if (app.got_subcommand("eval")) {
    run_eval(eval_args, args);
  } else if (app.got_subcommand("pipeline")) {
    run_pipeline(pipe_args, args);
  } else if (app.got_subcommand("replay")) {
    return run_replay(manifest_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const vfa::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const vfa::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
