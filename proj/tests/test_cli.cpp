#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vfa/vectorstore.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("VFA_BIN");
  REQUIRE_MESSAGE(p != nullptr, "VFA_BIN must point at the CLI binary");
  return p;
}

/// Run the CLI with the given arguments; returns the exit code.
int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("cli usage errors exit with code 1") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("synth") == 1);            // missing required --out
  CHECK(run_cli("synth --bogus-flag x") == 1);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli data errors exit with code 2") {
  testutil::TempDir dir("cli2");
  CHECK(run_cli("score --embeddings " + (dir.path() / "none.tsv").string() +
                " --pairs " + (dir.path() / "none.csv").string() + " --out " +
                (dir.path() / "s.csv").string()) == 2);

  vfa::write_file_atomic(dir.path() / "bad.tsv",
                         "#dim 2\ns1\tvoice\t-\tnot a number\n");
  vfa::write_file_atomic(dir.path() / "p.csv", "voice_id,face_id,label\n");
  CHECK(run_cli("score --embeddings " + (dir.path() / "bad.tsv").string() +
                " --pairs " + (dir.path() / "p.csv").string() + " --out " +
                (dir.path() / "s.csv").string()) == 2);
}

TEST_CASE("cli numeric errors exit with code 3") {
  testutil::TempDir dir("cli3");
  // zero vector: cosine similarity is degenerate
  vfa::write_file_atomic(dir.path() / "e.tsv",
                         "#dim 2\nv1\tvoice\t-\t0 0\nf1\tface\t-\t1 0\n");
  vfa::write_file_atomic(dir.path() / "p.csv",
                         "voice_id,face_id,label\nv1,f1,1\n");
  CHECK(run_cli("score --embeddings " + (dir.path() / "e.tsv").string() +
                " --pairs " + (dir.path() / "p.csv").string() + " --out " +
                (dir.path() / "s.csv").string()) == 3);
  CHECK(!fs::exists(dir.path() / "s.csv"));  // no partial output
}

TEST_CASE("cli synth / score / refine / eval flow") {
  testutil::TempDir dir("cliflow");
  const std::string d = dir.path().string();

  REQUIRE(run_cli("synth --out " + d + " --seed 5 --identities 8 --samples 3 "
                  "--outlier-rate 0.1") == 0);
  CHECK(fs::exists(dir.path() / "raw.tsv"));
  CHECK(fs::exists(dir.path() / "embeddings.tsv"));
  CHECK(fs::exists(dir.path() / "pairs.csv"));
  CHECK(fs::exists(dir.path() / "truth.csv"));
  CHECK(fs::exists(dir.path() / "synth.manifest.json"));

  REQUIRE(run_cli("score --embeddings " + d + "/embeddings.tsv --pairs " + d +
                  "/pairs.csv --out " + d + "/scores.csv") == 0);
  const auto scores = vfa::read_scores(dir.path() / "scores.csv");
  const auto pairs = vfa::read_pairs(dir.path() / "pairs.csv");
  CHECK(scores.entries.size() == pairs.size());

  REQUIRE(run_cli("refine --embeddings " + d + "/embeddings.tsv --pairs " + d +
                  "/pairs.csv --scores " + d + "/scores.csv --out " + d +
                  "/refined.csv --seed 5") == 0);
  CHECK(fs::exists(dir.path() / "refined.csv"));
  CHECK(fs::exists(dir.path() / "audit.csv"));

  REQUIRE(run_cli("eval --scores " + d + "/scores.csv --pairs " + d +
                  "/pairs.csv --config initial --out " + d +
                  "/report.csv --roc " + d + "/roc.csv") == 0);
  const std::string report = slurp(dir.path() / "report.csv");
  CHECK(report.rfind("config,eer\n", 0) == 0);
  CHECK(report.find("initial,") != std::string::npos);
  CHECK(report.find("overall,") != std::string::npos);
  CHECK(slurp(dir.path() / "roc.csv").rfind("threshold,far,frr\n", 0) == 0);
}

TEST_CASE("cli train and embed round-trip") {
  testutil::TempDir dir("clitrain");
  const std::string d = dir.path().string();

  REQUIRE(run_cli("synth --out " + d + " --seed 9 --identities 6 --samples 3 "
                  "--dim-latent 4 --dim-raw 10 --dim-embed 6") == 0);
  REQUIRE(run_cli("train --raw " + d + "/raw.tsv --voice-encoder " + d +
                  "/voice.enc --face-encoder " + d +
                  "/face.enc --loss-curve " + d +
                  "/loss.csv --seed 1 --epochs 10 --embed-dim 6") == 0);
  CHECK(fs::exists(dir.path() / "voice.enc"));
  CHECK(fs::exists(dir.path() / "face.enc"));
  CHECK(slurp(dir.path() / "loss.csv").rfind("epoch,loss\n", 0) == 0);

  REQUIRE(run_cli("embed --raw " + d + "/raw.tsv --voice-encoder " + d +
                  "/voice.enc --face-encoder " + d + "/face.enc --out " + d +
                  "/encoded.tsv") == 0);
  const auto encoded = vfa::read_embeddings(dir.path() / "encoded.tsv");
  const auto raw = vfa::read_embeddings(dir.path() / "raw.tsv");
  REQUIRE(encoded.size() == raw.size());
  CHECK(encoded[0].vector.size() == 6);
}

TEST_CASE("cli replay reproduces outputs bitwise") {
  testutil::TempDir dir("clireplay");
  const std::string a = (dir.path() / "a").string();
  REQUIRE(run_cli("synth --out " + a + " --seed 3 --identities 5 --samples 2")
          == 0);
  const std::string first = slurp(fs::path(a) / "embeddings.tsv");

  // replaying the stored manifest after deleting the outputs restores them
  fs::remove(fs::path(a) / "embeddings.tsv");
  REQUIRE(run_cli("replay " + a + "/synth.manifest.json") == 0);
  CHECK(slurp(fs::path(a) / "embeddings.tsv") == first);

  CHECK(run_cli("replay " + a + "/missing.json") == 2);
}
