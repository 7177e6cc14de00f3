#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "cli.hpp"
#include "noiselab/corpus.hpp"
#include "noiselab/evaluation.hpp"

using namespace noiselab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "noiselab");
  std::ostringstream out, err;
  Result r;
  r.status = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Fresh scratch directory holding a small toy corpus.
class Workspace {
 public:
  explicit Workspace(const std::string& name) : dir_(fs::temp_directory_path() / name) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const Result r = run({"toy-corpus", "-o", path("toy"), "--train-tokens", "1500",
                          "--dev-tokens", "250", "--test-tokens", "250", "--seed", "8"});
    REQUIRE(r.status == 0);
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }

 private:
  fs::path dir_;
};

std::vector<std::string> tiny_run_settings(const Workspace& ws) {
  return {"--set", "train_path=" + ws.path("toy/train.conll"),
          "--set", "dev_path=" + ws.path("toy/dev.conll"),
          "--set", "test_path=" + ws.path("toy/test.conll"),
          "--set", "embedding_dim=6", "--set", "state_size=4", "--set", "dense_size=4",
          "--set", "epochs=2", "--set", "n_seeds=2", "--set", "clean_budget=150",
          "--set", "learning_rate=0.01"};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("toy corpus files") {
  Workspace ws("noiselab_cli_toy");
  for (const char* f : {"train.conll", "dev.conll", "test.conll", "gazetteer.tsv", "blocklist.txt"}) {
    CHECK(fs::exists(ws.path(std::string("toy/") + f)));
  }
  const Corpus train = parse_conll(read_file(ws.path("toy/train.conll")), LabelSet::conll());
  CHECK(train.token_count() >= 1500);
}

TEST_CASE("annotate, simulate-noise and init-theta") {
  Workspace ws("noiselab_cli_noise");
  const Result ann = run({"annotate", "-i", ws.path("toy/train.conll"), "-g",
                          ws.path("toy/gazetteer.tsv"), "-o", ws.path("auto.conll"),
                          "--report", ws.path("quality.csv")});
  REQUIRE(ann.status == 0);
  CHECK(read_file(ws.path("quality.csv")).find("overall,") != std::string::npos);

  const Result sim = run({"simulate-noise", "-i", ws.path("toy/train.conll"), "-o",
                          ws.path("noisy.conll"), "--channel", "uniform", "--rate", "0.3",
                          "--seed", "4"});
  REQUIRE(sim.status == 0);
  const LabelSet labels = LabelSet::conll();
  const Corpus gold = parse_conll(read_file(ws.path("toy/train.conll")), labels);
  const Corpus noisy = parse_conll(read_file(ws.path("noisy.conll")), labels);
  REQUIRE(noisy.sentences.size() == gold.sentences.size());
  std::size_t flipped = 0;
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    CHECK(noisy.sentences[s].tokens == gold.sentences[s].tokens);
    for (std::size_t t = 0; t < gold.sentences[s].labels.size(); ++t) {
      flipped += gold.sentences[s].labels[t] != noisy.sentences[s].labels[t];
    }
  }
  const double rate = double(flipped) / double(gold.token_count());
  CHECK(rate > 0.25);
  CHECK(rate < 0.35);

  const Result init = run({"init-theta", "--clean", ws.path("toy/train.conll"), "--noisy",
                           ws.path("noisy.conll"), "-o", ws.path("b.csv"), "--theta-output",
                           ws.path("theta.csv")});
  REQUIRE(init.status == 0);
  const auto theta = matrix_from_csv(read_file(ws.path("theta.csv")), labels);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(theta[i * 5 + i] > 0.6);
    CHECK(theta[i * 5 + i] < 0.8);
  }
}

TEST_CASE("train, evaluate and report") {
  Workspace ws("noiselab_cli_train");
  auto args = std::vector<std::string>{"train", "-o", ws.path("run")};
  const auto settings = tiny_run_settings(ws);
  args.insert(args.end(), settings.begin(), settings.end());
  const Result train = run(args);
  REQUIRE_MESSAGE(train.status == 0, train.err);
  for (const char* f : {"config.txt", "metrics.jsonl", "trials.jsonl", "summary.json",
                        "checkpoint.json", "theta.csv", "noise_weights.csv"}) {
    CHECK(fs::exists(ws.path(std::string("run/") + f)));
  }
  const auto summary = nlohmann::json::parse(read_file(ws.path("run/summary.json")));
  CHECK(summary["variant"] == "noise-model");

  // A second run from the saved config reproduces every file.
  const Result again =
      run({"train", "-c", ws.path("run/config.txt"), "-o", ws.path("run2")});
  REQUIRE(again.status == 0);
  for (const char* f : {"metrics.jsonl", "trials.jsonl", "summary.json", "checkpoint.json",
                        "theta.csv"}) {
    CHECK(read_file(ws.path(std::string("run/") + f)) ==
          read_file(ws.path(std::string("run2/") + f)));
  }

  const Result eval = run({"evaluate", "--checkpoint", ws.path("run/checkpoint.json"), "-t",
                           ws.path("toy/test.conll"), "-o", ws.path("eval.csv"), "--json",
                           ws.path("eval.json")});
  REQUIRE(eval.status == 0);
  const auto report = nlohmann::json::parse(read_file(ws.path("eval.json")));
  CHECK(report["overall"]["f1"].get<double>() >= 0.0);

  const Result rep = run({"report", "--checkpoint", ws.path("run/checkpoint.json"), "-o",
                          ws.path("theta_report.csv")});
  REQUIRE(rep.status == 0);
  CHECK(read_file(ws.path("theta_report.csv")) == read_file(ws.path("run/theta.csv")));
}

TEST_CASE("scoring the gold file against itself gives F1 of one") {
  Workspace ws("noiselab_cli_eval");
  const Result r = run({"evaluate", "--predicted", ws.path("toy/test.conll"), "-t",
                        ws.path("toy/test.conll"), "--json", ws.path("self.json")});
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(read_file(ws.path("self.json")));
  CHECK(report["overall"]["f1"].get<double>() == 1.0);
}

TEST_CASE("sweep table") {
  Workspace ws("noiselab_cli_sweep");
  auto args = std::vector<std::string>{"sweep", "--axis", "noisy-factor", "--values", "0.5,1",
                                       "--variants", "base-model-with-noise", "-o",
                                       ws.path("sweep.csv")};
  const auto settings = tiny_run_settings(ws);
  args.insert(args.end(), settings.begin(), settings.end());
  const Result r = run(args);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const std::string csv = read_file(ws.path("sweep.csv"));
  CHECK(csv.rfind("axis_value,variant,mean_f1,se,n_seeds\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(fs::exists(ws.path("sweep.csv.config.txt")));
}

TEST_CASE("bad input fails without writing outputs") {
  Workspace ws("noiselab_cli_errors");
  CHECK(run({}).status != 0);
  CHECK(run({"frobnicate"}).status != 0);
  CHECK(run({"annotate", "-i", ws.path("missing.conll"), "-g", ws.path("toy/gazetteer.tsv"),
             "-o", ws.path("x.conll")})
            .status != 0);

  const Result bad_key = run({"train", "-o", ws.path("bad"), "--set", "epochz=3"});
  CHECK(bad_key.status != 0);
  CHECK(bad_key.err.find("epochz") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.path("bad")));

  const Result bad_rate = run({"simulate-noise", "-i", ws.path("toy/train.conll"), "-o",
                               ws.path("n.conll"), "--channel", "uniform", "--rate", "2"});
  CHECK(bad_rate.status != 0);
  CHECK_FALSE(fs::exists(ws.path("n.conll")));

  const Result bad_variant = run({"train", "-o", ws.path("bad2"), "--set", "variant=best"});
  CHECK(bad_variant.status != 0);
  CHECK(bad_variant.err.rfind("error: ", 0) == 0);
}

TEST_SUITE_END();
