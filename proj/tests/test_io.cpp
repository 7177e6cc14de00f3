#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "noiselab/config.hpp"
#include "noiselab/corpus.hpp"
#include "noiselab/pipeline.hpp"
#include "noiselab/toy_corpus.hpp"
#include "noiselab/vocabulary.hpp"
#include "test_util.hpp"

using namespace noiselab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c = ExperimentConfig::desk_scale();
  c.toy_train_tokens = 2000;
  c.toy_dev_tokens = 300;
  c.toy_test_tokens = 300;
  c.clean_budget = 200;
  c.epochs = 2;
  c.n_seeds = 1;
  c.embedding_dim = 6;
  c.state_size = 4;
  c.dense_size = 4;
  return c;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("conll parsing") {
  const LabelSet labels = LabelSet::conll();
  const std::string text =
      "-DOCSTART- -X- -X- O\n"
      "\n"
      "EU NNP B-NP B-ORG\n"
      "rejects VBZ B-VP O\n"
      "German JJ B-NP B-MISC\n"
      "\n"
      "Peter NNP B-NP B-PER\r\n"
      "Blackburn NNP B-NP I-PER\r\n"
      "\n"
      "-DOCSTART- -X- -X- O\n"
      "\n"
      "Paris LOC\n";
  const Corpus c = parse_conll(text, labels);
  REQUIRE(c.sentences.size() == 3);
  CHECK(c.document_starts == std::vector<std::size_t>{0, 2});
  CHECK(c.sentences[0].tokens == std::vector<std::string>{"EU", "rejects", "German"});
  CHECK(c.sentences[0].labels == std::vector<Label>{2, 0, 4});
  CHECK(c.sentences[1].labels == std::vector<Label>{1, 1});
  CHECK(c.token_count() == 6);
  CHECK(c.labeled());

  const Corpus again = parse_conll(write_conll(c, labels), labels);
  CHECK(again.sentences == c.sentences);

  const Corpus bare = parse_conll("just\nwords\n\nhere\n", labels);
  CHECK_FALSE(bare.labeled());
  CHECK(bare.sentences.size() == 2);

  try {
    parse_conll("EU ORG\nx B-DATE\n", labels);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS(parse_conll("EU ORG\nrejects\n", labels));
}

TEST_CASE("relabel keeps tokens and boundaries") {
  const LabelSet labels = LabelSet::conll();
  const Corpus c = parse_conll("a O\nb PER\n\nc LOC\n", labels);
  const Corpus r = relabel(c, {{1, 1}, {0}});
  CHECK(r.sentences[0].tokens == c.sentences[0].tokens);
  CHECK(r.label_sequences() == LabelSequences{{1, 1}, {0}});
  CHECK_THROWS(relabel(c, {{1, 1}}));
  CHECK_THROWS(relabel(c, {{1}, {0}}));
}

TEST_CASE("vocabulary") {
  const Vocabulary v({"Paris", "the"});
  CHECK(v.size() == 4);
  CHECK(v.lookup("Paris") == 0);
  CHECK(v.lookup("The") == 1);
  CHECK(v.lookup("paris") == v.unk());
  CHECK(v.pad() == 2);
  CHECK(v.word(v.pad()) == Vocabulary::kPad);
}

TEST_CASE("embedding files") {
  const Embeddings e = parse_embeddings("the 0.5 1\nParis -1 2.5\n");
  CHECK(e.dim() == 2);
  CHECK(e.vocabulary.word_count() == 2);
  CHECK(e.table.rows() == 4);
  CHECK(e.table.at(1, 1) == 2.5);
  CHECK(e.table.at(e.vocabulary.unk(), 0) == 0.0);
  const Embeddings back = parse_embeddings(write_embeddings(e));
  CHECK(testing::values_of(back.table) == testing::values_of(e.table));
  CHECK_THROWS(parse_embeddings("the 0.5 1\nParis -1\n"));
  CHECK_THROWS(parse_embeddings("the 0.5 x\n"));
  CHECK_THROWS(parse_embeddings("the 0.5 1\n", 3));
  CHECK_THROWS(parse_embeddings(""));

  const Embeddings r1 = random_embeddings({"a", "b"}, 3, 4);
  const Embeddings r2 = random_embeddings({"a", "b"}, 3, 4);
  CHECK(testing::values_of(r1.table) == testing::values_of(r2.table));
  CHECK(r1.table.at(r1.vocabulary.pad(), 2) == 0.0);
}

TEST_CASE("clean subset sampling") {
  const ToyCorpus toy = generate_toy_corpus({2000, 200, 200, 3});
  const CleanSplit split = sample_clean_subset(toy.train, 400, 9);
  CHECK(split.clean.token_count() >= 400);
  CHECK(split.clean.token_count() + split.remainder.token_count() ==
        toy.train.token_count());
  CHECK(sample_clean_subset(toy.train, 400, 9).clean == split.clean);
  CHECK_THROWS(sample_clean_subset(toy.train, 0, 9));
}

TEST_CASE("atomic file writes") {
  const fs::path dir = fs::temp_directory_path() / "noiselab_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path file = dir / "out.txt";
  write_file_atomic(file, "first");
  write_file_atomic(file, "second");
  CHECK(read_file(file) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS(read_file(dir / "missing.txt"));
  fs::remove_all(dir);
}

TEST_CASE("toy corpus") {
  const LabelSet labels = LabelSet::conll();
  const ToyCorpusConfig cfg{3000, 500, 400, 11};
  const ToyCorpus a = generate_toy_corpus(cfg);
  const ToyCorpus b = generate_toy_corpus(cfg);
  CHECK(a.train == b.train);
  CHECK(a.gazetteer == b.gazetteer);
  CHECK(a.train.token_count() >= 3000);
  CHECK(a.dev.token_count() >= 500);
  CHECK(a.test.token_count() >= 400);
  CHECK_FALSE(a.train.document_starts.empty());
  CHECK_FALSE(generate_toy_corpus({3000, 500, 400, 12}).train == a.train);

  std::set<Label> seen;
  std::set<std::string> words(a.vocabulary.begin(), a.vocabulary.end());
  for (const auto* corpus : {&a.train, &a.dev, &a.test}) {
    for (const auto& s : corpus->sentences) {
      seen.insert(s.labels.begin(), s.labels.end());
      for (const auto& t : s.tokens) CHECK(words.count(t) == 1);
    }
  }
  CHECK(seen.size() == labels.size());
  CHECK_NOTHROW(Gazetteer::parse(a.gazetteer, labels));
  CHECK_THROWS(generate_toy_corpus(cfg, LabelSet({"O", "PER"})));
}

TEST_CASE("config text round trip") {
  ExperimentConfig c = ExperimentConfig::desk_scale();
  c.variant = "noise-adaptation-model";
  c.learning_rate = 0.1 + 0.2;
  c.labels = {"O", "PER", "LOC"};
  c.channel = "uniform";
  c.train_path = "/data/train.conll";
  const ExperimentConfig back = ExperimentConfig::from_text(c.to_text());
  CHECK(back == c);
  CHECK(back.learning_rate == c.learning_rate);

  const auto parsed = ExperimentConfig::from_text("# comment\n\nseed = 9\nvariant = base-model\n");
  CHECK(parsed.seed == 9);
  CHECK(parsed.variant == "base-model");
  CHECK(parsed.epochs == ExperimentConfig{}.epochs);

  CHECK_THROWS(ExperimentConfig::from_text("sead = 9\n"));
  CHECK_THROWS(ExperimentConfig::from_text("seed = 9\nseed = 10\n"));
  CHECK_THROWS(ExperimentConfig::from_text("seed = nine\n"));
  CHECK_THROWS(ExperimentConfig::from_text("variant = best-model\n"));
  CHECK_THROWS(ExperimentConfig::from_text("labels = PER,LOC\n"));
  CHECK_THROWS(ExperimentConfig::from_text("noise_source = oracle\n"));
  CHECK_THROWS(ExperimentConfig::from_text("trainable_embeddings = maybe\n"));
  ExperimentConfig bad;
  bad.pooling = "mean";
  CHECK_THROWS(bad.training());
  bad = ExperimentConfig{};
  bad.epochs = 0;
  CHECK_THROWS(bad.training());
}

TEST_CASE("bundled configs parse") {
  const fs::path root = NOISELAB_SOURCE_DIR;
  CHECK(ExperimentConfig::from_text(read_file(root / "configs/desk_scale.conf")) ==
        ExperimentConfig::desk_scale());
  const auto gaz = ExperimentConfig::from_text(read_file(root / "configs/gazetteer.conf"));
  CHECK(gaz.noise_source_kind() == NoiseSource::gazetteer);
  CHECK(fs::exists(root / gaz.train_path));
  CHECK(fs::exists(root / gaz.gazetteer_path));
}

TEST_CASE("config maps onto training settings") {
  const ExperimentConfig c = ExperimentConfig::desk_scale();
  const TrainingConfig t = c.training();
  CHECK(t.dims.state_size == 16);
  CHECK(t.dims.dense_size == 16);
  CHECK(t.adam.learning_rate == doctest::Approx(0.005));
  CHECK(t.epochs == 40);
  CHECK(t.dims.pooling == Pooling::final_states);
  CHECK(c.label_set() == LabelSet::conll());
}

TEST_CASE("channel specs") {
  const LabelSet labels = LabelSet::conll();
  const auto preset = parse_channel_spec("channel = gazetteer-like\nchannel_seed = 3\n", labels);
  CHECK(preset.kind == ChannelKind::empirical);
  CHECK(preset.matrix == gazetteer_like_channel(labels));
  CHECK(preset.seed == 3);

  const auto uniform = parse_channel_spec("channel = uniform\nchannel_rate = 0.25\n", labels);
  CHECK(uniform.kind == ChannelKind::uniform);
  CHECK(uniform.flip_rate == 0.25);

  const auto by_name = make_channel_spec("permutation", 0, "O,ORG,PER,LOC,MISC", "", 1, labels);
  const auto by_index = make_channel_spec("permutation", 0, "0,2,1,3,4", "", 1, labels);
  CHECK(by_name.permutation == by_index.permutation);
  CHECK(by_name.permutation == std::vector<Label>{0, 2, 1, 3, 4});

  const auto m = make_channel_spec("empirical", 0, "", "1,0;0.25,0.75", 1, LabelSet({"O", "PER"}));
  CHECK(m.matrix == std::vector<double>{1, 0, 0.25, 0.75});

  CHECK_THROWS(make_channel_spec("gaussian", 0, "", "", 1, labels));
  CHECK_THROWS(make_channel_spec("uniform", 1.5, "", "", 1, labels));
  CHECK_THROWS(make_channel_spec("permutation", 0, "O,PER", "", 1, labels));
  CHECK_THROWS(make_channel_spec("empirical", 0, "", "1,0;0.5,0.4", 1, LabelSet({"O", "PER"})));
  CHECK_THROWS(parse_channel_spec("seed = 3\n", labels));
}

TEST_CASE("experiment pipeline on the toy corpus") {
  const ExperimentConfig config = tiny_config();
  const ExperimentCorpora corpora = load_corpora(config);
  REQUIRE(corpora.train_noisy.size() == corpora.train.sentences.size());
  for (std::size_t s = 0; s < corpora.train.sentences.size(); ++s) {
    CHECK(corpora.train_noisy[s].size() == corpora.train.sentences[s].tokens.size());
  }
  const auto gold = corpora.train.label_sequences();
  CHECK(gold != corpora.train_noisy);

  const PreparedExperiment prepared = prepare_experiment(config, corpora);
  CHECK(prepared.pool.embeddings.cols() == 6);
  CHECK(prepared.pool.embeddings.rows() == prepared.vocabulary.size());
  CHECK(prepared.pool.train.size() == corpora.train.sentences.size());
  for (const auto& s : prepared.pool.test) {
    for (TokenId id : s.tokens) CHECK(id != prepared.vocabulary.unk());
  }
  const SplitDataset split = split_experiment(prepared, config);
  CHECK(split.clean_size() >= config.clean_budget);

  ExperimentConfig gaz = config;
  gaz.noise_source = "gazetteer";
  const ExperimentCorpora annotated = load_corpora(gaz);
  const ToyCorpus toy = generate_toy_corpus(
      {config.toy_train_tokens, config.toy_dev_tokens, config.toy_test_tokens, config.toy_seed});
  Gazetteer g = Gazetteer::parse(toy.gazetteer, LabelSet::conll());
  for (const auto& w : Gazetteer::default_blocklist()) g.block(w);
  CHECK(annotated.train_noisy == annotate(toy.train.token_lists(), g));

  ExperimentConfig missing = config;
  missing.train_path = "train.conll";
  CHECK_THROWS(load_corpora(missing));
  ExperimentConfig file_source = config;
  file_source.noise_source = "file";
  CHECK_THROWS(load_corpora(file_source));
}

TEST_CASE("experiment files on disk") {
  const fs::path dir = fs::temp_directory_path() / "noiselab_io_files";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const LabelSet labels = LabelSet::conll();
  const ToyCorpus toy = generate_toy_corpus({1500, 200, 200, 5});
  write_file_atomic(dir / "train.conll", write_conll(toy.train, labels));
  write_file_atomic(dir / "dev.conll", write_conll(toy.dev, labels));
  write_file_atomic(dir / "test.conll", write_conll(toy.test, labels));
  write_file_atomic(dir / "gaz.tsv", toy.gazetteer);

  ExperimentConfig config = tiny_config();
  config.train_path = (dir / "train.conll").string();
  config.dev_path = (dir / "dev.conll").string();
  config.test_path = (dir / "test.conll").string();
  const ExperimentCorpora from_files = load_corpora(config);
  CHECK(from_files.train.sentences == toy.train.sentences);

  config.noise_source = "gazetteer";
  config.gazetteer_path = (dir / "gaz.tsv").string();
  const auto annotated = load_corpora(config).train_noisy;
  write_file_atomic(dir / "noisy.conll",
                    write_conll(relabel(toy.train, annotated), labels));
  config.noise_source = "file";
  config.noisy_path = (dir / "noisy.conll").string();
  CHECK(load_corpora(config).train_noisy == annotated);

  write_file_atomic(dir / "short.conll", write_conll(toy.dev, labels));
  config.noisy_path = (dir / "short.conll").string();
  CHECK_THROWS(load_corpora(config));
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip predicts identically") {
  ExperimentConfig config = tiny_config();
  const PreparedExperiment prepared = prepare_experiment(config);
  const SplitDataset split = split_experiment(prepared, config);
  for (const char* name : {"base-model", "noise-model", "noise-cleaning-model"}) {
    CAPTURE(name);
    config.variant = name;
    const auto outcome =
        train_variant(VariantSpec::from_name(name), split, config.training(), 3);
    const Checkpoint saved{config, prepared.vocabulary, prepared.pool.embeddings,
                           outcome.model};
    const Checkpoint loaded = checkpoint_from_json(checkpoint_to_json(saved));
    CHECK(loaded.config == config);
    CHECK(loaded.vocabulary.words() == prepared.vocabulary.words());
    const auto a = loaded.model.params.trainable();
    const auto b = outcome.model.params.trainable();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(testing::values_of(a[i]) == testing::values_of(b[i]));
    CHECK(loaded.model.noise.has_value() == outcome.model.noise.has_value());
    if (outcome.model.noise) {
      CHECK(loaded.model.noise->theta_values() == outcome.model.noise->theta_values());
    }
    CHECK(loaded.model.cleaner.has_value() == outcome.model.cleaner.has_value());
    CHECK(evaluate(loaded.model.params, split.test(), split.labels()).overall.f1 ==
          outcome.result.test_f1);
  }
  CHECK_THROWS(checkpoint_from_json("{}"));
  CHECK_THROWS(checkpoint_from_json("not json"));
}

TEST_CASE("metric records are valid json lines") {
  TrialResult t;
  t.variant = "base-model";
  t.seed = 3;
  EpochRecord e;
  e.epoch = 1;
  e.dev_f1 = 0.5;
  t.epochs.push_back(e);
  const std::string line = epoch_record_json(t, e);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find("\"dev_f1\"") != std::string::npos);
  const std::string trial = trial_result_json(t, LabelSet::conll());
  CHECK(trial.find('\n') == std::string::npos);
  CHECK(trial.find("\"base-model\"") != std::string::npos);
}

TEST_SUITE_END();
