#include "noiselab/pipeline.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

#include "noiselab/toy_corpus.hpp"

namespace noiselab {
namespace {

using nlohmann::json;

json tensor_json(const Tensor& t) {
  return {{"rows", t.rows()},
          {"cols", t.cols()},
          {"values", std::vector<Scalar>(t.values().begin(), t.values().end())}};
}

Tensor tensor_from_json(const json& j, bool requires_grad) {
  return Tensor::from({j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>()},
                      j.at("values").get<std::vector<Scalar>>(), requires_grad);
}

json tensors_json(const std::vector<Tensor>& tensors) {
  json out = json::array();
  for (const auto& t : tensors) out.push_back(tensor_json(t));
  return out;
}

void load_tensors(const json& j, std::vector<Tensor> into) {
  if (j.size() != into.size()) {
    throw std::invalid_argument("checkpoint: expected " + std::to_string(into.size()) +
                                " tensors, got " + std::to_string(j.size()));
  }
  for (std::size_t i = 0; i < into.size(); ++i) {
    assign_values(into[i], tensor_from_json(j[i], false));
  }
}

json prf_object(const PrfReport& report) { return json::parse(prf_to_json(report)); }

}  // namespace

LabelSequences simulate_noise(const Corpus& corpus, const NoiseChannelSpec& spec,
                              std::size_t k) {
  std::vector<Label> flat;
  for (const auto& s : corpus.sentences) {
    if (s.labels.size() != s.tokens.size()) {
      throw std::invalid_argument("simulate_noise: corpus is not fully labelled");
    }
    flat.insert(flat.end(), s.labels.begin(), s.labels.end());
  }
  const auto noisy = apply_channel(flat, spec, k);
  LabelSequences out;
  std::size_t pos = 0;
  for (const auto& s : corpus.sentences) {
    out.emplace_back(noisy.begin() + static_cast<std::ptrdiff_t>(pos),
                     noisy.begin() + static_cast<std::ptrdiff_t>(pos + s.labels.size()));
    pos += s.labels.size();
  }
  return out;
}

Gazetteer load_gazetteer(const ExperimentConfig& config, const LabelSet& labels) {
  std::string text;
  if (!config.gazetteer_path.empty()) {
    text = read_file(config.gazetteer_path);
  } else if (config.train_path.empty()) {
    ToyCorpusConfig toy{0, 0, 0, config.toy_seed};
    text = generate_toy_corpus(toy, labels).gazetteer;
  } else {
    throw std::invalid_argument("noise_source gazetteer needs gazetteer_path");
  }
  Gazetteer g = Gazetteer::parse(text, labels);
  for (const auto& w : Gazetteer::default_blocklist()) g.block(w);
  if (!config.blocklist_path.empty()) g.load_blocklist(read_file(config.blocklist_path));
  return g;
}

ExperimentCorpora load_corpora(const ExperimentConfig& config) {
  ExperimentCorpora c;
  c.labels = config.label_set();
  if (config.train_path.empty()) {
    ToyCorpusConfig toy{config.toy_train_tokens, config.toy_dev_tokens,
                        config.toy_test_tokens, config.toy_seed};
    auto generated = generate_toy_corpus(toy, c.labels);
    c.train = std::move(generated.train);
    c.dev = std::move(generated.dev);
    c.test = std::move(generated.test);
  } else {
    if (config.dev_path.empty() || config.test_path.empty()) {
      throw std::invalid_argument("train_path requires dev_path and test_path");
    }
    c.train = parse_conll(read_file(config.train_path), c.labels);
    c.dev = parse_conll(read_file(config.dev_path), c.labels);
    c.test = parse_conll(read_file(config.test_path), c.labels);
  }
  for (const auto* corpus : {&c.train, &c.dev, &c.test}) {
    if (!corpus->labeled() || corpus->sentences.empty()) {
      throw std::invalid_argument("train, dev and test corpora must be non-empty and "
                                  "fully labelled");
    }
  }

  switch (config.noise_source_kind()) {
    case NoiseSource::channel:
      c.train_noisy = simulate_noise(c.train, config.channel_spec(), c.labels.size());
      break;
    case NoiseSource::gazetteer:
      c.train_noisy = annotate(c.train.token_lists(), load_gazetteer(config, c.labels));
      break;
    case NoiseSource::file: {
      if (config.noisy_path.empty()) {
        throw std::invalid_argument("noise_source file needs noisy_path");
      }
      const Corpus noisy = parse_conll(read_file(config.noisy_path), c.labels);
      if (noisy.sentences.size() != c.train.sentences.size()) {
        throw std::invalid_argument("noisy_path is not aligned with train_path");
      }
      for (std::size_t s = 0; s < noisy.sentences.size(); ++s) {
        if (noisy.sentences[s].tokens != c.train.sentences[s].tokens ||
            noisy.sentences[s].labels.size() != noisy.sentences[s].tokens.size()) {
          throw std::invalid_argument("noisy_path sentence " + std::to_string(s + 1) +
                                      " differs from the training corpus");
        }
      }
      c.train_noisy = noisy.label_sequences();
      break;
    }
  }
  return c;
}

std::vector<TokenId> token_ids(const Vocabulary& vocabulary,
                               const std::vector<std::string>& tokens) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocabulary.lookup(t));
  return ids;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  return prepare_experiment(config, load_corpora(config));
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config,
                                      const ExperimentCorpora& corpora) {
  Embeddings embeddings;
  if (!config.embedding_path.empty()) {
    embeddings = load_embeddings(config.embedding_path, config.embedding_dim);
  } else {
    std::set<std::string> words;
    for (const auto* corpus : {&corpora.train, &corpora.dev, &corpora.test}) {
      for (const auto& s : corpus->sentences) words.insert(s.tokens.begin(), s.tokens.end());
    }
    embeddings = random_embeddings({words.begin(), words.end()}, config.embedding_dim,
                                   config.seed);
  }

  PreparedExperiment p;
  p.vocabulary = embeddings.vocabulary;
  p.pool.labels = corpora.labels;
  p.pool.pad = p.vocabulary.pad();
  p.pool.embeddings = embeddings.table;
  p.pool.noisy_includes_clean = config.noisy_includes_clean;
  for (std::size_t s = 0; s < corpora.train.sentences.size(); ++s) {
    const auto& sentence = corpora.train.sentences[s];
    p.pool.train.push_back({token_ids(p.vocabulary, sentence.tokens), sentence.labels,
                            corpora.train_noisy.at(s)});
  }
  for (const auto& sentence : corpora.dev.sentences) {
    p.pool.dev.push_back({token_ids(p.vocabulary, sentence.tokens), sentence.labels, {}});
  }
  for (const auto& sentence : corpora.test.sentences) {
    p.pool.test.push_back({token_ids(p.vocabulary, sentence.tokens), sentence.labels, {}});
  }
  return p;
}

SplitDataset split_experiment(const PreparedExperiment& prepared,
                              const ExperimentConfig& config) {
  return make_split(prepared.pool, config.clean_budget, config.seed);
}

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  const TrainedModel& m = checkpoint.model;
  json j;
  j["format"] = "noiselab-checkpoint-1";
  j["config"] = checkpoint.config.to_text();
  j["vocabulary"] = checkpoint.vocabulary.words();
  j["embeddings"] = tensor_json(checkpoint.embeddings);
  j["parameters"] = tensors_json(m.params.trainable());
  if (m.noise) {
    j["noise"] = {{"fixed", !m.noise->trainable()}, {"weights", tensor_json(m.noise->weights())}};
  }
  if (m.cleaner) j["cleaner"] = tensors_json(m.cleaner->trainable());
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "noiselab-checkpoint-1") {
    throw std::invalid_argument("checkpoint: unknown format");
  }
  try {
    Checkpoint c;
    c.config = ExperimentConfig::from_text(j.at("config").get<std::string>());
    c.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    c.embeddings = tensor_from_json(j.at("embeddings"), false);
    if (c.embeddings.rows() != c.vocabulary.size()) {
      throw std::invalid_argument("checkpoint: embedding rows do not match vocabulary");
    }
    TrainingConfig training = c.config.training();
    training.dims.embedding_dim = c.embeddings.cols();
    Rng rng(0);
    c.model.params = ModelParameters::initialize(training.dims, c.embeddings, rng);
    load_tensors(j.at("parameters"), c.model.params.trainable());
    if (j.contains("noise")) {
      Tensor w = tensor_from_json(j["noise"].at("weights"), false);
      c.model.noise = j["noise"].at("fixed").get<bool>() ? NoiseMatrix::fixed(w)
                                                         : NoiseMatrix::learnable(w);
    }
    if (j.contains("cleaner")) {
      c.model.cleaner = CleaningNetwork::initialize(training.dims, rng);
      load_tensors(j["cleaner"], c.model.cleaner->trainable());
    }
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint: ") + e.what());
  }
}

std::string epoch_record_json(const TrialResult& trial, const EpochRecord& record) {
  json j = {{"variant", trial.variant},        {"seed", trial.seed},
            {"epoch", record.epoch},           {"phase", phase_name(record.phase)},
            {"loss", record.loss},             {"examples", record.examples},
            {"dev_f1", record.dev_f1}};
  return j.dump();
}

std::string trial_result_json(const TrialResult& trial, const LabelSet& labels) {
  json j = {{"variant", trial.variant},
            {"seed", trial.seed},
            {"selected_epoch", trial.selected_epoch},
            {"dev_f1", trial.dev_f1},
            {"test_f1", trial.test_f1},
            {"test_report", prf_object(trial.test_report)},
            {"labels", labels.names()}};
  if (!trial.theta.empty()) {
    j["theta"] = std::vector<Scalar>(trial.theta.begin(), trial.theta.end());
    j["noise_weights"] =
        std::vector<Scalar>(trial.noise_weights.begin(), trial.noise_weights.end());
  }
  return j.dump();
}

LabelSequences predict_corpus(const ModelParameters& params, const Vocabulary& vocabulary,
                              const Corpus& corpus) {
  std::vector<TokenWindow> windows;
  for (const auto& s : corpus.sentences) {
    const auto ids = token_ids(vocabulary, s.tokens);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      windows.push_back(build_window<TokenId>(ids, t, vocabulary.pad()));
    }
  }
  const auto flat = predict(params, windows);
  LabelSequences out;
  std::size_t pos = 0;
  for (const auto& s : corpus.sentences) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                     flat.begin() + static_cast<std::ptrdiff_t>(pos + s.tokens.size()));
    pos += s.tokens.size();
  }
  return out;
}

}  // namespace noiselab
