#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "noiselab/annotation.hpp"
#include "noiselab/config.hpp"
#include "noiselab/corpus.hpp"
#include "noiselab/evaluation.hpp"
#include "noiselab/pipeline.hpp"
#include "noiselab/toy_corpus.hpp"
#include "noiselab/training.hpp"

namespace noiselab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Files produced by one command, committed only after every output is ready.
class Outputs {
 public:
  void add(fs::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }
  void commit(std::ostream& out) const {
    for (const auto& [path, content] : files_) {
      write_file_atomic(path, content);
      out << "wrote " << path.string() << '\n';
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

LabelSet parse_labels(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return LabelSet(std::move(names));
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

std::string key_of(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) return {};
  const auto first = line.find_first_not_of(" \t");
  const auto last = line.find_last_not_of(" \t", eq - 1);
  if (first == std::string::npos || last == std::string::npos || first > last) return {};
  return line.substr(first, last - first + 1);
}

// Config file (or defaults) with "key=value" overrides applied last.
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::string text = path.empty() ? ExperimentConfig().to_text() : read_file(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--set expects key=value, got '" + o + "'");
    }
    const std::string key = o.substr(0, eq);
    std::istringstream lines(text);
    std::string line, kept;
    while (std::getline(lines, line)) {
      if (key_of(line) != key) kept += line + "\n";
    }
    text = kept + key + " = " + o.substr(eq + 1) + "\n";
  }
  return ExperimentConfig::from_text(text);
}

void add_config_options(CLI::App* cmd, std::string& config_path,
                        std::vector<std::string>& overrides) {
  cmd->add_option("-c,--config", config_path, "Experiment config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", overrides, "Config override key=value (repeatable)");
}

int cmd_toy_corpus(const fs::path& dir, const ToyCorpusConfig& toy, std::ostream& out) {
  const LabelSet labels = LabelSet::conll();
  const ToyCorpus corpus = generate_toy_corpus(toy, labels);
  Outputs outputs;
  outputs.add(dir / "train.conll", write_conll(corpus.train, labels));
  outputs.add(dir / "dev.conll", write_conll(corpus.dev, labels));
  outputs.add(dir / "test.conll", write_conll(corpus.test, labels));
  outputs.add(dir / "gazetteer.tsv", corpus.gazetteer);
  outputs.add(dir / "blocklist.txt", corpus.blocklist);
  outputs.commit(out);
  return 0;
}

int cmd_annotate(const std::string& input, const std::string& gazetteer_path,
                 const std::string& blocklist, const std::string& output,
                 const std::string& report, const LabelSet& labels, std::ostream& out) {
  const Corpus corpus = parse_conll(read_file(input), labels);
  Gazetteer gazetteer = Gazetteer::parse(read_file(gazetteer_path), labels);
  for (const auto& w : Gazetteer::default_blocklist()) gazetteer.block(w);
  if (!blocklist.empty()) gazetteer.load_blocklist(read_file(blocklist));
  const auto automatic = annotate(corpus.token_lists(), gazetteer);

  Outputs outputs;
  outputs.add(output, write_conll(relabel(corpus, automatic), labels));
  if (corpus.labeled()) {
    const PrfReport quality = annotation_quality(corpus.label_sequences(), automatic, labels);
    out << "annotation quality: P=" << quality.overall.precision
        << " R=" << quality.overall.recall << " F1=" << quality.overall.f1 << '\n';
    if (!report.empty()) outputs.add(report, prf_to_csv(quality));
  } else if (!report.empty()) {
    throw std::invalid_argument("--report needs a labelled input corpus");
  }
  outputs.commit(out);
  return 0;
}

int cmd_simulate_noise(const std::string& input, const std::string& output,
                       const std::string& channel_file, const std::string& kind, double rate,
                       const std::string& permutation, const std::string& matrix,
                       std::uint64_t seed, const LabelSet& labels, std::ostream& out) {
  const Corpus corpus = parse_conll(read_file(input), labels);
  if (!corpus.labeled()) throw std::invalid_argument("simulate-noise needs gold labels");
  const NoiseChannelSpec spec =
      channel_file.empty()
          ? make_channel_spec(kind, rate, permutation, matrix, seed, labels)
          : parse_channel_spec(read_file(channel_file), labels);
  const auto noisy = simulate_noise(corpus, spec, labels.size());
  Outputs outputs;
  outputs.add(output, write_conll(relabel(corpus, noisy), labels));
  outputs.commit(out);
  return 0;
}

std::vector<Label> flatten(const LabelSequences& sequences) {
  std::vector<Label> flat;
  for (const auto& s : sequences) flat.insert(flat.end(), s.begin(), s.end());
  return flat;
}

int cmd_init_theta(const std::string& clean_path, const std::string& noisy_path,
                   double alpha, const std::string& output, const std::string& theta_output,
                   const LabelSet& labels, std::ostream& out) {
  const Corpus clean = parse_conll(read_file(clean_path), labels);
  const Corpus noisy = parse_conll(read_file(noisy_path), labels);
  if (!clean.labeled() || !noisy.labeled()) {
    throw std::invalid_argument("init-theta needs labelled clean and noisy files");
  }
  if (clean.sentences.size() != noisy.sentences.size()) {
    throw std::invalid_argument("clean and noisy files are not aligned");
  }
  for (std::size_t s = 0; s < clean.sentences.size(); ++s) {
    if (clean.sentences[s].tokens != noisy.sentences[s].tokens) {
      throw std::invalid_argument("sentence " + std::to_string(s + 1) +
                                  " differs between clean and noisy files");
    }
  }
  const auto counts = estimate_confusion(flatten(clean.label_sequences()),
                                         flatten(noisy.label_sequences()), labels.size());
  const Tensor b = init_noise_weights(counts, alpha);
  Outputs outputs;
  outputs.add(output, matrix_to_csv(b.values(), labels));
  if (!theta_output.empty()) {
    outputs.add(theta_output, matrix_to_csv(theta_from_b(b).values(), labels));
  }
  outputs.commit(out);
  return 0;
}

std::string summary_json(const std::string& variant, const Summary& s, std::size_t n) {
  json j = {{"variant", variant},
            {"mean_f1", s.mean},
            {"se", s.standard_error},
            {"two_se", s.two_se()},
            {"degenerate", s.degenerate},
            {"n_seeds", n}};
  return j.dump(2) + "\n";
}

int cmd_train(const ExperimentConfig& config, const fs::path& dir, std::ostream& out) {
  if (config.n_seeds == 0) throw std::invalid_argument("n_seeds must be >= 1");
  const VariantSpec spec = VariantSpec::from_name(config.variant);
  const TrainingConfig training = config.training();
  const PreparedExperiment prepared = prepare_experiment(config);
  const SplitDataset data = split_experiment(prepared, config);
  out << "clean tokens " << data.clean_size() << ", noisy tokens " << data.noisy_size()
      << '\n';

  std::vector<TrialOutcome> outcomes(config.n_seeds);
  auto run_one = [&](std::size_t i) {
    return train_variant(spec, data, training, trial_seed(config.seed, i));
  };
  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  for (std::size_t begin = 0; begin < config.n_seeds; begin += threads) {
    const std::size_t end = std::min(config.n_seeds, begin + threads);
    std::vector<std::future<TrialOutcome>> running;
    for (std::size_t i = begin; i < end; ++i) {
      running.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                   run_one, i));
    }
    for (std::size_t i = begin; i < end; ++i) outcomes[i] = running[i - begin].get();
  }

  std::string metrics, trials;
  std::vector<double> f1;
  std::size_t best = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const TrialResult& r = outcomes[i].result;
    for (const auto& e : r.epochs) metrics += epoch_record_json(r, e) + "\n";
    trials += trial_result_json(r, data.labels()) + "\n";
    f1.push_back(r.test_f1);
    if (r.dev_f1 > outcomes[best].result.dev_f1) best = i;
    out << "trial " << i << " seed " << r.seed << ": epoch " << r.selected_epoch
        << " dev F1 " << r.dev_f1 << " test F1 " << r.test_f1 << '\n';
  }
  const Summary summary = summarize(f1);
  out << spec.name() << ": mean test F1 " << summary.mean << " +- "
      << summary.two_se() << " (2 SE, " << f1.size() << " seeds)\n";

  Checkpoint checkpoint{config, prepared.vocabulary, prepared.pool.embeddings,
                        outcomes[best].model};
  Outputs outputs;
  outputs.add(dir / "config.txt", config.to_text());
  outputs.add(dir / "metrics.jsonl", metrics);
  outputs.add(dir / "trials.jsonl", trials);
  outputs.add(dir / "summary.json", summary_json(std::string(spec.name()), summary, f1.size()));
  outputs.add(dir / "checkpoint.json", checkpoint_to_json(checkpoint));
  if (checkpoint.model.noise) {
    const ThetaReport report = theta_report(*checkpoint.model.noise, data.labels());
    outputs.add(dir / "theta.csv", report.theta_csv);
    outputs.add(dir / "noise_weights.csv", report.weights_csv);
  }
  outputs.commit(out);
  return 0;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& predicted_path,
                 const std::string& test_path, const std::string& output,
                 const std::string& json_output, const LabelSet& labels,
                 std::ostream& out) {
  if (checkpoint_path.empty() == predicted_path.empty()) {
    throw std::invalid_argument("evaluate needs exactly one of --checkpoint or --predicted");
  }
  PrfReport report;
  if (!checkpoint_path.empty()) {
    const Checkpoint c = checkpoint_from_json(read_file(checkpoint_path));
    const LabelSet model_labels = c.config.label_set();
    const Corpus test = parse_conll(read_file(test_path), model_labels);
    if (!test.labeled()) throw std::invalid_argument("test corpus needs gold labels");
    report = entity_prf(test.label_sequences(),
                        predict_corpus(c.model.params, c.vocabulary, test), model_labels);
  } else {
    const Corpus gold = parse_conll(read_file(test_path), labels);
    const Corpus predicted = parse_conll(read_file(predicted_path), labels);
    if (!gold.labeled() || !predicted.labeled()) {
      throw std::invalid_argument("gold and predicted corpora need labels");
    }
    if (gold.sentences.size() != predicted.sentences.size()) {
      throw std::invalid_argument("gold and predicted corpora are not aligned");
    }
    report = entity_prf(gold.label_sequences(), predicted.label_sequences(), labels);
  }
  out << "overall: P=" << report.overall.precision << " R=" << report.overall.recall
      << " F1=" << report.overall.f1 << '\n';
  Outputs outputs;
  if (!output.empty()) outputs.add(output, prf_to_csv(report));
  if (!json_output.empty()) outputs.add(json_output, prf_to_json(report));
  if (output.empty() && json_output.empty()) out << prf_to_csv(report);
  outputs.commit(out);
  return 0;
}

int cmd_sweep(const ExperimentConfig& config, const std::string& axis_name,
              const std::vector<double>& values, const std::vector<std::string>& variants,
              const std::string& output, std::ostream& out) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  const SweepAxis axis = parse_sweep_axis(axis_name);
  const PreparedExperiment prepared = prepare_experiment(config);
  const TrainingConfig training = config.training();
  std::vector<SweepRow> rows;
  for (const auto& name : variants.empty() ? std::vector<std::string>{config.variant}
                                           : variants) {
    const auto part = sweep(axis, values, VariantSpec::from_name(name), prepared.pool,
                            training, config.clean_budget, config.n_seeds);
    for (const auto& r : part) {
      out << sweep_axis_name(axis) << ' ' << format_double(r.axis_value) << ' ' << r.variant
          << ": mean F1 " << r.mean_f1 << " se " << r.se << '\n';
    }
    rows.insert(rows.end(), part.begin(), part.end());
  }
  Outputs outputs;
  outputs.add(output, sweep_to_csv(rows));
  fs::path config_copy = output;
  config_copy += ".config.txt";
  outputs.add(config_copy, config.to_text());
  outputs.commit(out);
  return 0;
}

int cmd_report(const std::string& checkpoint_path, const std::string& output,
               const std::string& weights_output, std::ostream& out) {
  const Checkpoint c = checkpoint_from_json(read_file(checkpoint_path));
  if (!c.model.noise) {
    throw std::invalid_argument("checkpoint of variant " + c.config.variant +
                                " has no noise layer");
  }
  const ThetaReport report = theta_report(*c.model.noise, c.config.label_set());
  Outputs outputs;
  outputs.add(output, report.theta_csv);
  if (!weights_output.empty()) outputs.add(weights_output, report.weights_csv);
  outputs.commit(out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"noiselab: noisy-label training with a noise adaptation layer"};
  app.require_subcommand(1);
  std::string labels_text = "O,PER,ORG,LOC,MISC";
  app.add_option("--labels", labels_text, "Comma-separated classes, O included");

  // toy-corpus
  auto* toy = app.add_subcommand("toy-corpus", "Write the bundled synthetic corpus");
  std::string toy_dir;
  ToyCorpusConfig toy_config;
  toy->add_option("-o,--output-dir", toy_dir, "Directory for the corpus files")->required();
  toy->add_option("--train-tokens", toy_config.train_tokens);
  toy->add_option("--dev-tokens", toy_config.dev_tokens);
  toy->add_option("--test-tokens", toy_config.test_tokens);
  toy->add_option("--seed", toy_config.seed);

  // annotate
  auto* ann = app.add_subcommand("annotate", "Label a corpus with a gazetteer");
  std::string ann_input, ann_gazetteer, ann_blocklist, ann_output, ann_report;
  ann->add_option("-i,--input", ann_input, "CoNLL corpus")->required()->check(CLI::ExistingFile);
  ann->add_option("-g,--gazetteer", ann_gazetteer, "surface<TAB>CLASS lines")
      ->required()
      ->check(CLI::ExistingFile);
  ann->add_option("--blocklist", ann_blocklist, "Extra blocked surface forms")
      ->check(CLI::ExistingFile);
  ann->add_option("-o,--output", ann_output, "Automatically labelled CoNLL file")->required();
  ann->add_option("--report", ann_report, "Annotation-quality CSV (labelled input only)");

  // simulate-noise
  auto* sim = app.add_subcommand("simulate-noise", "Corrupt gold labels with a channel");
  std::string sim_input, sim_output, sim_channel_file, sim_kind = "gazetteer-like";
  std::string sim_permutation, sim_matrix;
  double sim_rate = 0.2;
  std::uint64_t sim_seed = 7;
  sim->add_option("-i,--input", sim_input, "Gold CoNLL corpus")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--output", sim_output, "Corrupted CoNLL file")->required();
  sim->add_option("--channel-file", sim_channel_file, "Channel block in config syntax")
      ->check(CLI::ExistingFile);
  sim->add_option("--channel", sim_kind, "gazetteer-like, uniform, permutation or empirical");
  sim->add_option("--rate", sim_rate, "Flip rate of the uniform channel");
  sim->add_option("--permutation", sim_permutation, "Target class for each class");
  sim->add_option("--matrix", sim_matrix, "Row-stochastic matrix, rows separated by ';'");
  sim->add_option("--seed", sim_seed);

  // init-theta
  auto* init = app.add_subcommand("init-theta", "Noise weights b from aligned clean/noisy files");
  std::string init_clean, init_noisy, init_output, init_theta;
  double init_alpha = 1.0;
  init->add_option("--clean", init_clean)->required()->check(CLI::ExistingFile);
  init->add_option("--noisy", init_noisy)->required()->check(CLI::ExistingFile);
  init->add_option("--alpha", init_alpha, "Additive smoothing")->check(CLI::PositiveNumber);
  init->add_option("-o,--output", init_output, "b as labelled CSV")->required();
  init->add_option("--theta-output", init_theta, "theta = row-softmax(b) as labelled CSV");

  // train
  auto* train = app.add_subcommand("train", "Train one variant over n_seeds trials");
  std::string train_config, train_dir;
  std::vector<std::string> train_sets;
  add_config_options(train, train_config, train_sets);
  train->add_option("-o,--output-dir", train_dir, "Run directory")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Entity-level P/R/F1 on a labelled corpus");
  std::string eval_checkpoint, eval_predicted, eval_test, eval_output, eval_json;
  eval->add_option("--checkpoint", eval_checkpoint)->check(CLI::ExistingFile);
  eval->add_option("--predicted", eval_predicted, "Predicted CoNLL file to score directly")
      ->check(CLI::ExistingFile);
  eval->add_option("-t,--test", eval_test, "Gold CoNLL corpus")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--output", eval_output, "Report CSV");
  eval->add_option("--json", eval_json, "Report JSON");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Clean-size or noisy-factor sweep table");
  std::string sweep_config, sweep_axis, sweep_output;
  std::vector<std::string> sweep_sets, sweep_variants;
  std::vector<double> sweep_values;
  add_config_options(sw, sweep_config, sweep_sets);
  sw->add_option("--axis", sweep_axis, "clean-size or noisy-factor")->required();
  sw->add_option("--values", sweep_values, "Axis values")->required()->delimiter(',');
  sw->add_option("--variants", sweep_variants, "Variants (default: config variant)")
      ->delimiter(',');
  sw->add_option("-o,--output", sweep_output, "CSV table")->required();

  // report
  auto* rep = app.add_subcommand("report", "Learned theta of a checkpoint as labelled CSV");
  std::string rep_checkpoint, rep_output, rep_weights;
  rep->add_option("--checkpoint", rep_checkpoint)->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--output", rep_output, "theta CSV")->required();
  rep->add_option("--weights-output", rep_weights, "b CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const LabelSet labels = parse_labels(labels_text);
    if (toy->parsed()) return cmd_toy_corpus(toy_dir, toy_config, out);
    if (ann->parsed()) {
      return cmd_annotate(ann_input, ann_gazetteer, ann_blocklist, ann_output, ann_report,
                          labels, out);
    }
    if (sim->parsed()) {
      return cmd_simulate_noise(sim_input, sim_output, sim_channel_file, sim_kind, sim_rate,
                                sim_permutation, sim_matrix, sim_seed, labels, out);
    }
    if (init->parsed()) {
      return cmd_init_theta(init_clean, init_noisy, init_alpha, init_output, init_theta,
                            labels, out);
    }
    if (train->parsed()) return cmd_train(load_config(train_config, train_sets), train_dir, out);
    if (eval->parsed()) {
      return cmd_evaluate(eval_checkpoint, eval_predicted, eval_test, eval_output, eval_json,
                          labels, out);
    }
    if (sw->parsed()) {
      return cmd_sweep(load_config(sweep_config, sweep_sets), sweep_axis, sweep_values,
                       sweep_variants, sweep_output, out);
    }
    if (rep->parsed()) return cmd_report(rep_checkpoint, rep_output, rep_weights, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace noiselab::cli
