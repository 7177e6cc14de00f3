#include "noiselab/training.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "noiselab/annotation.hpp"
#include "noiselab/loss.hpp"
#include "noiselab/ops.hpp"

namespace noiselab {
namespace {

constexpr std::array<std::string_view, 6> kVariantNames = {
    "base-model",
    "base-model-with-noise",
    "noise-model",
    "noise-model-with-identity-init",
    "noise-adaptation-model",
    "noise-cleaning-model",
};

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

struct Batch {
  std::vector<TokenWindow> windows;
  std::vector<const WindowExample*> examples;

  template <typename LabelFn>
  std::vector<Label> labels(LabelFn label_of) const {
    std::vector<Label> out;
    out.reserve(examples.size());
    for (const WindowExample* e : examples) out.push_back(label_of(*e));
    return out;
  }
};

// Runs `step` over shuffled minibatches and returns the mean batch loss.
template <typename StepFn>
double for_each_batch(std::span<const WindowExample> data, std::size_t batch_size,
                      Rng& rng, StepFn step) {
  if (data.empty()) return 0.0;
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  const auto order = shuffled_indices(data.size(), rng);
  double total = 0.0;
  std::size_t batches = 0;
  Batch batch;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    batch.windows.clear();
    batch.examples.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const WindowExample& e = data[order[i]];
      batch.windows.push_back(e.tokens);
      batch.examples.push_back(&e);
    }
    total += step(batch);
    ++batches;
  }
  return total / static_cast<double>(batches);
}

Label noisy_label_of(const WindowExample& e) {
  if (!e.noisy_label) throw std::logic_error("example without noisy label z");
  return *e.noisy_label;
}

Label clean_label_of(const WindowExample& e) {
  if (!e.clean_label) throw std::logic_error("example without clean label y");
  return *e.clean_label;
}

}  // namespace

VariantSpec VariantSpec::of(Variant variant) {
  switch (variant) {
    case Variant::base_model:
      return {variant, ThetaInit::none, DataUsage::clean_only};
    case Variant::base_model_with_noise:
      return {variant, ThetaInit::none, DataUsage::pooled};
    case Variant::noise_model:
      return {variant, ThetaInit::clean_confusion, DataUsage::alternating};
    case Variant::noise_model_with_identity_init:
      return {variant, ThetaInit::identity, DataUsage::alternating};
    case Variant::noise_adaptation_model:
      return {variant, ThetaInit::pretrained_predictions, DataUsage::noisy_only};
    case Variant::noise_cleaning_model:
      return {variant, ThetaInit::none, DataUsage::cleaning};
  }
  throw std::invalid_argument("unknown variant");
}

VariantSpec VariantSpec::from_name(std::string_view name) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == name) return of(static_cast<Variant>(i));
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

std::string_view VariantSpec::name() const {
  return kVariantNames[static_cast<std::size_t>(variant)];
}

const std::array<std::string_view, 6>& variant_names() { return kVariantNames; }

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::clean: return "clean";
    case Phase::noisy: return "noisy";
    case Phase::pooled: return "pooled";
    case Phase::noisy_full: return "noisy-full";
    case Phase::cleaning: return "cleaning";
  }
  return "?";
}

std::vector<Phase> schedule(const VariantSpec& spec, std::size_t epochs) {
  std::vector<Phase> out;
  out.reserve(epochs);
  for (std::size_t e = 0; e < epochs; ++e) {
    switch (spec.data_usage) {
      case DataUsage::clean_only: out.push_back(Phase::clean); break;
      case DataUsage::pooled: out.push_back(Phase::pooled); break;
      case DataUsage::alternating:
        out.push_back(e % 2 == 0 ? Phase::clean : Phase::noisy);
        break;
      case DataUsage::noisy_only: out.push_back(Phase::noisy_full); break;
      case DataUsage::cleaning: out.push_back(Phase::cleaning); break;
    }
  }
  return out;
}

EvalSet make_eval_set(std::span<const std::vector<TokenId>> sentences,
                      const LabelSequences& gold, TokenId pad) {
  if (sentences.size() != gold.size()) {
    throw std::invalid_argument("make_eval_set: sentences and labels misaligned");
  }
  EvalSet set;
  set.gold = gold;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (sentences[s].size() != gold[s].size()) {
      throw std::invalid_argument("make_eval_set: sentence " + std::to_string(s) +
                                  " has mismatched label count");
    }
    for (std::size_t t = 0; t < sentences[s].size(); ++t) {
      set.windows.push_back(build_window<TokenId>(sentences[s], t, pad));
    }
  }
  return set;
}

SplitDataset::SplitDataset(LabelSet labels, std::vector<WindowExample> clean,
                           std::vector<WindowExample> noisy, EvalSet dev, EvalSet test,
                           Tensor embeddings)
    : labels_(std::move(labels)),
      clean_(std::move(clean)),
      noisy_(std::move(noisy)),
      dev_(std::move(dev)),
      test_(std::move(test)),
      embeddings_(std::move(embeddings)),
      counters_(std::make_unique<Counters>()) {}

SplitDataset::SplitDataset(const SplitDataset& other)
    : labels_(other.labels_),
      clean_(other.clean_),
      noisy_(other.noisy_),
      dev_(other.dev_),
      test_(other.test_),
      embeddings_(other.embeddings_),
      counters_(std::make_unique<Counters>()) {}

SplitDataset& SplitDataset::operator=(const SplitDataset& other) {
  if (this != &other) {
    SplitDataset copy(other);
    labels_ = std::move(copy.labels_);
    clean_ = std::move(copy.clean_);
    noisy_ = std::move(copy.noisy_);
    dev_ = std::move(copy.dev_);
    test_ = std::move(copy.test_);
    embeddings_ = std::move(copy.embeddings_);
    counters_ = std::move(copy.counters_);
  }
  return *this;
}

std::span<const WindowExample> SplitDataset::clean() const {
  ++counters_->clean;
  return clean_;
}

std::span<const WindowExample> SplitDataset::noisy() const {
  ++counters_->noisy;
  return noisy_;
}

AccessLog SplitDataset::access() const {
  return {counters_->clean.load(), counters_->noisy.load()};
}

void SplitDataset::reset_access() const {
  counters_->clean = 0;
  counters_->noisy = 0;
}

std::vector<WindowExample> subsample_noisy(std::span<const WindowExample> noisy,
                                           std::size_t size, std::uint64_t seed,
                                           std::size_t epoch) {
  if (size > noisy.size()) {
    throw std::invalid_argument("subsample_noisy: size " + std::to_string(size) +
                                " exceeds |N| = " + std::to_string(noisy.size()));
  }
  Rng rng = substream(seed, "sample", epoch);
  std::vector<std::size_t> idx(noisy.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `size` slots are the sample.
  for (std::size_t i = 0; i < size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<WindowExample> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(noisy[idx[i]]);
  return out;
}

std::size_t noisy_sample_size(double factor, std::size_t clean_size) {
  if (!(factor >= 0.0)) throw std::invalid_argument("noisy factor must be >= 0");
  return static_cast<std::size_t>(std::llround(factor * static_cast<double>(clean_size)));
}

double train_clean_epoch(ModelParameters& params, std::span<const WindowExample> data,
                         Adam& optimizer, std::size_t batch_size, Rng& rng) {
  return for_each_batch(data, batch_size, rng, [&](const Batch& batch) {
    const auto labels =
        batch.labels([](const WindowExample& e) { return e.training_label(); });
    Tensor loss = cross_entropy(base_forward(params, batch.windows), labels);
    loss.backward();
    optimizer.step();
    return static_cast<double>(loss.item());
  });
}

double train_noisy_epoch(ModelParameters& params, const NoiseMatrix& noise,
                         std::span<const WindowExample> data, Adam& optimizer,
                         Adam* noise_optimizer, std::size_t batch_size, Rng& rng) {
  return for_each_batch(data, batch_size, rng, [&](const Batch& batch) {
    Tensor loss = cross_entropy(noisy_forward(params, batch.windows, noise),
                                batch.labels(noisy_label_of));
    loss.backward();
    optimizer.step();
    if (noise_optimizer) noise_optimizer->step();
    // Gradients reaching b when it is not being optimised are dropped.
    if (!noise_optimizer && noise.trainable()) {
      Tensor weights = noise.weights();
      weights.zero_grad();
    }
    return static_cast<double>(loss.item());
  });
}

double train_cleaner_epoch(const ModelParameters& params, CleaningNetwork& cleaner,
                           std::span<const WindowExample> data, Adam& optimizer,
                           std::size_t batch_size, Rng& rng) {
  const std::size_t k = params.dims.num_classes;
  return for_each_batch(data, batch_size, rng, [&](const Batch& batch) {
    Tensor noisy = one_hot(batch.labels(noisy_label_of), k);
    Tensor target = one_hot(batch.labels(clean_label_of), k);
    Tensor output = cleaning_forward(params, cleaner, batch.windows, noisy);
    Tensor loss = scale(absolute_error(output, target),
                        Scalar{1} / static_cast<Scalar>(batch.windows.size()));
    loss.backward();
    optimizer.step();
    return static_cast<double>(loss.item());
  });
}

std::vector<WindowExample> clean_noisy_labels(const ModelParameters& params,
                                              const CleaningNetwork& cleaner,
                                              std::span<const WindowExample> noisy,
                                              std::size_t batch_size) {
  NoGradGuard no_grad;
  const std::size_t k = params.dims.num_classes;
  std::vector<WindowExample> out(noisy.begin(), noisy.end());
  for (std::size_t begin = 0; begin < out.size(); begin += batch_size) {
    const std::size_t n = std::min(batch_size, out.size() - begin);
    std::vector<TokenWindow> windows;
    std::vector<Label> observed;
    for (std::size_t i = begin; i < begin + n; ++i) {
      windows.push_back(out[i].tokens);
      observed.push_back(noisy_label_of(out[i]));
    }
    Tensor cleaned = cleaning_forward(params, cleaner, windows, one_hot(observed, k));
    auto v = cleaned.values();
    for (std::size_t r = 0; r < n; ++r) {
      auto row = v.subspan(r * k, k);
      const Scalar mass = std::accumulate(row.begin(), row.end(), Scalar{0});
      // Renormalising does not move the argmax; an all-zero row keeps z.
      out[begin + r].noisy_label = mass > 0 ? argmax(row) : observed[r];
    }
  }
  return out;
}

PrfReport evaluate(const ModelParameters& params, const EvalSet& data,
                   const LabelSet& labels) {
  const auto flat = predict(params, data.windows);
  LabelSequences predicted;
  predicted.reserve(data.gold.size());
  std::size_t offset = 0;
  for (const auto& sentence : data.gold) {
    predicted.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                           flat.begin() + static_cast<std::ptrdiff_t>(offset + sentence.size()));
    offset += sentence.size();
  }
  return entity_prf(data.gold, predicted, labels);
}

namespace {

struct BestState {
  double dev_f1 = -1.0;
  std::size_t epoch = 0;
  ModelParameters params;
  std::optional<NoiseMatrix> noise;
  std::optional<CleaningNetwork> cleaner;
};

NoiseMatrix copy_noise(const NoiseMatrix& noise) {
  return noise.trainable() ? NoiseMatrix::learnable(noise.weights())
                           : NoiseMatrix::fixed(noise.weights());
}

}  // namespace

TrialOutcome train_variant(const VariantSpec& spec, const SplitDataset& data,
                           const TrainingConfig& config, std::uint64_t seed,
                           const EpochObserver& observer) {
  const LabelSet& labels = data.labels();
  ModelDims dims = config.dims;
  dims.num_classes = labels.size();
  if (dims.embedding_dim != data.embeddings().cols()) {
    dims.embedding_dim = data.embeddings().cols();
  }

  Rng init_rng = substream(seed, "init");
  Rng shuffle_rng = substream(seed, "shuffle");
  ModelParameters params = ModelParameters::initialize(dims, data.embeddings(), init_rng);
  Adam optimizer(params.trainable(), config.adam);

  std::optional<NoiseMatrix> noise;
  std::optional<Adam> noise_optimizer;
  std::optional<CleaningNetwork> cleaner;
  std::optional<Adam> cleaner_optimizer;

  // Training splits are fetched only by the phases that need them, so the
  // dataset's access log reflects each variant's data discipline.
  std::span<const WindowExample> clean;
  std::span<const WindowExample> noisy;
  auto need_clean = [&] {
    if (clean.empty()) clean = data.clean();
    if (clean.empty()) throw std::invalid_argument(std::string(spec.name()) + ": C is empty");
    return clean;
  };
  auto need_noisy = [&] {
    if (noisy.empty()) noisy = data.noisy();
    if (noisy.empty()) throw std::invalid_argument(std::string(spec.name()) + ": N is empty");
    return noisy;
  };
  auto subsample_size = [&] {
    return noisy_sample_size(config.noisy_factor, need_clean().size());
  };

  switch (spec.theta_init) {
    case ThetaInit::none:
      break;
    case ThetaInit::clean_confusion: {
      std::vector<Label> y, z;
      for (const auto& e : need_clean()) {
        y.push_back(clean_label_of(e));
        z.push_back(noisy_label_of(e));
      }
      noise = NoiseMatrix::learnable(init_noise_weights(
          estimate_confusion(y, z, labels.size()), config.smoothing_alpha));
      break;
    }
    case ThetaInit::identity:
      noise = NoiseMatrix::learnable(identity_init(labels.size()));
      break;
    case ThetaInit::pretrained_predictions: {
      Adam pretrain(params.trainable(), config.adam);
      for (std::size_t e = 0; e < config.pretrain_epochs; ++e) {
        train_clean_epoch(params, need_noisy(), pretrain, config.batch_size, shuffle_rng);
      }
      noise = NoiseMatrix::learnable(
          goldberger_init(params, need_noisy(), config.smoothing_alpha));
      break;
    }
  }
  if (noise) noise_optimizer.emplace(std::vector<Tensor>{noise->weights()}, config.adam);
  if (spec.data_usage == DataUsage::cleaning) {
    cleaner = CleaningNetwork::initialize(dims, init_rng);
    cleaner_optimizer.emplace(cleaner->trainable(), config.adam);
  }

  TrialOutcome outcome;
  TrialResult& result = outcome.result;
  result.variant = std::string(spec.name());
  result.seed = seed;
  BestState best;

  const auto phases = schedule(spec, config.epochs);
  for (std::size_t e = 0; e < phases.size(); ++e) {
    EpochRecord record;
    record.epoch = e + 1;
    record.phase = phases[e];
    switch (phases[e]) {
      case Phase::clean: {
        auto c = need_clean();
        record.examples = c.size();
        record.loss = train_clean_epoch(params, c, optimizer, config.batch_size, shuffle_rng);
        break;
      }
      case Phase::noisy: {
        auto sample = subsample_noisy(need_noisy(), subsample_size(), seed, e);
        record.examples = sample.size();
        record.loss = train_noisy_epoch(params, *noise, sample, optimizer,
                                        &*noise_optimizer, config.batch_size, shuffle_rng);
        break;
      }
      case Phase::noisy_full: {
        auto n = need_noisy();
        record.examples = n.size();
        record.loss = train_noisy_epoch(params, *noise, n, optimizer, &*noise_optimizer,
                                        config.batch_size, shuffle_rng);
        break;
      }
      case Phase::pooled: {
        auto pooled = subsample_noisy(need_noisy(), subsample_size(), seed, e);
        auto c = need_clean();
        pooled.insert(pooled.end(), c.begin(), c.end());
        record.examples = pooled.size();
        record.loss =
            train_clean_epoch(params, pooled, optimizer, config.batch_size, shuffle_rng);
        break;
      }
      case Phase::cleaning: {
        auto c = need_clean();
        train_cleaner_epoch(params, *cleaner, c, *cleaner_optimizer, config.batch_size,
                            shuffle_rng);
        auto pooled = clean_noisy_labels(
            params, *cleaner, subsample_noisy(need_noisy(), subsample_size(), seed, e));
        pooled.insert(pooled.end(), c.begin(), c.end());
        record.examples = pooled.size();
        record.loss =
            train_clean_epoch(params, pooled, optimizer, config.batch_size, shuffle_rng);
        break;
      }
    }
    record.dev_f1 = evaluate(params, data.dev(), labels).overall.f1;
    result.epochs.push_back(record);
    if (record.dev_f1 > best.dev_f1) {
      best.dev_f1 = record.dev_f1;
      best.epoch = record.epoch;
      best.params = params.snapshot();
      if (noise) best.noise = copy_noise(*noise);
      if (cleaner) best.cleaner = cleaner->snapshot();
    }
    if (observer) observer(result, record);
  }

  if (best.epoch == 0) throw std::invalid_argument("train_variant: zero epochs");
  result.selected_epoch = best.epoch;
  result.dev_f1 = best.dev_f1;
  result.test_report = evaluate(best.params, data.test(), labels);
  result.test_f1 = result.test_report.overall.f1;
  if (best.noise) {
    result.theta = best.noise->theta_values();
    result.noise_weights.assign(best.noise->weights().values().begin(),
                                best.noise->weights().values().end());
  }
  outcome.model = {best.params, best.noise, best.cleaner};
  return outcome;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    s.degenerate = true;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return s;
}

std::uint64_t trial_seed(std::uint64_t root, std::size_t trial) {
  return substream_seed(root, "trial", trial);
}

TrialSummary run_trials(const VariantSpec& spec, const SplitDataset& data,
                        const TrainingConfig& config, std::size_t n_seeds,
                        const EpochObserver& observer) {
  if (n_seeds == 0) throw std::invalid_argument("run_trials: n_seeds must be >= 1");
  TrialSummary summary;
  summary.variant = std::string(spec.name());
  summary.trials.resize(n_seeds);
  auto run_one = [&](std::size_t i) {
    return train_variant(spec, data, config, trial_seed(config.seed, i), observer).result;
  };
  if (config.threads > 1 && !observer) {
    for (std::size_t begin = 0; begin < n_seeds; begin += config.threads) {
      const std::size_t end = std::min(n_seeds, begin + config.threads);
      std::vector<std::future<TrialResult>> running;
      for (std::size_t i = begin; i < end; ++i) {
        running.push_back(std::async(std::launch::async, run_one, i));
      }
      for (std::size_t i = begin; i < end; ++i) {
        summary.trials[i] = running[i - begin].get();
      }
    }
  } else {
    for (std::size_t i = 0; i < n_seeds; ++i) summary.trials[i] = run_one(i);
  }
  std::vector<double> f1;
  for (const auto& t : summary.trials) f1.push_back(t.test_f1);
  summary.test_f1 = summarize(f1);
  return summary;
}

std::vector<std::size_t> sample_to_budget(std::span<const std::size_t> lengths,
                                          std::size_t budget, Rng& rng) {
  if (budget == 0) throw std::invalid_argument("clean budget must be positive");
  const std::size_t total = std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  if (budget > total) {
    throw std::invalid_argument("clean budget " + std::to_string(budget) +
                                " exceeds corpus size " + std::to_string(total));
  }
  const auto order = shuffled_indices(lengths.size(), rng);
  std::vector<std::size_t> picked;
  std::size_t taken = 0;
  for (std::size_t idx : order) {
    if (taken >= budget) break;
    picked.push_back(idx);
    taken += lengths[idx];
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

namespace {

void add_windows(const TokenSentence& s, TokenId pad, Source source,
                 std::vector<WindowExample>& out) {
  if (s.gold.size() != s.tokens.size() || s.noisy.size() != s.tokens.size()) {
    throw std::invalid_argument("token sentence with misaligned labels");
  }
  for (std::size_t t = 0; t < s.tokens.size(); ++t) {
    WindowExample e;
    e.tokens = build_window<TokenId>(s.tokens, t, pad);
    e.source = source;
    e.noisy_label = s.noisy[t];
    if (source == Source::clean) e.clean_label = s.gold[t];
    out.push_back(e);
  }
}

EvalSet eval_set_of(std::span<const TokenSentence> sentences, TokenId pad) {
  std::vector<std::vector<TokenId>> tokens;
  LabelSequences gold;
  for (const auto& s : sentences) {
    tokens.push_back(s.tokens);
    gold.push_back(s.gold);
  }
  return make_eval_set(tokens, gold, pad);
}

}  // namespace

SplitDataset make_split(const ExperimentPool& pool, std::size_t clean_budget,
                        std::uint64_t seed) {
  std::vector<std::size_t> lengths;
  for (const auto& s : pool.train) lengths.push_back(s.tokens.size());
  Rng rng = substream(seed, "clean-split");
  const auto picked = sample_to_budget(lengths, clean_budget, rng);
  std::vector<bool> in_clean(pool.train.size(), false);
  for (std::size_t i : picked) in_clean[i] = true;

  std::vector<WindowExample> clean, noisy;
  for (std::size_t i = 0; i < pool.train.size(); ++i) {
    if (in_clean[i]) add_windows(pool.train[i], pool.pad, Source::clean, clean);
    if (!in_clean[i] || pool.noisy_includes_clean) {
      add_windows(pool.train[i], pool.pad, Source::noisy, noisy);
    }
  }
  return SplitDataset(pool.labels, std::move(clean), std::move(noisy),
                      eval_set_of(pool.dev, pool.pad), eval_set_of(pool.test, pool.pad),
                      pool.embeddings);
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "clean-size") return SweepAxis::clean_size;
  if (name == "noisy-factor") return SweepAxis::noisy_factor;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) +
                              "' (expected clean-size or noisy-factor)");
}

std::string_view sweep_axis_name(SweepAxis axis) {
  return axis == SweepAxis::clean_size ? "clean-size" : "noisy-factor";
}

std::vector<SweepRow> sweep(SweepAxis axis, std::span<const double> values,
                            const VariantSpec& spec, const ExperimentPool& pool,
                            const TrainingConfig& config, std::size_t clean_budget,
                            std::size_t n_seeds) {
  if (values.empty()) throw std::invalid_argument("sweep: no axis values");
  std::vector<SweepRow> rows;
  std::optional<SplitDataset> fixed;
  if (axis == SweepAxis::noisy_factor) {
    fixed.emplace(make_split(pool, clean_budget, config.seed));
    // Validate every factor before spending time on training.
    for (double v : values) {
      const std::size_t n = noisy_sample_size(v, fixed->clean_size());
      if (n > fixed->noisy_size()) {
        throw std::invalid_argument("sweep: factor " + std::to_string(v) + " needs " +
                                    std::to_string(n) + " noisy examples, |N| = " +
                                    std::to_string(fixed->noisy_size()));
      }
    }
  }
  for (double v : values) {
    TrainingConfig cfg = config;
    std::optional<SplitDataset> resampled;
    const SplitDataset* data = nullptr;
    if (axis == SweepAxis::clean_size) {
      if (!(v >= 1.0)) throw std::invalid_argument("sweep: clean size must be >= 1");
      resampled.emplace(make_split(pool, static_cast<std::size_t>(std::llround(v)),
                                   config.seed));
      data = &*resampled;
    } else {
      cfg.noisy_factor = v;
      data = &*fixed;
    }
    const auto summary = run_trials(spec, *data, cfg, n_seeds);
    SweepRow row;
    row.axis_value = v;
    row.variant = summary.variant;
    row.mean_f1 = summary.test_f1.mean;
    row.se = summary.test_f1.standard_error;
    row.n_seeds = n_seeds;
    row.clean_size = data->clean_size();
    row.noisy_sample_size = noisy_sample_size(cfg.noisy_factor, data->clean_size());
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "axis_value,variant,mean_f1,se,n_seeds\n";
  for (const auto& r : rows) {
    out << r.axis_value << ',' << r.variant << ',' << r.mean_f1 << ',' << r.se << ','
        << r.n_seeds << '\n';
  }
  return out.str();
}

}  // namespace noiselab
