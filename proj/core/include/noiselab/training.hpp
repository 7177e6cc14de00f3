#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noiselab/adam.hpp"
#include "noiselab/evaluation.hpp"
#include "noiselab/labels.hpp"
#include "noiselab/model.hpp"
#include "noiselab/random.hpp"

namespace noiselab {

enum class Variant {
  base_model,
  base_model_with_noise,
  noise_model,
  noise_model_with_identity_init,
  noise_adaptation_model,
  noise_cleaning_model,
};

enum class ThetaInit { none, clean_confusion, identity, pretrained_predictions };

enum class DataUsage {
  clean_only,   // C every epoch
  pooled,       // C and a fresh noisy subsample, no noise layer
  alternating,  // clean epoch, then noisy/clean alternation
  noisy_only,   // all of N every epoch, never C
  cleaning,     // cleaner on C, then base on cleaned subsample plus C
};

struct VariantSpec {
  Variant variant = Variant::base_model;
  ThetaInit theta_init = ThetaInit::none;
  DataUsage data_usage = DataUsage::clean_only;

  // Accepts exactly the six hyphenated variant names.
  static VariantSpec from_name(std::string_view name);
  static VariantSpec of(Variant variant);
  std::string_view name() const;
  bool has_noise_layer() const {
    return data_usage == DataUsage::alternating || data_usage == DataUsage::noisy_only;
  }
};

const std::array<std::string_view, 6>& variant_names();

enum class Phase { clean, noisy, pooled, noisy_full, cleaning };
std::string_view phase_name(Phase phase);

// Ordered epoch phases for a variant. For the noise models the first epoch
// is clean and the rest alternate noisy/clean, so 40 epochs give
// [clean, (noisy, clean) x 19, noisy].
std::vector<Phase> schedule(const VariantSpec& spec, std::size_t epochs);

// Windows of whole sentences with their gold labels, for dev/test scoring.
struct EvalSet {
  std::vector<TokenWindow> windows;
  LabelSequences gold;

  std::size_t tokens() const { return windows.size(); }
};

EvalSet make_eval_set(std::span<const std::vector<TokenId>> sentences,
                      const LabelSequences& gold, TokenId pad);

// Counts reads of C and N through the dataset accessors.
struct AccessLog {
  std::size_t clean_reads = 0;
  std::size_t noisy_reads = 0;
};

// C with y (and the noisy counterparts z used for theta initialisation), N
// with z only, and clean dev/test sets. Training code reaches C and N only
// through clean() and noisy(), which are instrumented.
class SplitDataset {
 public:
  SplitDataset(LabelSet labels, std::vector<WindowExample> clean,
               std::vector<WindowExample> noisy, EvalSet dev, EvalSet test,
               Tensor embeddings);
  SplitDataset(const SplitDataset& other);
  SplitDataset& operator=(const SplitDataset& other);

  std::span<const WindowExample> clean() const;
  std::span<const WindowExample> noisy() const;
  std::size_t clean_size() const { return clean_.size(); }
  std::size_t noisy_size() const { return noisy_.size(); }
  const EvalSet& dev() const { return dev_; }
  const EvalSet& test() const { return test_; }
  const LabelSet& labels() const { return labels_; }
  // Shared frozen embedding table, PAD and UNK rows included.
  const Tensor& embeddings() const { return embeddings_; }

  AccessLog access() const;
  void reset_access() const;

 private:
  struct Counters {
    std::atomic<std::size_t> clean{0};
    std::atomic<std::size_t> noisy{0};
  };

  LabelSet labels_;
  std::vector<WindowExample> clean_;
  std::vector<WindowExample> noisy_;
  EvalSet dev_;
  EvalSet test_;
  Tensor embeddings_;
  std::unique_ptr<Counters> counters_;
};

struct TrainingConfig {
  ModelDims dims;
  AdamConfig adam;
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  double smoothing_alpha = 1.0;
  // Per-epoch noisy subsample size is round(noisy_factor * |C|).
  double noisy_factor = 1.0;
  // Base-model pretraining on N before the noise-adaptation model's init.
  std::size_t pretrain_epochs = 5;
  std::uint64_t seed = 1;
  // Trials run concurrently in run_trials when > 1.
  std::size_t threads = 1;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  Phase phase = Phase::clean;
  double loss = 0.0;      // mean training loss over the epoch's batches
  std::size_t examples = 0;
  double dev_f1 = 0.0;
};

struct TrialResult {
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t selected_epoch = 0;  // 1-based, max dev F1, earliest on ties
  double dev_f1 = 0.0;
  double test_f1 = 0.0;
  PrfReport test_report;
  // Noise layer of the selected epoch; empty without one.
  std::vector<Scalar> theta;
  std::vector<Scalar> noise_weights;
};

struct TrainedModel {
  ModelParameters params;
  std::optional<NoiseMatrix> noise;
  std::optional<CleaningNetwork> cleaner;
};

struct TrialOutcome {
  TrialResult result;
  TrainedModel model;  // weights of the selected epoch
};

using EpochObserver = std::function<void(const TrialResult&, const EpochRecord&)>;

// Uniform sample without replacement. Each (seed, epoch) pair gives its own
// reproducible sample.
std::vector<WindowExample> subsample_noisy(std::span<const WindowExample> noisy,
                                           std::size_t size, std::uint64_t seed,
                                           std::size_t epoch);

std::size_t noisy_sample_size(double factor, std::size_t clean_size);

// One shuffled minibatch pass of cross-entropy against each example's
// training label, without a noise layer. Returns the mean batch loss.
double train_clean_epoch(ModelParameters& params, std::span<const WindowExample> data,
                         Adam& optimizer, std::size_t batch_size, Rng& rng);

// One shuffled pass of cross-entropy of noisy_forward against z. The base
// weights are stepped by `optimizer`; b by `noise_optimizer` when given.
double train_noisy_epoch(ModelParameters& params, const NoiseMatrix& noise,
                         std::span<const WindowExample> data, Adam& optimizer,
                         Adam* noise_optimizer, std::size_t batch_size, Rng& rng);

// Absolute-error regression of the cleaner output onto one-hot y, given the
// noisy labels z of the same clean instances. Only cleaner weights move.
double train_cleaner_epoch(const ModelParameters& params, CleaningNetwork& cleaner,
                           std::span<const WindowExample> data, Adam& optimizer,
                           std::size_t batch_size, Rng& rng);

// Replaces z by the argmax of the renormalised cleaner output.
std::vector<WindowExample> clean_noisy_labels(const ModelParameters& params,
                                              const CleaningNetwork& cleaner,
                                              std::span<const WindowExample> noisy,
                                              std::size_t batch_size = 256);

PrfReport evaluate(const ModelParameters& params, const EvalSet& data,
                   const LabelSet& labels);

TrialOutcome train_variant(const VariantSpec& spec, const SplitDataset& data,
                           const TrainingConfig& config, std::uint64_t trial_seed,
                           const EpochObserver& observer = {});

struct Summary {
  double mean = 0.0;
  double standard_error = 0.0;  // sample stdev / sqrt(n)
  bool degenerate = false;      // n < 2, standard error reported as 0
  double two_se() const { return 2.0 * standard_error; }
};

Summary summarize(std::span<const double> values);

struct TrialSummary {
  std::string variant;
  Summary test_f1;
  std::vector<TrialResult> trials;
};

// Seed of trial i derived from the config's root seed.
std::uint64_t trial_seed(std::uint64_t root, std::size_t trial);

TrialSummary run_trials(const VariantSpec& spec, const SplitDataset& data,
                        const TrainingConfig& config, std::size_t n_seeds = 5,
                        const EpochObserver& observer = {});

// Token-level experiment material before the clean/noisy split.
struct TokenSentence {
  std::vector<TokenId> tokens;
  std::vector<Label> gold;
  std::vector<Label> noisy;
};

struct ExperimentPool {
  LabelSet labels = LabelSet::conll();
  TokenId pad = 0;
  std::vector<TokenSentence> train;
  std::vector<TokenSentence> dev;
  std::vector<TokenSentence> test;
  Tensor embeddings;
  // Whether N also contains the automatically labelled copies of C.
  bool noisy_includes_clean = false;
};

// Whole sentences in random order until the token count first reaches the
// budget. Returned indices are sorted.
std::vector<std::size_t> sample_to_budget(std::span<const std::size_t> lengths,
                                          std::size_t budget, Rng& rng);

SplitDataset make_split(const ExperimentPool& pool, std::size_t clean_budget,
                        std::uint64_t seed);

enum class SweepAxis { clean_size, noisy_factor };
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view sweep_axis_name(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  std::string variant;
  double mean_f1 = 0.0;
  double se = 0.0;
  std::size_t n_seeds = 0;
  std::size_t clean_size = 0;
  std::size_t noisy_sample_size = 0;
};

// clean-size: C resampled at each token budget, noisy subsample tied to |C|
// through config.noisy_factor. noisy-factor: C fixed at `clean_budget`,
// subsample size round(value * |C|), which must not exceed |N|.
std::vector<SweepRow> sweep(SweepAxis axis, std::span<const double> values,
                            const VariantSpec& spec, const ExperimentPool& pool,
                            const TrainingConfig& config, std::size_t clean_budget,
                            std::size_t n_seeds);

// axis_value,variant,mean_f1,se,n_seeds
std::string sweep_to_csv(std::span<const SweepRow> rows);

}  // namespace noiselab
