#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "noiselab/training.hpp"
#include "test_util.hpp"

using namespace noiselab;

namespace {

TrainingConfig small_config(std::size_t epochs = 6) {
  TrainingConfig c;
  c.dims.embedding_dim = 6;
  c.dims.state_size = 6;
  c.dims.dense_size = 6;
  c.dims.cleaner_projection = 4;
  c.adam.learning_rate = Scalar(0.02);
  c.epochs = epochs;
  c.batch_size = 16;
  c.pretrain_epochs = 2;
  c.seed = 5;
  return c;
}

const ExperimentPool& shared_pool() {
  static const ExperimentPool pool =
      testing::synthetic_pool(300, 9, NoiseChannelSpec::uniform(0.3, 2));
  return pool;
}

bool rows_stochastic(const std::vector<Scalar>& theta, std::size_t k, double tol) {
  for (std::size_t i = 0; i < k; ++i) {
    double total = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (theta[i * k + j] <= 0) return false;
      total += theta[i * k + j];
    }
    if (std::abs(total - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("training");

TEST_CASE("variant names round trip") {
  for (auto name : variant_names()) CHECK(VariantSpec::from_name(name).name() == name);
  CHECK_THROWS(VariantSpec::from_name("base_model"));
  CHECK_THROWS(VariantSpec::from_name("Base-Model"));
  CHECK(VariantSpec::of(Variant::noise_model).has_noise_layer());
  CHECK(VariantSpec::of(Variant::noise_adaptation_model).has_noise_layer());
  CHECK_FALSE(VariantSpec::of(Variant::base_model_with_noise).has_noise_layer());
}

TEST_CASE("epoch schedules") {
  const auto alt = schedule(VariantSpec::of(Variant::noise_model), 40);
  REQUIRE(alt.size() == 40);
  CHECK(alt.front() == Phase::clean);
  CHECK(alt.back() == Phase::noisy);
  for (std::size_t e = 0; e < 40; ++e) {
    CHECK(alt[e] == (e % 2 == 0 ? Phase::clean : Phase::noisy));
  }
  CHECK(std::count(alt.begin(), alt.end(), Phase::clean) == 20);
  const auto base = schedule(VariantSpec::of(Variant::base_model), 3);
  CHECK(base == std::vector<Phase>(3, Phase::clean));
  CHECK(schedule(VariantSpec::of(Variant::noise_adaptation_model), 2) ==
        std::vector<Phase>(2, Phase::noisy_full));
  CHECK(schedule(VariantSpec::of(Variant::noise_cleaning_model), 40).size() == 40);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v = {1.0, 2.0, 3.0};
  const Summary s = summarize(v);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.standard_error == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(s.two_se() == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK_FALSE(s.degenerate);
  const std::vector<double> one = {0.7};
  CHECK(summarize(one).degenerate);
  CHECK(summarize(one).standard_error == 0.0);
  CHECK_THROWS(summarize(std::vector<double>{}));
}

TEST_CASE("noisy subsampling") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  const auto noisy = data.noisy();
  const auto a = subsample_noisy(noisy, 200, 7, 3);
  const auto b = subsample_noisy(noisy, 200, 7, 3);
  const auto c = subsample_noisy(noisy, 200, 7, 4);
  REQUIRE(a.size() == 200);
  auto key = [](const std::vector<WindowExample>& s) {
    std::vector<TokenWindow> out;
    for (const auto& e : s) out.push_back(e.tokens);
    return out;
  };
  CHECK(key(a) == key(b));
  CHECK(key(a) != key(c));
  CHECK_THROWS(subsample_noisy(noisy, noisy.size() + 1, 7, 0));
  CHECK(subsample_noisy(noisy, noisy.size(), 7, 0).size() == noisy.size());

  CHECK(noisy_sample_size(1.0, 405) == 405);
  CHECK(noisy_sample_size(0.5, 405) == 203);
  CHECK(noisy_sample_size(10.0, 405) == 4050);
  CHECK_THROWS(noisy_sample_size(-1.0, 10));
}

TEST_CASE("sampling to a token budget stops at the first crossing") {
  const std::vector<std::size_t> lengths = {5, 3, 8, 2, 7, 4, 6};
  Rng rng(2);
  const auto picked = sample_to_budget(lengths, 12, rng);
  CHECK(std::is_sorted(picked.begin(), picked.end()));
  std::size_t total = 0, largest = 0;
  for (std::size_t i : picked) {
    total += lengths[i];
    largest = std::max(largest, lengths[i]);
  }
  CHECK(total >= 12);
  CHECK(total - largest < 12);
  CHECK_THROWS(sample_to_budget(lengths, 0, rng));
  CHECK_THROWS(sample_to_budget(lengths, 36, rng));
}

TEST_CASE("clean/noisy split") {
  const ExperimentPool& pool = shared_pool();
  std::size_t train_tokens = 0;
  for (const auto& s : pool.train) train_tokens += s.tokens.size();
  const SplitDataset data = make_split(pool, 200, 3);
  CHECK(data.clean_size() >= 200);
  CHECK(data.clean_size() + data.noisy_size() == train_tokens);
  for (const auto& e : data.clean()) {
    CHECK(e.clean_label.has_value());
    CHECK(e.noisy_label.has_value());
  }
  for (const auto& e : data.noisy()) CHECK_FALSE(e.clean_label.has_value());

  ExperimentPool with_copies = pool;
  with_copies.noisy_includes_clean = true;
  CHECK(make_split(with_copies, 200, 3).noisy_size() == train_tokens);
  const SplitDataset again = make_split(pool, 200, 3);
  CHECK(again.clean_size() == data.clean_size());
}

TEST_CASE("theta rows stay stochastic through Adam updates") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  const TrainingConfig cfg = small_config();
  Rng rng(1);
  ModelDims dims = cfg.dims;
  ModelParameters params = ModelParameters::initialize(dims, data.embeddings(), rng);
  NoiseMatrix noise = NoiseMatrix::learnable(identity_init(5));
  Adam optimizer(params.trainable(), cfg.adam);
  Adam noise_optimizer({noise.weights()}, AdamConfig{Scalar(0.5)});
  const auto before = noise.theta_values();
  for (int epoch = 0; epoch < 3; ++epoch) {
    train_noisy_epoch(params, noise, subsample_noisy(data.noisy(), 64, 1, epoch), optimizer,
                      &noise_optimizer, 8, rng);
    CHECK(rows_stochastic(noise.theta_values(), 5, 1e-12));
  }
  CHECK(noise_optimizer.step_count() == 24);
  CHECK(noise.theta_values() != before);
}

TEST_CASE("a fixed noise layer is not updated") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  const TrainingConfig cfg = small_config();
  Rng rng(1);
  ModelParameters params = ModelParameters::initialize(cfg.dims, data.embeddings(), rng);
  const Tensor theta = theta_from_b(identity_init(5));
  NoiseMatrix noise = NoiseMatrix::fixed(theta);
  Adam optimizer(params.trainable(), cfg.adam);
  const auto before = noise.theta_values();
  const auto dense_before = testing::values_of(params.dense_weight);
  train_noisy_epoch(params, noise, subsample_noisy(data.noisy(), 64, 1, 0), optimizer,
                    nullptr, 16, rng);
  CHECK(noise.theta_values() == before);
  CHECK(testing::values_of(params.dense_weight) != dense_before);
}

TEST_CASE("cleaner epochs move only the cleaner") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  const TrainingConfig cfg = small_config();
  Rng rng(1);
  ModelParameters params = ModelParameters::initialize(cfg.dims, data.embeddings(), rng);
  CleaningNetwork cleaner = CleaningNetwork::initialize(cfg.dims, rng);
  Adam optimizer(cleaner.trainable(), cfg.adam);
  const auto base_before = params.snapshot();
  const auto combiner_before = testing::values_of(cleaner.combiner_weight);
  const double loss = train_cleaner_epoch(params, cleaner, data.clean(), optimizer, 16, rng);
  CHECK(std::isfinite(loss));
  CHECK(testing::values_of(cleaner.combiner_weight) != combiner_before);
  const auto now = params.trainable();
  const auto then = base_before.trainable();
  for (std::size_t i = 0; i < now.size(); ++i) CHECK(testing::values_of(now[i]) == testing::values_of(then[i]));

  const auto cleaned = clean_noisy_labels(params, cleaner, data.noisy().subspan(0, 50));
  REQUIRE(cleaned.size() == 50);
  for (const auto& e : cleaned) CHECK(*e.noisy_label < 5);
}

TEST_CASE("variants only read the data they are allowed to") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  TrainingConfig cfg = small_config(2);

  data.reset_access();
  train_variant(VariantSpec::of(Variant::base_model), data, cfg, 1);
  CHECK(data.access().noisy_reads == 0);
  CHECK(data.access().clean_reads > 0);

  data.reset_access();
  train_variant(VariantSpec::of(Variant::noise_adaptation_model), data, cfg, 1);
  CHECK(data.access().clean_reads == 0);
  CHECK(data.access().noisy_reads > 0);

  data.reset_access();
  train_variant(VariantSpec::of(Variant::noise_model), data, cfg, 1);
  CHECK(data.access().clean_reads > 0);
  CHECK(data.access().noisy_reads > 0);
}

TEST_CASE("every variant trains and selects its best dev epoch") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  const TrainingConfig cfg = small_config(4);
  for (auto name : variant_names()) {
    CAPTURE(name);
    const auto spec = VariantSpec::from_name(name);
    const auto outcome = train_variant(spec, data, cfg, 11);
    const auto& r = outcome.result;
    REQUIRE(r.epochs.size() == 4);
    double best = -1;
    std::size_t best_epoch = 0;
    for (const auto& e : r.epochs) {
      CHECK(std::isfinite(e.loss));
      CHECK(e.examples > 0);
      if (e.dev_f1 > best) {
        best = e.dev_f1;
        best_epoch = e.epoch;
      }
    }
    CHECK(r.selected_epoch == best_epoch);
    CHECK(r.dev_f1 == best);
    CHECK(r.test_f1 == r.test_report.overall.f1);
    CHECK(evaluate(outcome.model.params, data.test(), data.labels()).overall.f1 == r.test_f1);
    if (spec.has_noise_layer()) {
      REQUIRE(r.theta.size() == 25);
      CHECK(rows_stochastic(r.theta, 5, 1e-12));
      CHECK(outcome.model.noise.has_value());
    } else {
      CHECK(r.theta.empty());
    }
    CHECK(outcome.model.cleaner.has_value() == (spec.data_usage == DataUsage::cleaning));
  }
}

TEST_CASE("the base model learns a separable task") {
  const SplitDataset data = make_split(shared_pool(), 1200, 1);
  TrainingConfig cfg = small_config(5);
  cfg.dims.pooling = Pooling::center;
  const auto center = train_variant(VariantSpec::of(Variant::base_model), data, cfg, 3);
  CHECK(center.result.dev_f1 > 0.95);
  // Final-state pooling must carry the target across the context, so it
  // learns more slowly.
  cfg.dims.pooling = Pooling::final_states;
  cfg.epochs = 8;
  const auto final = train_variant(VariantSpec::of(Variant::base_model), data, cfg, 3);
  CHECK(final.result.dev_f1 > final.result.epochs.front().dev_f1);
}

TEST_CASE("training is deterministic and independent of threading") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  TrainingConfig cfg = small_config(3);
  const auto spec = VariantSpec::of(Variant::noise_model);
  const auto a = train_variant(spec, data, cfg, 4).result;
  const auto b = train_variant(spec, data, cfg, 4).result;
  CHECK(a.test_f1 == b.test_f1);
  CHECK(a.theta == b.theta);
  for (std::size_t e = 0; e < a.epochs.size(); ++e) CHECK(a.epochs[e].loss == b.epochs[e].loss);

  const auto serial = run_trials(spec, data, cfg, 3);
  cfg.threads = 3;
  const auto parallel = run_trials(spec, data, cfg, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial.trials[i].seed == trial_seed(cfg.seed, i));
    CHECK(serial.trials[i].test_f1 == parallel.trials[i].test_f1);
    CHECK(serial.trials[i].theta == parallel.trials[i].theta);
  }
  CHECK(serial.test_f1.mean == parallel.test_f1.mean);
  CHECK(trial_seed(5, 0) != trial_seed(5, 1));
  CHECK_THROWS(run_trials(spec, data, cfg, 0));
}

TEST_CASE("epoch observer sees every epoch in order") {
  const SplitDataset data = make_split(shared_pool(), 300, 1);
  std::vector<std::size_t> seen;
  train_variant(VariantSpec::of(Variant::base_model), data, small_config(3), 1,
                [&](const TrialResult&, const EpochRecord& e) { seen.push_back(e.epoch); });
  CHECK(seen == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("sweeps") {
  const ExperimentPool& pool = shared_pool();
  const TrainingConfig cfg = small_config(2);
  const std::vector<double> factors = {0.5, 1.0};
  const auto rows = sweep(SweepAxis::noisy_factor, factors,
                          VariantSpec::of(Variant::base_model_with_noise), pool, cfg, 200, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].clean_size == rows[1].clean_size);
  CHECK(rows[1].noisy_sample_size == rows[1].clean_size);
  CHECK(rows[0].n_seeds == 2);
  const std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("axis_value,variant,mean_f1,se,n_seeds\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  const std::vector<double> sizes = {100, 250};
  const auto by_size = sweep(SweepAxis::clean_size, sizes,
                             VariantSpec::of(Variant::base_model), pool, cfg, 0, 2);
  CHECK(by_size[0].clean_size < by_size[1].clean_size);

  const std::vector<double> too_many = {1000.0};
  CHECK_THROWS(sweep(SweepAxis::noisy_factor, too_many, VariantSpec::of(Variant::noise_model),
                     pool, cfg, 200, 1));
  CHECK(parse_sweep_axis("noisy-factor") == SweepAxis::noisy_factor);
  CHECK(sweep_axis_name(SweepAxis::clean_size) == "clean-size");
  CHECK_THROWS(parse_sweep_axis("epochs"));
}

TEST_SUITE_END();
