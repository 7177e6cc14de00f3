#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "noiselab/annotation.hpp"
#include "noiselab/evaluation.hpp"
#include "noiselab/loss.hpp"
#include "noiselab/model.hpp"
#include "noiselab/ops.hpp"

using namespace noiselab;

namespace {

struct Setup {
  ModelParameters params;
  std::vector<TokenWindow> windows;
  std::vector<Label> targets;
  NoiseMatrix noise;
};

// Desk-scale dimensions with the state size taken from the benchmark range.
Setup make_setup(std::size_t state, std::size_t batch) {
  ModelDims dims;
  dims.embedding_dim = 16;
  dims.state_size = state;
  dims.dense_size = 16;
  dims.num_classes = 5;
  Rng rng(1);
  std::normal_distribution<double> normal;
  std::vector<Scalar> emb(200 * 16);
  for (auto& v : emb) v = static_cast<Scalar>(normal(rng));
  Setup s;
  s.params = ModelParameters::initialize(dims, Tensor::from({200, 16}, emb), rng);
  std::uniform_int_distribution<TokenId> tok(0, 199);
  std::uniform_int_distribution<Label> lab(0, 4);
  for (std::size_t b = 0; b < batch; ++b) {
    TokenWindow w;
    for (auto& t : w) t = tok(rng);
    s.windows.push_back(w);
    s.targets.push_back(lab(rng));
  }
  s.noise = NoiseMatrix::learnable(identity_init(5));
  return s;
}

void BM_BaseForward(benchmark::State& state) {
  Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 32);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(base_forward(s.params, s.windows));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_BaseForward)->Arg(16)->Arg(64)->Arg(300);

void BM_BaseForwardBackward(benchmark::State& state) {
  Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) {
    cross_entropy(base_forward(s.params, s.windows), s.targets).backward();
    for (Tensor& t : s.params.trainable()) t.zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_BaseForwardBackward)->Arg(16)->Arg(64)->Arg(300);

void BM_NoisyForwardBackward(benchmark::State& state) {
  Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) {
    cross_entropy(noisy_forward(s.params, s.windows, s.noise), s.targets).backward();
    for (Tensor& t : s.params.trainable()) t.zero_grad();
    s.noise.weights().zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_NoisyForwardBackward)->Arg(16)->Arg(64);

void BM_EntityPrf(benchmark::State& state) {
  const LabelSet labels = LabelSet::conll();
  Rng rng(2);
  std::uniform_int_distribution<Label> lab(0, 4);
  LabelSequences gold(1000, std::vector<Label>(15)), pred = gold;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t t = 0; t < 15; ++t) {
      gold[s][t] = lab(rng) < 3 ? 0 : lab(rng);
      pred[s][t] = lab(rng) < 4 ? gold[s][t] : lab(rng);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(entity_prf(gold, pred, labels));
  state.SetItemsProcessed(state.iterations() * 15000);
}
BENCHMARK(BM_EntityPrf);

}  // namespace

BENCHMARK_MAIN();
