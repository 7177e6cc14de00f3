#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "noiselab/annotation.hpp"
#include "noiselab/model.hpp"
#include "noiselab/ops.hpp"
#include "test_util.hpp"

using namespace noiselab;

namespace {

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<std::string> names_of(const std::vector<Label>& labels, const LabelSet& set) {
  std::vector<std::string> out;
  for (Label l : labels) out.push_back(set.name(l));
  return out;
}

Gazetteer sample_gazetteer() {
  const LabelSet labels = LabelSet::conll();
  Gazetteer g = Gazetteer::parse(
      "# comment\n"
      "France\tLOC\n"
      "Friday\tPER\n"
      "New York\tLOC\n"
      "New\tORG\n"
      "Jordan\tLOC\n"
      "Jordan\tPER\n"
      "Jordan\tORG\n"
      "Olympics\tMISC\n"
      "Acme Corp\tORG\n",
      labels);
  for (const auto& w : Gazetteer::default_blocklist()) g.block(w);
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("annotation");

TEST_CASE("gazetteer lookups follow the documented heuristics") {
  const LabelSet labels = LabelSet::conll();
  const Gazetteer g = sample_gazetteer();
  auto tag = [&](const std::string& s) { return names_of(g.annotate(words(s)), labels); };

  CHECK(tag("France won") == std::vector<std::string>{"LOC", "O"});
  CHECK(tag("unknown token") == std::vector<std::string>{"O", "O"});
  CHECK(tag("on Friday") == std::vector<std::string>{"O", "O"});
  // Longest match beats the shorter ORG entry on "New".
  CHECK(tag("in New York") == std::vector<std::string>{"O", "LOC", "LOC"});
  CHECK(tag("New deal") == std::vector<std::string>{"ORG", "O"});
  // Conflicts resolve PER > LOC > ORG.
  CHECK(tag("Jordan") == std::vector<std::string>{"PER"});
  // MISC is never emitted.
  CHECK(tag("the Olympics") == std::vector<std::string>{"O", "O"});
  // Case-sensitive exact matching.
  CHECK(tag("france") == std::vector<std::string>{"O"});
  CHECK(tag("Acme Corp and Acme") == std::vector<std::string>{"ORG", "ORG", "O", "O"});

  const auto sentences = std::vector<std::vector<std::string>>{words("France and New York")};
  CHECK(annotate(sentences, g) == annotate(sentences, g));
}

TEST_CASE("gazetteer parsing errors name the line") {
  const LabelSet labels = LabelSet::conll();
  try {
    Gazetteer::parse("France\tLOC\nParis\tCITY\n", labels);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS(Gazetteer::parse("no tab here\n", labels));
}

TEST_CASE("blocklist file extends the defaults") {
  const LabelSet labels = LabelSet::conll();
  Gazetteer g = sample_gazetteer();
  g.load_blocklist("France\n");
  CHECK(g.annotate(words("France"))[0] == labels.outside());
}

TEST_CASE("identity channels leave labels unchanged") {
  Rng rng(1);
  std::uniform_int_distribution<Label> d(0, 4);
  std::vector<Label> labels(500);
  for (auto& l : labels) l = d(rng);
  CHECK(apply_channel(labels, NoiseChannelSpec::uniform(0.0, 3), 5) == labels);
  CHECK(apply_channel(labels, NoiseChannelSpec::permuted({0, 1, 2, 3, 4}, 3), 5) == labels);
  const auto swapped = apply_channel(labels, NoiseChannelSpec::permuted({1, 0, 2, 3, 4}), 5);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label expected = labels[i] == 0 ? 1 : labels[i] == 1 ? 0 : labels[i];
    CHECK(swapped[i] == expected);
  }
}

TEST_CASE("uniform channel flips to other classes at the requested rate") {
  const std::size_t n = 10000;
  const std::vector<Label> labels(n, 2);
  const auto noisy = apply_channel(labels, NoiseChannelSpec::uniform(0.3, 11), 5);
  std::vector<std::size_t> counts(5, 0);
  for (Label l : noisy) ++counts[l];
  CHECK(std::abs(1.0 - counts[2] / double(n) - 0.3) < 0.02);
  for (Label j : {0, 1, 3, 4}) CHECK(std::abs(counts[j] / double(n) - 0.075) < 0.02);
}

TEST_CASE("gazetteer-like channel keeps about 26% of PER tokens") {
  const LabelSet labels = LabelSet::conll();
  const auto spec = NoiseChannelSpec::empirical(gazetteer_like_channel(labels), 5);
  const std::vector<Label> per(10000, labels.index("PER"));
  const auto noisy = apply_channel(per, spec, labels.size());
  std::size_t kept = 0;
  for (Label l : noisy) kept += l == labels.index("PER");
  CHECK(std::abs(kept / 10000.0 - 0.26) < 0.02);
  CHECK(apply_channel(per, spec, labels.size()) == noisy);
}

TEST_CASE("malformed channels are rejected") {
  CHECK_THROWS(NoiseChannelSpec::uniform(1.5).validate(5));
  CHECK_THROWS(NoiseChannelSpec::permuted({0, 0, 1}).validate(3));
  CHECK_THROWS(NoiseChannelSpec::permuted({0, 1}).validate(3));
  CHECK_THROWS(NoiseChannelSpec::empirical({0.5, 0.4, 0.0, 1.0}).validate(2));
  CHECK_THROWS(NoiseChannelSpec::empirical({1.0, 0.0}).validate(2));
  CHECK_NOTHROW(NoiseChannelSpec::empirical({0.5, 0.5, 0.0, 1.0}).validate(2));
}

TEST_CASE("confusion counts") {
  const std::vector<Label> y = {0, 0, 1}, z = {0, 1, 1};
  const auto c = estimate_confusion(y, z, 2);
  CHECK(c.at(0, 0) == 1);
  CHECK(c.at(0, 1) == 1);
  CHECK(c.at(1, 0) == 0);
  CHECK(c.at(1, 1) == 1);
  CHECK(c.row_total(0) == 2);

  const auto diag = estimate_confusion(y, y, 2);
  CHECK(diag.at(0, 1) + diag.at(1, 0) == 0);
  CHECK(estimate_confusion({}, {}, 3).total() == 0);
  CHECK_THROWS(estimate_confusion(y, std::vector<Label>{0, 1}, 2));
  CHECK_THROWS(estimate_confusion(y, std::vector<Label>{0, 1, 2}, 2));
}

TEST_CASE("noise weight init reproduces the smoothed confusion rows") {
  ConfusionCounts c(2);
  c.add(0, 0, 10);
  const Tensor b = init_noise_weights(c, 1.0);
  CHECK(b.at(0, 0) == doctest::Approx(std::log(11.0 / 12.0)));
  CHECK(b.at(0, 1) == doctest::Approx(std::log(1.0 / 12.0)));
  const Tensor theta = theta_from_b(b);
  CHECK(std::abs(theta.at(0, 0) - 11.0 / 12.0) < 1e-12);
  CHECK(std::abs(theta.at(1, 0) - 0.5) < 1e-12);

  ConfusionCounts empty(5);
  const Tensor uniform = theta_from_b(init_noise_weights(empty, 1.0));
  for (Scalar v : uniform.values()) CHECK(std::abs(v - 0.2) < 1e-12);

  // Noiseless counts give a near-identity channel.
  ConfusionCounts clean(3);
  for (Label i = 0; i < 3; ++i) clean.add(i, i, 50 + 10 * i);
  const Tensor near_id = theta_from_b(init_noise_weights(clean, 1.0));
  for (Label i = 0; i < 3; ++i) CHECK(near_id.at(i, i) > 0.9);
  CHECK_THROWS(init_noise_weights(clean, 0.0));
}

TEST_CASE("identity init") {
  const Tensor b5 = identity_init(5);
  CHECK(b5.shape() == Shape{5, 5});
  CHECK(theta_from_b(b5).at(0, 0) == doctest::Approx(0.40461).epsilon(1e-4));
  CHECK(theta_from_b(identity_init(2)).at(1, 1) == doctest::Approx(0.73106).epsilon(1e-4));
  CHECK_THROWS(identity_init(1));
}

TEST_CASE("pretrained-prediction init") {
  ModelDims dims;
  dims.embedding_dim = 4;
  dims.state_size = 3;
  dims.dense_size = 3;
  dims.num_classes = 3;
  Rng rng(3);
  const Tensor emb = testing::random_tensor({12, 4}, rng, -2, 2, false);
  const ModelParameters params = ModelParameters::initialize(dims, emb, rng);
  std::uniform_int_distribution<TokenId> tok(0, 11);
  std::vector<WindowExample> examples(3000);
  for (auto& e : examples) {
    for (auto& t : e.tokens) t = tok(rng);
    e.source = Source::noisy;
  }
  const auto predicted = predict(params, windows_of(examples));

  SUBCASE("agreeing predictions") {
    for (std::size_t i = 0; i < examples.size(); ++i) examples[i].noisy_label = predicted[i];
    const Tensor b = goldberger_init(params, examples);
    const Tensor expected = init_noise_weights(estimate_confusion(predicted, predicted, 3));
    for (std::size_t i = 0; i < 9; ++i) CHECK(b.values()[i] == expected.values()[i]);
    const Tensor theta = theta_from_b(b);
    for (Label i = 0; i < 3; ++i) {
      const auto support = estimate_confusion(predicted, predicted, 3).row_total(i);
      if (support >= 50) CHECK(theta.at(i, i) > 0.9);
    }
  }
  SUBCASE("independent noisy labels") {
    std::uniform_int_distribution<Label> label(0, 2);
    for (auto& e : examples) e.noisy_label = label(rng);
    const Tensor theta = theta_from_b(goldberger_init(params, examples));
    for (Label i = 0; i < 3; ++i) {
      double total = 0;
      for (Label j = 0; j < 3; ++j) {
        CHECK(std::abs(theta.at(i, j) - 1.0 / 3) < 0.06);
        total += theta.at(i, j);
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_SUITE_END();
