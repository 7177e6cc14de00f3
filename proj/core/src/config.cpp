#include "noiselab/config.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <variant>

namespace noiselab {
namespace {

using Strings = std::vector<std::string>;
// std::size_t and std::uint64_t coincide on most platforms.
using FieldRef = std::conditional_t<
    std::is_same_v<std::size_t, std::uint64_t>,
    std::variant<std::string*, std::size_t*, double*, bool*, Strings*>,
    std::variant<std::string*, std::size_t*, std::uint64_t*, double*, bool*, Strings*>>;

struct Field {
  std::string_view key;
  FieldRef ref;
};

// Declaration order is the serialisation order.
std::vector<Field> fields(ExperimentConfig& c) {
  return {
      {"variant", &c.variant},
      {"seed", &c.seed},
      {"n_seeds", &c.n_seeds},
      {"threads", &c.threads},
      {"embedding_dim", &c.embedding_dim},
      {"embedding_path", &c.embedding_path},
      {"trainable_embeddings", &c.trainable_embeddings},
      {"state_size", &c.state_size},
      {"dense_size", &c.dense_size},
      {"cleaner_projection", &c.cleaner_projection},
      {"pooling", &c.pooling},
      {"epochs", &c.epochs},
      {"batch_size", &c.batch_size},
      {"learning_rate", &c.learning_rate},
      {"beta1", &c.beta1},
      {"beta2", &c.beta2},
      {"epsilon", &c.epsilon},
      {"smoothing_alpha", &c.smoothing_alpha},
      {"noisy_factor", &c.noisy_factor},
      {"pretrain_epochs", &c.pretrain_epochs},
      {"labels", &c.labels},
      {"train_path", &c.train_path},
      {"dev_path", &c.dev_path},
      {"test_path", &c.test_path},
      {"clean_budget", &c.clean_budget},
      {"noisy_includes_clean", &c.noisy_includes_clean},
      {"toy_train_tokens", &c.toy_train_tokens},
      {"toy_dev_tokens", &c.toy_dev_tokens},
      {"toy_test_tokens", &c.toy_test_tokens},
      {"toy_seed", &c.toy_seed},
      {"noise_source", &c.noise_source},
      {"noisy_path", &c.noisy_path},
      {"gazetteer_path", &c.gazetteer_path},
      {"blocklist_path", &c.blocklist_path},
      {"channel", &c.channel},
      {"channel_rate", &c.channel_rate},
      {"channel_permutation", &c.channel_permutation},
      {"channel_matrix", &c.channel_matrix},
      {"channel_seed", &c.channel_seed},
  };
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + std::string(key) +
                                "': expected a non-negative integer, got '" +
                                std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + std::string(key) +
                                "': expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::string> split_list(std::string_view v, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t end = v.find(sep, start);
    if (end == std::string_view::npos) end = v.size();
    const auto item = trim(v.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view v) {
  std::vector<std::string> out;
  std::istringstream in{std::string(v)};
  std::string tok;
  while (in >> tok) {
    // Commas are accepted as separators too.
    for (auto& part : split_list(tok, ',')) out.push_back(part);
  }
  return out;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key(trim(view.substr(0, eq)));
    if (!out.emplace(key, std::string(trim(view.substr(eq + 1)))).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    }
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::desk_scale() {
  ExperimentConfig c;
  c.embedding_dim = 16;
  c.state_size = 16;
  c.dense_size = 16;
  c.learning_rate = 0.005;
  return c;
}

std::string ExperimentConfig::to_text() const {
  ExperimentConfig copy = *this;
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& f : fields(copy)) {
    out << f.key << " = ";
    std::visit(
        [&out](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>) {
            out << (*p ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            for (std::size_t i = 0; i < p->size(); ++i) out << (i ? "," : "") << (*p)[i];
          } else {
            out << *p;
          }
        },
        f.ref);
    out << '\n';
  }
  return out.str();
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
  ExperimentConfig config;
  auto values = parse_key_values(text);
  auto table = fields(config);
  for (const auto& [key, value] : values) {
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const Field& f) { return f.key == key; });
    if (it == table.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, std::string>) {
            *p = value;
          } else if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") {
              *p = true;
            } else if (value == "false" || value == "0") {
              *p = false;
            } else {
              throw std::invalid_argument("config key '" + key +
                                          "': expected true or false");
            }
          } else if constexpr (std::is_same_v<T, double>) {
            *p = parse_double(key, value);
          } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            *p = split_list(value, ',');
          } else {
            *p = parse_int<T>(key, value);
          }
        },
        it->ref);
  }
  // Validate the enumerations eagerly so a bad file fails before any work.
  VariantSpec::from_name(config.variant);
  (void)config.label_set();
  (void)config.noise_source_kind();
  (void)config.training();
  return config;
}

LabelSet ExperimentConfig::label_set() const { return LabelSet(labels); }

NoiseSource ExperimentConfig::noise_source_kind() const {
  if (noise_source == "channel") return NoiseSource::channel;
  if (noise_source == "gazetteer") return NoiseSource::gazetteer;
  if (noise_source == "file") return NoiseSource::file;
  throw std::invalid_argument("noise_source must be channel, gazetteer or file, got '" +
                              noise_source + "'");
}

TrainingConfig ExperimentConfig::training() const {
  TrainingConfig t;
  t.dims.embedding_dim = embedding_dim;
  t.dims.state_size = state_size;
  t.dims.dense_size = dense_size;
  t.dims.cleaner_projection = cleaner_projection;
  t.dims.num_classes = labels.size();
  t.dims.trainable_embeddings = trainable_embeddings;
  if (pooling == "final") {
    t.dims.pooling = Pooling::final_states;
  } else if (pooling == "center") {
    t.dims.pooling = Pooling::center;
  } else {
    throw std::invalid_argument("pooling must be final or center, got '" + pooling + "'");
  }
  t.adam.learning_rate = static_cast<Scalar>(learning_rate);
  t.adam.beta1 = static_cast<Scalar>(beta1);
  t.adam.beta2 = static_cast<Scalar>(beta2);
  t.adam.epsilon = static_cast<Scalar>(epsilon);
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.smoothing_alpha = smoothing_alpha;
  t.noisy_factor = noisy_factor;
  t.pretrain_epochs = pretrain_epochs;
  t.seed = seed;
  t.threads = threads;
  if (epochs == 0 || batch_size == 0 || state_size == 0 || dense_size == 0) {
    throw std::invalid_argument("epochs, batch_size, state_size and dense_size must be > 0");
  }
  if (!(smoothing_alpha > 0.0)) throw std::invalid_argument("smoothing_alpha must be > 0");
  return t;
}

NoiseChannelSpec ExperimentConfig::channel_spec() const {
  return make_channel_spec(channel, channel_rate, channel_permutation, channel_matrix,
                           channel_seed, label_set());
}

NoiseChannelSpec make_channel_spec(std::string_view kind, double rate,
                                   std::string_view permutation, std::string_view matrix,
                                   std::uint64_t seed, const LabelSet& labels) {
  const std::size_t k = labels.size();
  NoiseChannelSpec spec;
  if (kind == "gazetteer-like") {
    spec = NoiseChannelSpec::empirical(gazetteer_like_channel(labels), seed);
  } else if (kind == "uniform") {
    spec = NoiseChannelSpec::uniform(rate, seed);
  } else if (kind == "permutation") {
    std::vector<Label> mapping;
    for (const auto& item : split_ws(permutation)) {
      if (auto l = labels.find(item)) {
        mapping.push_back(*l);
      } else {
        mapping.push_back(parse_int<std::size_t>("channel_permutation", item));
      }
    }
    spec = NoiseChannelSpec::permuted(std::move(mapping), seed);
  } else if (kind == "empirical") {
    std::vector<double> m;
    const auto rows = split_list(matrix, ';');
    if (rows.size() != k) {
      throw std::invalid_argument("channel_matrix: expected " + std::to_string(k) +
                                  " rows separated by ';'");
    }
    for (const auto& row : rows) {
      for (const auto& cell : split_ws(row)) m.push_back(parse_double("channel_matrix", cell));
    }
    spec = NoiseChannelSpec::empirical(std::move(m), seed);
  } else {
    throw std::invalid_argument("channel must be gazetteer-like, uniform, permutation or "
                                "empirical, got '" + std::string(kind) + "'");
  }
  spec.validate(k);
  return spec;
}

NoiseChannelSpec parse_channel_spec(std::string_view text, const LabelSet& labels) {
  static const std::set<std::string> known = {"channel", "channel_rate",
                                              "channel_permutation", "channel_matrix",
                                              "channel_seed"};
  auto values = parse_key_values(text);
  for (const auto& [key, value] : values) {
    if (!known.contains(key)) {
      throw std::invalid_argument("unknown channel key '" + key + "'");
    }
  }
  auto get = [&](const std::string& key, std::string fallback) {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  };
  const std::string kind = get("channel", "");
  if (kind.empty()) throw std::invalid_argument("channel block needs a 'channel' key");
  return make_channel_spec(kind, parse_double("channel_rate", get("channel_rate", "0")),
                           get("channel_permutation", ""), get("channel_matrix", ""),
                           parse_int<std::uint64_t>("channel_seed", get("channel_seed", "0")),
                           labels);
}

}  // namespace noiselab
