#include "noiselab/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "noiselab/random.hpp"

namespace noiselab {
namespace {

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Gazetteer::Gazetteer(LabelSet labels, std::vector<std::string> priority)
    : labels_(std::move(labels)) {
  for (const auto& name : priority) {
    const Label l = labels_.index(name);
    if (l == labels_.outside()) {
      throw std::invalid_argument("gazetteer priority cannot contain O");
    }
    priority_.push_back(l);
  }
}

Gazetteer Gazetteer::parse(std::string_view text, LabelSet labels,
                           std::vector<std::string> priority) {
  Gazetteer g(std::move(labels), std::move(priority));
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw std::invalid_argument("gazetteer line " + std::to_string(line_no) +
                                  ": expected 'surface<TAB>CLASS'");
    }
    const std::string_view surface = trim(std::string_view(line).substr(0, tab));
    const std::string_view cls = trim(std::string_view(line).substr(tab + 1));
    if (surface.empty() || !g.labels_.find(cls)) {
      throw std::invalid_argument("gazetteer line " + std::to_string(line_no) +
                                  ": bad entry '" + line + "'");
    }
    g.add(surface, cls);
  }
  return g;
}

std::vector<std::string> Gazetteer::default_blocklist() {
  return {"Monday",  "Tuesday",  "Wednesday", "Thursday", "Friday",
          "Saturday", "Sunday",  "January",   "February", "March",
          "April",    "May",     "June",      "July",     "August",
          "September", "October", "November", "December"};
}

void Gazetteer::add(std::string_view surface, std::string_view class_name) {
  const auto tokens = split_ws(surface);
  if (tokens.empty()) throw std::invalid_argument("empty gazetteer surface form");
  entries_[join(tokens)].insert(labels_.index(class_name));
  max_length_ = std::max(max_length_, tokens.size());
}

void Gazetteer::block(std::string_view surface) {
  const auto tokens = split_ws(surface);
  if (!tokens.empty()) blocked_.insert(join(tokens));
}

void Gazetteer::load_blocklist(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    block(view);
  }
}

std::optional<Label> Gazetteer::match(std::span<const std::string> tokens) const {
  const std::string key = join(tokens);
  if (blocked_.contains(key)) return std::nullopt;
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  for (Label l : priority_) {
    if (it->second.contains(l)) return l;
  }
  return std::nullopt;
}

std::vector<Label> Gazetteer::annotate(std::span<const std::string> sentence) const {
  std::vector<Label> out(sentence.size(), labels_.outside());
  std::size_t pos = 0;
  while (pos < sentence.size()) {
    std::size_t matched = 0;
    const std::size_t longest = std::min(max_length_, sentence.size() - pos);
    for (std::size_t len = longest; len >= 1; --len) {
      if (auto cls = match(sentence.subspan(pos, len))) {
        std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(pos), len, *cls);
        matched = len;
        break;
      }
    }
    pos += matched ? matched : 1;
  }
  return out;
}

std::vector<std::vector<Label>> annotate(
    std::span<const std::vector<std::string>> sentences, const Gazetteer& gazetteer) {
  std::vector<std::vector<Label>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(gazetteer.annotate(s));
  return out;
}

NoiseChannelSpec NoiseChannelSpec::uniform(double rate, std::uint64_t seed) {
  NoiseChannelSpec s;
  s.kind = ChannelKind::uniform;
  s.flip_rate = rate;
  s.seed = seed;
  return s;
}

NoiseChannelSpec NoiseChannelSpec::permuted(std::vector<Label> mapping,
                                            std::uint64_t seed) {
  NoiseChannelSpec s;
  s.kind = ChannelKind::permutation;
  s.permutation = std::move(mapping);
  s.seed = seed;
  return s;
}

NoiseChannelSpec NoiseChannelSpec::empirical(std::vector<double> matrix,
                                             std::uint64_t seed) {
  NoiseChannelSpec s;
  s.kind = ChannelKind::empirical;
  s.matrix = std::move(matrix);
  s.seed = seed;
  return s;
}

void NoiseChannelSpec::validate(std::size_t k) const {
  switch (kind) {
    case ChannelKind::uniform:
      if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) {
        throw std::invalid_argument("uniform channel: flip rate " +
                                    std::to_string(flip_rate) + " outside [0, 1]");
      }
      break;
    case ChannelKind::permutation: {
      if (permutation.size() != k) {
        throw std::invalid_argument("permutation channel: expected " +
                                    std::to_string(k) + " entries");
      }
      std::vector<Label> sorted = permutation;
      std::sort(sorted.begin(), sorted.end());
      for (Label i = 0; i < k; ++i) {
        if (sorted[i] != i) {
          throw std::invalid_argument("permutation channel: not a permutation");
        }
      }
      break;
    }
    case ChannelKind::empirical:
      if (matrix.size() != k * k) {
        throw std::invalid_argument("empirical channel: expected " +
                                    std::to_string(k * k) + " entries, got " +
                                    std::to_string(matrix.size()));
      }
      for (std::size_t i = 0; i < k; ++i) {
        double total = 0;
        for (std::size_t j = 0; j < k; ++j) {
          const double p = matrix[i * k + j];
          if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("empirical channel: entry (" +
                                        std::to_string(i) + ", " + std::to_string(j) +
                                        ") is not a probability");
          }
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
          throw std::invalid_argument("empirical channel: row " + std::to_string(i) +
                                      " sums to " + std::to_string(total));
        }
      }
      break;
  }
}

std::vector<double> NoiseChannelSpec::transition_matrix(std::size_t k) const {
  validate(k);
  std::vector<double> m(k * k, 0.0);
  switch (kind) {
    case ChannelKind::uniform:
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          m[i * k + j] = i == j ? 1.0 - flip_rate : flip_rate / static_cast<double>(k - 1);
        }
      }
      break;
    case ChannelKind::permutation:
      for (std::size_t i = 0; i < k; ++i) m[i * k + permutation[i]] = 1.0;
      break;
    case ChannelKind::empirical:
      m = matrix;
      break;
  }
  return m;
}

std::vector<double> gazetteer_like_channel(const LabelSet& labels) {
  const std::size_t k = labels.size();
  const Label o = labels.index("O"), per = labels.index("PER"),
              org = labels.index("ORG"), loc = labels.index("LOC"),
              misc = labels.index("MISC");
  std::vector<double> m(k * k, 0.0);
  auto row = [&](Label i, std::initializer_list<std::pair<Label, double>> cells) {
    for (auto [j, p] : cells) m[i * k + j] = p;
  };
  row(o, {{o, 0.97}, {per, 0.01}, {org, 0.005}, {loc, 0.015}});
  row(per, {{o, 0.74}, {per, 0.26}});
  row(org, {{o, 0.85}, {per, 0.02}, {org, 0.10}, {loc, 0.03}});
  row(loc, {{o, 0.33}, {per, 0.01}, {org, 0.01}, {loc, 0.65}});
  row(misc, {{o, 0.95}, {per, 0.01}, {org, 0.01}, {loc, 0.03}});
  // Extra classes of a custom label set pass through unchanged.
  for (Label i = 0; i < k; ++i) {
    if (i != o && i != per && i != org && i != loc && i != misc) m[i * k + i] = 1.0;
  }
  return m;
}

std::vector<Label> apply_channel(std::span<const Label> labels,
                                 const NoiseChannelSpec& spec, std::size_t k) {
  spec.validate(k);
  Rng rng = substream(spec.seed, "channel");
  std::vector<Label> out(labels.begin(), labels.end());
  for (Label l : labels) {
    if (l >= k) throw std::out_of_range("apply_channel: label outside class range");
  }
  switch (spec.kind) {
    case ChannelKind::uniform: {
      std::bernoulli_distribution flip(spec.flip_rate);
      std::uniform_int_distribution<std::size_t> other(0, k - 2);
      for (Label& l : out) {
        if (flip(rng)) {
          const std::size_t pick = other(rng);
          l = pick >= l ? pick + 1 : pick;
        }
      }
      break;
    }
    case ChannelKind::permutation:
      for (Label& l : out) l = spec.permutation[l];
      break;
    case ChannelKind::empirical: {
      std::vector<std::discrete_distribution<std::size_t>> rows;
      for (std::size_t i = 0; i < k; ++i) {
        rows.emplace_back(spec.matrix.begin() + static_cast<std::ptrdiff_t>(i * k),
                          spec.matrix.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
      }
      for (Label& l : out) l = rows[l](rng);
      break;
    }
  }
  return out;
}

std::size_t ConfusionCounts::row_total(Label i) const {
  return std::accumulate(counts_.begin() + static_cast<std::ptrdiff_t>(i * k_),
                         counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_),
                         std::size_t{0});
}

std::size_t ConfusionCounts::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

ConfusionCounts estimate_confusion(std::span<const Label> clean,
                                   std::span<const Label> noisy, std::size_t k) {
  if (clean.size() != noisy.size()) {
    throw std::invalid_argument("estimate_confusion: " + std::to_string(clean.size()) +
                                " clean vs " + std::to_string(noisy.size()) +
                                " noisy labels");
  }
  ConfusionCounts counts(k);
  for (std::size_t t = 0; t < clean.size(); ++t) {
    if (clean[t] >= k || noisy[t] >= k) {
      throw std::out_of_range("estimate_confusion: label at position " +
                              std::to_string(t) + " outside [0, " +
                              std::to_string(k) + ")");
    }
    counts.add(clean[t], noisy[t]);
  }
  return counts;
}

Tensor init_noise_weights(const ConfusionCounts& counts, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be > 0");
  const std::size_t k = counts.classes();
  std::vector<Scalar> b(k * k);
  for (Label i = 0; i < k; ++i) {
    const double denom = static_cast<double>(counts.row_total(i)) +
                         static_cast<double>(k) * alpha;
    for (Label j = 0; j < k; ++j) {
      b[i * k + j] = static_cast<Scalar>(
          std::log((static_cast<double>(counts.at(i, j)) + alpha) / denom));
    }
  }
  return Tensor::from({k, k}, std::move(b));
}

Tensor identity_init(std::size_t k) {
  if (k < 2) throw std::invalid_argument("identity_init needs k >= 2");
  Tensor b = Tensor::zeros({k, k});
  for (std::size_t i = 0; i < k; ++i) b.at(i, i) = Scalar{1};
  return b;
}

Tensor goldberger_init(const ModelParameters& pretrained,
                       std::span<const WindowExample> noisy, double alpha) {
  const auto windows = windows_of(noisy);
  const auto predicted = predict(pretrained, windows);
  std::vector<Label> observed;
  observed.reserve(noisy.size());
  for (const auto& e : noisy) {
    if (!e.noisy_label) throw std::invalid_argument("goldberger_init: missing noisy label");
    observed.push_back(*e.noisy_label);
  }
  return init_noise_weights(
      estimate_confusion(predicted, observed, pretrained.dims.num_classes), alpha);
}

}  // namespace noiselab
