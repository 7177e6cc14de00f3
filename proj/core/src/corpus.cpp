#include "noiselab/corpus.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "noiselab/random.hpp"
#include "noiselab/training.hpp"

namespace noiselab {
namespace {

std::vector<std::string_view> split_columns(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view strip_prefix(std::string_view tag) {
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
    return tag.substr(2);
  }
  return tag;
}

}  // namespace

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

bool Corpus::labeled() const {
  for (const auto& s : sentences) {
    if (s.labels.size() != s.tokens.size()) return false;
  }
  return true;
}

std::vector<std::vector<std::string>> Corpus::token_lists() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.tokens);
  return out;
}

LabelSequences Corpus::label_sequences() const {
  LabelSequences out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.labels);
  return out;
}

Corpus parse_conll(std::string_view text, const LabelSet& labels) {
  Corpus corpus;
  Sentence current;
  bool current_labeled = false;
  auto flush = [&] {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = {};
  };
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto cols = split_columns(line);
    if (cols.empty()) {
      flush();
      if (end == text.size()) break;
      continue;
    }
    if (cols[0] == "-DOCSTART-") {
      flush();
      corpus.document_starts.push_back(corpus.sentences.size());
      continue;
    }
    const bool labeled_line = cols.size() >= 2;
    if (current.tokens.empty()) {
      current_labeled = labeled_line;
    } else if (labeled_line != current_labeled) {
      throw std::invalid_argument("conll line " + std::to_string(line_no) +
                                  ": mixes labelled and unlabelled tokens");
    }
    current.tokens.emplace_back(cols[0]);
    if (labeled_line) {
      const std::string_view tag = strip_prefix(cols.back());
      const auto label = labels.find(tag);
      if (!label) {
        throw std::invalid_argument("conll line " + std::to_string(line_no) +
                                    ": tag '" + std::string(cols.back()) +
                                    "' is not in the label set");
      }
      current.labels.push_back(*label);
    }
    if (end == text.size()) break;
  }
  flush();
  return corpus;
}

std::string write_conll(const Corpus& corpus, const LabelSet& labels) {
  std::string out;
  std::size_t next_doc = 0;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    while (next_doc < corpus.document_starts.size() &&
           corpus.document_starts[next_doc] == s) {
      out += "-DOCSTART- -X- -X- O\n\n";
      ++next_doc;
    }
    const Sentence& sentence = corpus.sentences[s];
    const bool labeled = sentence.labels.size() == sentence.tokens.size();
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      out += sentence.tokens[t];
      if (labeled) {
        out += ' ';
        out += labels.name(sentence.labels[t]);
      }
      out += '\n';
    }
    out += '\n';
  }
  for (; next_doc < corpus.document_starts.size(); ++next_doc) {
    out += "-DOCSTART- -X- -X- O\n\n";
  }
  return out;
}

Corpus relabel(const Corpus& corpus, const LabelSequences& labels) {
  if (labels.size() != corpus.sentences.size()) {
    throw std::invalid_argument("relabel: label sequences misaligned with corpus");
  }
  Corpus out = corpus;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s].size() != out.sentences[s].tokens.size()) {
      throw std::invalid_argument("relabel: sentence " + std::to_string(s) +
                                  " length mismatch");
    }
    out.sentences[s].labels = labels[s];
  }
  return out;
}

Embeddings parse_embeddings(std::string_view text,
                            std::optional<std::size_t> expected_dim) {
  std::vector<std::string> words;
  std::vector<Scalar> values;
  std::optional<std::size_t> dim = expected_dim;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cols = split_columns(line);
    if (cols.empty()) continue;
    const std::size_t n = cols.size() - 1;
    if (!dim) dim = n;
    if (n != *dim || n == 0) {
      throw std::invalid_argument("embeddings line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(*dim) +
                                  " values, got " + std::to_string(n));
    }
    words.emplace_back(cols[0]);
    for (std::size_t c = 1; c < cols.size(); ++c) {
      double v = 0;
      const char* first = cols[c].data();
      const char* last = first + cols[c].size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("embeddings line " + std::to_string(line_no) +
                                    ": non-numeric field '" + std::string(cols[c]) + "'");
      }
      values.push_back(static_cast<Scalar>(v));
    }
  }
  if (!dim || *dim == 0) throw std::invalid_argument("embeddings: empty file");
  const std::size_t d = *dim;
  values.resize(values.size() + 2 * d, Scalar{0});  // PAD, UNK
  Embeddings e;
  e.vocabulary = Vocabulary(std::move(words));
  e.table = Tensor::from({e.vocabulary.size(), d}, std::move(values));
  return e;
}

Embeddings load_embeddings(const std::filesystem::path& path,
                           std::optional<std::size_t> expected_dim) {
  return parse_embeddings(read_file(path), expected_dim);
}

std::string write_embeddings(const Embeddings& embeddings) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  const std::size_t d = embeddings.dim();
  for (std::size_t w = 0; w < embeddings.vocabulary.word_count(); ++w) {
    out << embeddings.vocabulary.word(w);
    for (std::size_t c = 0; c < d; ++c) out << ' ' << embeddings.table.at(w, c);
    out << '\n';
  }
  return out.str();
}

Embeddings random_embeddings(std::vector<std::string> words, std::size_t dim,
                             std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  Rng rng = substream(seed, "embeddings");
  std::normal_distribution<double> normal(0.0, 1.0);
  Embeddings e;
  e.vocabulary = Vocabulary(std::move(words));
  std::vector<Scalar> values(e.vocabulary.size() * dim, Scalar{0});
  for (std::size_t i = 0; i < e.vocabulary.word_count() * dim; ++i) {
    values[i] = static_cast<Scalar>(normal(rng));
  }
  e.table = Tensor::from({e.vocabulary.size(), dim}, std::move(values));
  return e;
}

CleanSplit sample_clean_subset(const Corpus& corpus, std::size_t word_budget,
                               std::uint64_t seed) {
  if (word_budget == 0) throw std::invalid_argument("word budget must be positive");
  std::vector<std::size_t> lengths;
  for (const auto& s : corpus.sentences) lengths.push_back(s.tokens.size());
  Rng rng = substream(seed, "clean-split");
  const auto picked = sample_to_budget(lengths, word_budget, rng);
  std::vector<bool> in_clean(corpus.sentences.size(), false);
  for (std::size_t i : picked) in_clean[i] = true;
  CleanSplit split;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    (in_clean[i] ? split.clean : split.remainder).sentences.push_back(corpus.sentences[i]);
  }
  return split;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace noiselab
