#include "noiselab/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace noiselab {

std::vector<EntitySpan> extract_spans(std::span<const Label> labels, Label outside) {
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == outside) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < labels.size() && labels[j + 1] == labels[i]) ++j;
    spans.push_back({i, j, labels[i]});
    i = j + 1;
  }
  return spans;
}

std::vector<Label> spans_to_labels(std::span<const EntitySpan> spans, std::size_t length,
                                   Label outside) {
  std::vector<Label> out(length, outside);
  for (const auto& s : spans) {
    if (s.end >= length || s.start > s.end) {
      throw std::out_of_range("span outside sequence");
    }
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(s.start),
              out.begin() + static_cast<std::ptrdiff_t>(s.end + 1), s.label);
  }
  return out;
}

const ClassScore& PrfReport::find(const std::string& name) const {
  if (name == "overall") return overall;
  for (const auto& c : classes) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no score row for class '" + name + "'");
}

void finalize_scores(ClassScore& s) {
  const double tp = static_cast<double>(s.true_positives);
  const double predicted = tp + static_cast<double>(s.false_positives);
  const double gold = tp + static_cast<double>(s.false_negatives);
  s.precision = predicted > 0 ? tp / predicted : 0.0;
  s.recall = gold > 0 ? tp / gold : 0.0;
  s.f1 = s.precision + s.recall > 0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
}

PrfReport entity_prf(const LabelSequences& gold, const LabelSequences& predicted,
                     const LabelSet& labels) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument("entity_prf: " + std::to_string(gold.size()) +
                                " gold vs " + std::to_string(predicted.size()) +
                                " predicted sequences");
  }
  const Label outside = labels.outside();
  std::vector<ClassScore> per_class(labels.size());
  for (Label l = 0; l < labels.size(); ++l) per_class[l].name = labels.name(l);

  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size()) {
      throw std::invalid_argument("entity_prf: sequence " + std::to_string(s) +
                                  " has length " + std::to_string(gold[s].size()) +
                                  " in gold and " + std::to_string(predicted[s].size()) +
                                  " in prediction");
    }
    for (Label l : gold[s]) {
      if (l >= labels.size()) throw std::out_of_range("entity_prf: gold label out of range");
    }
    for (Label l : predicted[s]) {
      if (l >= labels.size()) {
        throw std::out_of_range("entity_prf: predicted label out of range");
      }
    }
    const auto gold_spans = extract_spans(gold[s], outside);
    const auto pred_spans = extract_spans(predicted[s], outside);
    // Both lists come out sorted by start, so a merge finds exact matches.
    std::size_t gi = 0, pi = 0;
    std::vector<bool> gold_hit(gold_spans.size(), false);
    while (gi < gold_spans.size() && pi < pred_spans.size()) {
      if (gold_spans[gi] == pred_spans[pi]) {
        ++per_class[pred_spans[pi].label].true_positives;
        gold_hit[gi] = true;
        ++gi;
        ++pi;
      } else if (gold_spans[gi] < pred_spans[pi]) {
        ++gi;
      } else {
        ++per_class[pred_spans[pi].label].false_positives;
        ++pi;
      }
    }
    for (; pi < pred_spans.size(); ++pi) {
      ++per_class[pred_spans[pi].label].false_positives;
    }
    for (std::size_t g = 0; g < gold_spans.size(); ++g) {
      if (!gold_hit[g]) ++per_class[gold_spans[g].label].false_negatives;
    }
  }

  PrfReport report;
  report.overall.name = "overall";
  for (Label l = 0; l < labels.size(); ++l) {
    if (l == outside) continue;
    ClassScore& c = per_class[l];
    finalize_scores(c);
    report.overall.true_positives += c.true_positives;
    report.overall.false_positives += c.false_positives;
    report.overall.false_negatives += c.false_negatives;
    report.classes.push_back(c);
  }
  finalize_scores(report.overall);
  return report;
}

ConfusionCounts token_confusion(std::span<const Label> gold,
                                std::span<const Label> predicted, std::size_t k) {
  return estimate_confusion(gold, predicted, k);
}

PrfReport annotation_quality(const LabelSequences& gold, const LabelSequences& automatic,
                             const LabelSet& labels) {
  if (gold.size() != automatic.size()) {
    throw std::invalid_argument("annotation_quality: corpora are misaligned (" +
                                std::to_string(gold.size()) + " vs " +
                                std::to_string(automatic.size()) + " sentences)");
  }
  return entity_prf(gold, automatic, labels);
}

std::string prf_to_csv(const PrfReport& report) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "class,precision,recall,f1,support,tp,fp,fn\n";
  auto row = [&out](const ClassScore& c) {
    out << c.name << ',' << c.precision << ',' << c.recall << ',' << c.f1 << ','
        << c.support() << ',' << c.true_positives << ',' << c.false_positives << ','
        << c.false_negatives << '\n';
  };
  for (const auto& c : report.classes) row(c);
  row(report.overall);
  return out.str();
}

std::string prf_to_json(const PrfReport& report) {
  auto row = [](const ClassScore& c) {
    return nlohmann::json{{"class", c.name},          {"precision", c.precision},
                          {"recall", c.recall},       {"f1", c.f1},
                          {"support", c.support()},   {"tp", c.true_positives},
                          {"fp", c.false_positives},  {"fn", c.false_negatives}};
  };
  nlohmann::json doc;
  doc["classes"] = nlohmann::json::array();
  for (const auto& c : report.classes) doc["classes"].push_back(row(c));
  doc["overall"] = row(report.overall);
  return doc.dump(2) + "\n";
}

std::string matrix_to_csv(std::span<const Scalar> matrix, const LabelSet& labels) {
  const std::size_t k = labels.size();
  if (matrix.size() != k * k) {
    throw std::invalid_argument("matrix_to_csv: expected " + std::to_string(k * k) +
                                " entries");
  }
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  out << "clean\\noisy";
  for (const auto& name : labels.names()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < k; ++i) {
    out << labels.name(i);
    for (std::size_t j = 0; j < k; ++j) out << ',' << matrix[i * k + j];
    out << '\n';
  }
  return out.str();
}

std::vector<Scalar> matrix_from_csv(const std::string& text, const LabelSet& labels) {
  const std::size_t k = labels.size();
  std::istringstream in(text);
  std::string line;
  std::vector<Scalar> out(k * k, Scalar{0});
  std::vector<Label> columns;
  std::set<Label> seen_rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != k + 1) {
      throw std::invalid_argument("matrix csv line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(k + 1) + " cells");
    }
    if (columns.empty()) {
      for (std::size_t j = 1; j <= k; ++j) columns.push_back(labels.index(cells[j]));
      continue;
    }
    const Label i = labels.index(cells[0]);
    seen_rows.insert(i);
    for (std::size_t j = 1; j <= k; ++j) {
      try {
        out[i * k + columns[j - 1]] = static_cast<Scalar>(std::stod(cells[j]));
      } catch (const std::exception&) {
        throw std::invalid_argument("matrix csv line " + std::to_string(line_no) +
                                    ": non-numeric cell '" + cells[j] + "'");
      }
    }
  }
  if (seen_rows.size() != k) {
    throw std::invalid_argument("matrix csv: expected one row per class");
  }
  return out;
}

ThetaReport theta_report(const NoiseMatrix& noise, const LabelSet& labels) {
  ThetaReport report;
  report.theta_csv = matrix_to_csv(noise.theta_values(), labels);
  report.weights_csv = matrix_to_csv(noise.weights().values(), labels);
  return report;
}

}  // namespace noiselab
