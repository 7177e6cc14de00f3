#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "noiselab/annotation.hpp"
#include "noiselab/labels.hpp"

namespace noiselab {

// Inclusive token range carrying one non-O class.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  Label label = 0;

  auto operator<=>(const EntitySpan&) const = default;
};

// Maximal runs of identical non-O labels (IO convention).
std::vector<EntitySpan> extract_spans(std::span<const Label> labels, Label outside);
// Inverse of extract_spans for a sequence of the given length.
std::vector<Label> spans_to_labels(std::span<const EntitySpan> spans, std::size_t length,
                                   Label outside);

struct ClassScore {
  std::string name;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Gold spans of this class.
  std::size_t support() const { return true_positives + false_negatives; }
};

// Per-class rows for every non-O class plus the micro-averaged overall row.
struct PrfReport {
  std::vector<ClassScore> classes;
  ClassScore overall;

  const ClassScore& find(const std::string& name) const;
};

// Fills precision/recall/F1 from the counts; F1 is 0 when P + R = 0.
void finalize_scores(ClassScore& score);

using LabelSequences = std::vector<std::vector<Label>>;

// Exact (start, end, class) span matching over aligned sequences.
PrfReport entity_prf(const LabelSequences& gold, const LabelSequences& predicted,
                     const LabelSet& labels);

// Rows are gold classes, columns predicted ones.
ConfusionCounts token_confusion(std::span<const Label> gold,
                                std::span<const Label> predicted, std::size_t k);

// Scores automatic labels against gold labels.
PrfReport annotation_quality(const LabelSequences& gold, const LabelSequences& automatic,
                             const LabelSet& labels);

// class,precision,recall,f1,support,tp,fp,fn with a final "overall" row.
std::string prf_to_csv(const PrfReport& report);
std::string prf_to_json(const PrfReport& report);

// Labelled k x k matrix: header row of noisy classes j, one row per clean
// class i.
std::string matrix_to_csv(std::span<const Scalar> matrix, const LabelSet& labels);
std::vector<Scalar> matrix_from_csv(const std::string& text, const LabelSet& labels);

// theta and raw b as two labelled CSV tables.
struct ThetaReport {
  std::string theta_csv;
  std::string weights_csv;
};
ThetaReport theta_report(const NoiseMatrix& noise, const LabelSet& labels);

}  // namespace noiselab
