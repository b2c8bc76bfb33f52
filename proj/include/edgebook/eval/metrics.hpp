#pragma once

#include <string>
#include <vector>

#include "edgebook/core/types.hpp"

namespace edgebook::eval {

struct Labeled {
  std::string doc_id;
  int label = 0;
};

// Per-label one-vs-rest precision, recall and F1 plus the confusion matrix
// (rows gold, columns predicted, in label_values order). Zero denominators
// give 0. Predictions and gold are matched by doc_id, so input order does
// not matter.
//
// Throws IdMismatch if the two doc_id sets differ or repeat an id,
// UnknownLabel if any label (or positive_label) is outside label_values and
// NoGoldLabels if gold is empty.
[[nodiscard]] Metrics evaluate_f1(const std::vector<Labeled>& predictions,
                                  const std::vector<Labeled>& gold, int positive_label,
                                  const std::vector<int>& label_values);

// Metrics over the documents that carry a gold label, or nullopt if none do.
[[nodiscard]] std::optional<Metrics> corpus_metrics(const std::vector<Document>& corpus,
                                                    const std::vector<AnnotationRecord>& annotations,
                                                    int positive_label,
                                                    const std::vector<int>& label_values);

}  // namespace edgebook::eval
