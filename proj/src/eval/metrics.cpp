#include "edgebook/eval/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include "edgebook/core/errors.hpp"

namespace edgebook::eval {
namespace {

double ratio(int num, int den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

std::unordered_map<std::string, int> by_id(const std::vector<Labeled>& xs, const char* what) {
  std::unordered_map<std::string, int> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    if (!out.emplace(x.doc_id, x.label).second) {
      fail(ErrorCode::kIdMismatch, std::string(what) + " list repeats doc_id " + x.doc_id);
    }
  }
  return out;
}

}  // namespace

Metrics evaluate_f1(const std::vector<Labeled>& predictions, const std::vector<Labeled>& gold,
                    int positive_label, const std::vector<int>& label_values) {
  if (gold.empty()) fail(ErrorCode::kNoGoldLabels, "no gold labels to evaluate against");
  std::unordered_map<int, std::size_t> index;
  for (std::size_t i = 0; i < label_values.size(); ++i) index.emplace(label_values[i], i);
  const auto label_index = [&](int label) {
    const auto it = index.find(label);
    if (it == index.end()) fail(ErrorCode::kUnknownLabel, "label " + std::to_string(label) + " is not in the vocabulary");
    return it->second;
  };
  (void)label_index(positive_label);

  const auto pred = by_id(predictions, "prediction");
  const auto truth = by_id(gold, "gold");
  if (pred.size() != truth.size()) {
    fail(ErrorCode::kIdMismatch, "predictions and gold cover different documents");
  }

  const std::size_t k = label_values.size();
  Metrics m;
  m.confusion.assign(k, std::vector<int>(k, 0));
  for (const auto& g : gold) {
    const auto p = pred.find(g.doc_id);
    if (p == pred.end()) fail(ErrorCode::kIdMismatch, "no prediction for doc_id " + g.doc_id);
    ++m.confusion[label_index(g.label)][label_index(p->second)];
  }

  for (std::size_t c = 0; c < k; ++c) {
    int tp = m.confusion[c][c];
    int fp = 0;
    int fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += m.confusion[o][c];
      fn += m.confusion[c][o];
    }
    LabelScores s;
    s.label = label_values[c];
    s.precision = ratio(tp, tp + fp);
    s.recall = ratio(tp, tp + fn);
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    s.support = tp + fn;
    m.per_label.push_back(s);
  }
  m.positive_label = positive_label;
  m.positive_f1 = m.per_label[label_index(positive_label)].f1;
  m.n_gold = static_cast<int>(gold.size());
  return m;
}

std::optional<Metrics> corpus_metrics(const std::vector<Document>& corpus,
                                      const std::vector<AnnotationRecord>& annotations,
                                      int positive_label, const std::vector<int>& label_values) {
  std::vector<Labeled> gold;
  for (const auto& d : corpus) {
    if (d.gold_label) gold.push_back({d.doc_id, *d.gold_label});
  }
  if (gold.empty()) return std::nullopt;
  std::unordered_map<std::string, int> predicted;
  for (const auto& a : annotations) predicted.emplace(a.doc_id, a.label);
  std::vector<Labeled> preds;
  preds.reserve(gold.size());
  for (const auto& g : gold) {
    const auto it = predicted.find(g.doc_id);
    if (it == predicted.end()) fail(ErrorCode::kIdMismatch, "no annotation for doc_id " + g.doc_id);
    preds.push_back({g.doc_id, it->second});
  }
  return evaluate_f1(preds, gold, positive_label, label_values);
}

}  // namespace edgebook::eval
