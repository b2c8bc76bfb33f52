#include "edgebook/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <unordered_set>

#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"

namespace edgebook {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::kInvalidArgument, message);
}

void require_unit_interval(double v, const std::string& what) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
          what + " must be in [0,1], got " + std::to_string(v));
}

}  // namespace

bool Codebook::has_label(int value) const {
  return std::any_of(labels.begin(), labels.end(),
                     [value](const LabelDef& l) { return l.value == value; });
}

int Codebook::smallest_label() const {
  require(!labels.empty(), "codebook has no labels");
  return std::min_element(labels.begin(), labels.end(),
                          [](const LabelDef& a, const LabelDef& b) {
                            return a.value < b.value;
                          })
      ->value;
}

int Codebook::largest_label() const {
  require(!labels.empty(), "codebook has no labels");
  return std::max_element(labels.begin(), labels.end(),
                          [](const LabelDef& a, const LabelDef& b) {
                            return a.value < b.value;
                          })
      ->value;
}

std::vector<int> Codebook::label_values() const {
  std::vector<int> values;
  values.reserve(labels.size());
  for (const auto& l : labels) values.push_back(l.value);
  return values;
}

bool is_valid_task_id(const std::string& task_id) {
  static const std::regex kPattern("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(task_id, kPattern);
}

void validate(const LabelDef& label) {
  require(label.value >= 0, "label value must be >= 0");
  require(!is_blank(label.name), "label name must be non-empty");
}

void validate(const EdgeCaseRule& rule) {
  if (is_blank(rule.case_description) || is_blank(rule.action)) {
    fail(ErrorCode::kEmptyRule,
         "edge case rule needs a non-empty case_description and action");
  }
}

void validate(const Codebook& codebook) {
  require(codebook.version >= 0, "codebook version must be non-negative");
  if (codebook.version == 0) {
    require(!codebook.parent_version.has_value(),
            "codebook version 0 has no parent");
  } else {
    require(codebook.parent_version.has_value() &&
                *codebook.parent_version >= 0 &&
                *codebook.parent_version < codebook.version,
            "codebook parent_version must be smaller than version");
  }
  require(codebook.labels.size() >= 2, "codebook needs at least 2 labels");
  std::set<int> values;
  for (const auto& label : codebook.labels) {
    validate(label);
    require(values.insert(label.value).second,
            "duplicate label value " + std::to_string(label.value));
  }
  std::unordered_set<std::string> keys;
  for (const auto& rule : codebook.handling_rules) {
    validate(rule);
    require(keys.insert(rule_key(rule.case_description, rule.action)).second,
            "duplicate handling rule: " + rule.case_description);
  }
}

void validate(const Document& doc) {
  require(!doc.doc_id.empty(), "document id must be non-empty");
  require(!is_blank(doc.text), "document " + doc.doc_id + " has empty text");
}

void validate_corpus(const std::vector<Document>& corpus) {
  if (corpus.empty()) fail(ErrorCode::kEmptyCorpus, "corpus is empty");
  std::unordered_set<std::string> ids;
  for (const auto& doc : corpus) {
    validate(doc);
    require(ids.insert(doc.doc_id).second, "duplicate doc_id " + doc.doc_id);
  }
}

void validate(const AnnotationRecord& record) {
  require(!record.doc_id.empty(), "annotation doc_id must be non-empty");
  require_unit_interval(record.confidence, "confidence");
  require(record.codebook_version >= 0, "codebook_version must be >= 0");
  if (record.item_edge_case) validate(*record.item_edge_case);
}

void validate_against(const AnnotationRecord& record, const Codebook& codebook) {
  validate(record);
  if (record.codebook_version != codebook.version) {
    fail(ErrorCode::kInvalidArgument,
         "annotation bound to codebook v" +
             std::to_string(record.codebook_version) + ", checked against v" +
             std::to_string(codebook.version));
  }
  if (!codebook.has_label(record.label)) {
    fail(ErrorCode::kUnknownLabel,
         "label " + std::to_string(record.label) + " is not in the codebook");
  }
}

AnnotationRecord make_annotation(std::string doc_id, int label, double confidence,
                                 std::string rationale,
                                 std::optional<EdgeCaseRule> item_edge_case,
                                 int codebook_version) {
  AnnotationRecord record{std::move(doc_id), label, confidence,
                          std::move(rationale), std::move(item_edge_case),
                          codebook_version};
  validate(record);
  return record;
}

void validate(const EdgeCluster& cluster) {
  require(!cluster.cluster_id.empty(), "cluster_id must be non-empty");
  require(!cluster.member_doc_ids.empty(),
          "cluster " + cluster.cluster_id + " has no members");
  std::unordered_set<std::string> seen;
  for (const auto& id : cluster.member_doc_ids) {
    require(seen.insert(id).second,
            "cluster " + cluster.cluster_id + " repeats member " + id);
  }
  validate(cluster.suggested_rule);
}

void validate(const MergedEdgeCase& merged) {
  require(!merged.merged_id.empty(), "merged_id must be non-empty");
  require(!merged.source_cluster_ids.empty(),
          "merged case " + merged.merged_id + " has no source clusters");
  validate(merged.suggested_rule);
}

void validate_merge_partition(const std::vector<EdgeCluster>& clusters,
                              const std::vector<MergedEdgeCase>& merged) {
  std::multiset<std::string> sources;
  for (const auto& m : merged) {
    sources.insert(m.source_cluster_ids.begin(), m.source_cluster_ids.end());
  }
  std::multiset<std::string> ids;
  for (const auto& c : clusters) ids.insert(c.cluster_id);
  if (sources != ids) {
    fail(ErrorCode::kPartitionViolation,
         "merged cases do not partition the cluster set");
  }
}

void validate(const ProjectedPoint& point) {
  require(!point.doc_id.empty(), "projected point needs a doc_id");
  require(std::isfinite(point.x) && std::isfinite(point.y),
          "projected coordinates must be finite");
  require_unit_interval(point.size, "projected point size");
}

void validate(const IterationRecord& record) {
  require(record.iteration >= 0, "iteration must be >= 0");
  require(record.codebook_version >= 0, "codebook_version must be >= 0");
  std::unordered_set<std::string> annotated;
  for (const auto& a : record.annotations) {
    validate(a);
    require(annotated.insert(a.doc_id).second,
            "document " + a.doc_id + " annotated twice");
  }
  for (const auto& c : record.clusters) validate(c);
  for (const auto& m : record.merged) validate(m);
  validate_merge_partition(record.clusters, record.merged);
  for (const auto& p : record.projection) validate(p);
  for (const auto& p : record.edge_projection) validate(p);
}

}  // namespace edgebook
