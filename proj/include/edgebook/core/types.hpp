#pragma once

#include <optional>
#include <string>
#include <vector>

namespace edgebook {

struct LabelDef {
  int value = 0;
  std::string name;
  std::string definition;

  bool operator==(const LabelDef&) const = default;
};

// "when <case_description>, do <action>"
struct EdgeCaseRule {
  std::string case_description;
  std::string action;

  bool operator==(const EdgeCaseRule&) const = default;
};

struct Codebook {
  std::string task_id;
  int version = 0;
  std::string task_description;
  std::vector<LabelDef> labels;
  std::vector<EdgeCaseRule> handling_rules;
  std::optional<int> parent_version;

  [[nodiscard]] bool has_label(int value) const;
  [[nodiscard]] int smallest_label() const;
  [[nodiscard]] int largest_label() const;
  [[nodiscard]] std::vector<int> label_values() const;

  bool operator==(const Codebook&) const = default;
};

struct Document {
  std::string doc_id;
  std::string text;
  std::optional<int> gold_label;

  bool operator==(const Document&) const = default;
};

struct AnnotationRecord {
  std::string doc_id;
  int label = 0;
  double confidence = 0.0;
  std::string rationale;
  std::optional<EdgeCaseRule> item_edge_case;
  int codebook_version = 0;

  [[nodiscard]] double uncertainty() const { return 1.0 - confidence; }

  bool operator==(const AnnotationRecord&) const = default;
};

struct EdgeCluster {
  std::string cluster_id;
  std::vector<std::string> member_doc_ids;
  std::string high_level_description;
  EdgeCaseRule suggested_rule;

  bool operator==(const EdgeCluster&) const = default;
};

struct MergedEdgeCase {
  std::string merged_id;
  std::vector<std::string> source_cluster_ids;
  std::string high_level_description;
  EdgeCaseRule suggested_rule;
  std::vector<std::string> member_doc_ids;

  bool operator==(const MergedEdgeCase&) const = default;
};

struct ProjectedPoint {
  std::string doc_id;
  double x = 0.0;
  double y = 0.0;
  double size = 0.0;
  int label = 0;

  bool operator==(const ProjectedPoint&) const = default;
};

struct LabelScores {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;

  bool operator==(const LabelScores&) const = default;
};

struct Metrics {
  std::vector<LabelScores> per_label;
  int positive_label = 0;
  double positive_f1 = 0.0;
  int n_gold = 0;
  // Rows are gold labels, columns predictions, both in per_label order.
  std::vector<std::vector<int>> confusion;

  bool operator==(const Metrics&) const = default;
};

// Things the pipeline noticed but did not treat as fatal.
struct IterationDiagnostics {
  std::vector<std::string> low_confidence_without_rule;
  std::vector<std::string> rules_dropped_above_threshold;
  std::vector<std::string> failed_doc_ids;
  std::vector<std::string> warnings;

  bool operator==(const IterationDiagnostics&) const = default;
};

struct IterationRecord {
  std::string task_id;
  int iteration = 0;
  int codebook_version = 0;
  double edge_threshold = 0.0;
  std::vector<AnnotationRecord> annotations;
  std::vector<EdgeCluster> clusters;
  std::vector<MergedEdgeCase> merged;
  std::vector<ProjectedPoint> projection;
  std::vector<ProjectedPoint> edge_projection;
  std::optional<Metrics> metrics;
  IterationDiagnostics diagnostics;
  std::string created_at;
  std::string provider_fingerprint;

  bool operator==(const IterationRecord&) const = default;
};

// Construction-time validation. Each throws Error(kInvalidArgument) with a
// message naming the violated invariant.
void validate(const LabelDef& label);
void validate(const EdgeCaseRule& rule);
void validate(const Codebook& codebook);
void validate(const Document& doc);
void validate_corpus(const std::vector<Document>& corpus);
void validate(const AnnotationRecord& record);
void validate_against(const AnnotationRecord& record, const Codebook& codebook);
void validate(const EdgeCluster& cluster);
void validate(const MergedEdgeCase& merged);
void validate_merge_partition(const std::vector<EdgeCluster>& clusters,
                              const std::vector<MergedEdgeCase>& merged);
void validate(const ProjectedPoint& point);
void validate(const IterationRecord& record);

// Rejects out-of-range confidence instead of clamping it.
AnnotationRecord make_annotation(std::string doc_id, int label, double confidence,
                                 std::string rationale,
                                 std::optional<EdgeCaseRule> item_edge_case,
                                 int codebook_version);

[[nodiscard]] bool is_valid_task_id(const std::string& task_id);

}  // namespace edgebook
