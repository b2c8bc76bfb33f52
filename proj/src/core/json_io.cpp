#include "edgebook/core/json_io.hpp"

#include "edgebook/core/errors.hpp"

namespace edgebook {
namespace {

template <typename T>
void get_optional(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
  } else {
    out = it->get<T>();
  }
}

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

void to_json(Json& j, const LabelDef& v) {
  j = Json{{"value", v.value}, {"name", v.name}, {"definition", v.definition}};
}

void from_json(const Json& j, LabelDef& v) {
  v.value = j.at("value").get<int>();
  v.name = j.at("name").get<std::string>();
  v.definition = value_or<std::string>(j, "definition", "");
  validate(v);
}

void to_json(Json& j, const EdgeCaseRule& v) {
  j = Json{{"case_description", v.case_description}, {"action", v.action}};
}

void from_json(const Json& j, EdgeCaseRule& v) {
  v.case_description = j.at("case_description").get<std::string>();
  v.action = j.at("action").get<std::string>();
  validate(v);
}

void to_json(Json& j, const Codebook& v) {
  j = Json{{"task_id", v.task_id},
           {"version", v.version},
           {"task_description", v.task_description},
           {"labels", v.labels},
           {"handling_rules", v.handling_rules}};
  put_optional(j, "parent_version", v.parent_version);
}

void from_json(const Json& j, Codebook& v) {
  v.task_id = j.at("task_id").get<std::string>();
  v.version = j.at("version").get<int>();
  v.task_description = j.at("task_description").get<std::string>();
  v.labels = j.at("labels").get<std::vector<LabelDef>>();
  v.handling_rules = j.at("handling_rules").get<std::vector<EdgeCaseRule>>();
  get_optional(j, "parent_version", v.parent_version);
  validate(v);
}

Codebook codebook_from_user_json(const Json& j, const std::string& default_task_id) {
  Codebook cb;
  cb.task_id = value_or<std::string>(j, "task_id", default_task_id);
  cb.version = value_or<int>(j, "version", 0);
  cb.task_description = j.at("task_description").get<std::string>();
  cb.labels = j.at("labels").get<std::vector<LabelDef>>();
  cb.handling_rules =
      value_or<std::vector<EdgeCaseRule>>(j, "handling_rules", {});
  get_optional(j, "parent_version", cb.parent_version);
  validate(cb);
  return cb;
}

void to_json(Json& j, const Document& v) {
  j = Json{{"doc_id", v.doc_id}, {"text", v.text}};
  put_optional(j, "gold_label", v.gold_label);
}

void from_json(const Json& j, Document& v) {
  v.doc_id = j.at("doc_id").get<std::string>();
  v.text = j.at("text").get<std::string>();
  get_optional(j, "gold_label", v.gold_label);
  validate(v);
}

void to_json(Json& j, const AnnotationRecord& v) {
  j = Json{{"doc_id", v.doc_id},
           {"label", v.label},
           {"confidence", v.confidence},
           {"rationale", v.rationale},
           {"codebook_version", v.codebook_version}};
  put_optional(j, "item_edge_case", v.item_edge_case);
}

void from_json(const Json& j, AnnotationRecord& v) {
  v.doc_id = j.at("doc_id").get<std::string>();
  v.label = j.at("label").get<int>();
  v.confidence = j.at("confidence").get<double>();
  v.rationale = value_or<std::string>(j, "rationale", "");
  v.codebook_version = j.at("codebook_version").get<int>();
  get_optional(j, "item_edge_case", v.item_edge_case);
  validate(v);
}

void to_json(Json& j, const EdgeCluster& v) {
  j = Json{{"cluster_id", v.cluster_id},
           {"member_doc_ids", v.member_doc_ids},
           {"high_level_description", v.high_level_description},
           {"suggested_rule", v.suggested_rule}};
}

void from_json(const Json& j, EdgeCluster& v) {
  v.cluster_id = j.at("cluster_id").get<std::string>();
  v.member_doc_ids = j.at("member_doc_ids").get<std::vector<std::string>>();
  v.high_level_description = j.at("high_level_description").get<std::string>();
  v.suggested_rule = j.at("suggested_rule").get<EdgeCaseRule>();
  validate(v);
}

void to_json(Json& j, const MergedEdgeCase& v) {
  j = Json{{"merged_id", v.merged_id},
           {"source_cluster_ids", v.source_cluster_ids},
           {"high_level_description", v.high_level_description},
           {"suggested_rule", v.suggested_rule},
           {"member_doc_ids", v.member_doc_ids}};
}

void from_json(const Json& j, MergedEdgeCase& v) {
  v.merged_id = j.at("merged_id").get<std::string>();
  v.source_cluster_ids = j.at("source_cluster_ids").get<std::vector<std::string>>();
  v.high_level_description = j.at("high_level_description").get<std::string>();
  v.suggested_rule = j.at("suggested_rule").get<EdgeCaseRule>();
  v.member_doc_ids = j.at("member_doc_ids").get<std::vector<std::string>>();
  validate(v);
}

void to_json(Json& j, const ProjectedPoint& v) {
  j = Json{{"doc_id", v.doc_id},
           {"x", v.x},
           {"y", v.y},
           {"size", v.size},
           {"label", v.label}};
}

void from_json(const Json& j, ProjectedPoint& v) {
  v.doc_id = j.at("doc_id").get<std::string>();
  v.x = j.at("x").get<double>();
  v.y = j.at("y").get<double>();
  v.size = j.at("size").get<double>();
  v.label = j.at("label").get<int>();
  validate(v);
}

void to_json(Json& j, const LabelScores& v) {
  j = Json{{"label", v.label},
           {"precision", v.precision},
           {"recall", v.recall},
           {"f1", v.f1},
           {"support", v.support}};
}

void from_json(const Json& j, LabelScores& v) {
  v.label = j.at("label").get<int>();
  v.precision = j.at("precision").get<double>();
  v.recall = j.at("recall").get<double>();
  v.f1 = j.at("f1").get<double>();
  v.support = j.at("support").get<int>();
}

void to_json(Json& j, const Metrics& v) {
  j = Json{{"per_label", v.per_label},
           {"positive_label", v.positive_label},
           {"positive_f1", v.positive_f1},
           {"n_gold", v.n_gold},
           {"confusion", v.confusion}};
}

void from_json(const Json& j, Metrics& v) {
  v.per_label = j.at("per_label").get<std::vector<LabelScores>>();
  v.positive_label = j.at("positive_label").get<int>();
  v.positive_f1 = j.at("positive_f1").get<double>();
  v.n_gold = j.at("n_gold").get<int>();
  v.confusion = value_or<std::vector<std::vector<int>>>(j, "confusion", {});
}

void to_json(Json& j, const IterationDiagnostics& v) {
  j = Json{{"low_confidence_without_rule", v.low_confidence_without_rule},
           {"rules_dropped_above_threshold", v.rules_dropped_above_threshold},
           {"failed_doc_ids", v.failed_doc_ids},
           {"warnings", v.warnings}};
}

void from_json(const Json& j, IterationDiagnostics& v) {
  using Ids = std::vector<std::string>;
  v.low_confidence_without_rule = value_or<Ids>(j, "low_confidence_without_rule", {});
  v.rules_dropped_above_threshold =
      value_or<Ids>(j, "rules_dropped_above_threshold", {});
  v.failed_doc_ids = value_or<Ids>(j, "failed_doc_ids", {});
  v.warnings = value_or<Ids>(j, "warnings", {});
}

void to_json(Json& j, const IterationRecord& v) {
  j = Json{{"schema_version", kSchemaVersion},
           {"task_id", v.task_id},
           {"iteration", v.iteration},
           {"codebook_version", v.codebook_version},
           {"edge_threshold", v.edge_threshold},
           {"annotations", v.annotations},
           {"clusters", v.clusters},
           {"merged", v.merged},
           {"projection", v.projection},
           {"edge_projection", v.edge_projection},
           {"diagnostics", v.diagnostics},
           {"created_at", v.created_at},
           {"provider_fingerprint", v.provider_fingerprint}};
  put_optional(j, "metrics", v.metrics);
}

void from_json(const Json& j, IterationRecord& v) {
  const int schema = value_or<int>(j, "schema_version", kSchemaVersion);
  if (schema > kSchemaVersion) {
    fail(ErrorCode::kInvalidArgument,
         "unsupported schema_version " + std::to_string(schema));
  }
  v.task_id = j.at("task_id").get<std::string>();
  v.iteration = j.at("iteration").get<int>();
  v.codebook_version = j.at("codebook_version").get<int>();
  v.edge_threshold = j.at("edge_threshold").get<double>();
  v.annotations = j.at("annotations").get<std::vector<AnnotationRecord>>();
  v.clusters = j.at("clusters").get<std::vector<EdgeCluster>>();
  v.merged = j.at("merged").get<std::vector<MergedEdgeCase>>();
  v.projection = j.at("projection").get<std::vector<ProjectedPoint>>();
  v.edge_projection = value_or<std::vector<ProjectedPoint>>(j, "edge_projection", {});
  v.diagnostics = value_or<IterationDiagnostics>(j, "diagnostics", {});
  v.created_at = j.at("created_at").get<std::string>();
  v.provider_fingerprint = j.at("provider_fingerprint").get<std::string>();
  get_optional(j, "metrics", v.metrics);
  validate(v);
}

}  // namespace edgebook
