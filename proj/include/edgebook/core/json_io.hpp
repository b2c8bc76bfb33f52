#pragma once

#include <json.hpp>

#include "edgebook/core/types.hpp"

// JSON mapping for the core types. nlohmann::json keeps object keys sorted,
// so dumps are stable across runs. Optional fields serialize as null and
// deserialization accepts null or absent. Every from_json validates.
namespace edgebook {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

void to_json(Json& j, const LabelDef& v);
void from_json(const Json& j, LabelDef& v);
void to_json(Json& j, const EdgeCaseRule& v);
void from_json(const Json& j, EdgeCaseRule& v);
void to_json(Json& j, const Codebook& v);
void from_json(const Json& j, Codebook& v);
void to_json(Json& j, const Document& v);
void from_json(const Json& j, Document& v);
void to_json(Json& j, const AnnotationRecord& v);
void from_json(const Json& j, AnnotationRecord& v);
void to_json(Json& j, const EdgeCluster& v);
void from_json(const Json& j, EdgeCluster& v);
void to_json(Json& j, const MergedEdgeCase& v);
void from_json(const Json& j, MergedEdgeCase& v);
void to_json(Json& j, const ProjectedPoint& v);
void from_json(const Json& j, ProjectedPoint& v);
void to_json(Json& j, const LabelScores& v);
void from_json(const Json& j, LabelScores& v);
void to_json(Json& j, const Metrics& v);
void from_json(const Json& j, Metrics& v);
void to_json(Json& j, const IterationDiagnostics& v);
void from_json(const Json& j, IterationDiagnostics& v);
void to_json(Json& j, const IterationRecord& v);
void from_json(const Json& j, IterationRecord& v);

// Codebook files written by hand (CLI input) may omit task_id, version and
// handling_rules; the defaults are "task", 0 and [].
[[nodiscard]] Codebook codebook_from_user_json(const Json& j,
                                               const std::string& default_task_id);

}  // namespace edgebook
