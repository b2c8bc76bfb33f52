#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgebook/cluster/balanced_kmeans.hpp"
#include "edgebook/core/types.hpp"
#include "edgebook/provider/gateway.hpp"
#include "edgebook/store/store.hpp"

namespace edgebook::pipeline {

struct PipelineConfig {
  double edge_threshold = 0.80;
  cluster::ClusterParams cluster_params;
  int min_edge_items_for_clustering = 10;
  // Defaults to the codebook's largest label value.
  std::optional<int> positive_label;
  // Share of documents that may fail annotation before the run aborts.
  double max_failed_fraction = 0.02;
};

// 0 < edge_threshold < 1, min_edge_items_for_clustering >= 1, valid cluster
// params, 0 <= max_failed_fraction < 1.
void validate(const PipelineConfig& cfg);

// Records with confidence < threshold and an item edge case, input order kept.
[[nodiscard]] std::vector<AnnotationRecord> flag_edge_items(
    const std::vector<AnnotationRecord>& annotations, double edge_threshold);

// Doc ids with confidence < threshold but no item edge case.
[[nodiscard]] std::vector<std::string> low_confidence_without_rule(
    const std::vector<AnnotationRecord>& annotations, double edge_threshold);

// Called with a fraction in [0, 1] and a short stage name.
using Progress = std::function<void(double, const std::string&)>;

// Annotate, flag, embed, cluster, summarize, merge, project and score one
// iteration. Nothing is persisted. iteration_number is stored in the record.
//
// Documents whose annotation fails after retries get a placeholder record
// (smallest label, confidence 0) and are listed in
// diagnostics.failed_doc_ids, as long as they are at most
// max_failed_fraction of the corpus; beyond that the run throws
// PartialAnnotationFailure with the failed ids as details. If every document
// failed because the provider was unreachable, ProviderUnavailable is thrown.
[[nodiscard]] IterationRecord compute_iteration(provider::Gateway& gateway,
                                                const std::string& task_id,
                                                const Codebook& codebook,
                                                const std::vector<Document>& corpus,
                                                const PipelineConfig& cfg, int iteration_number,
                                                const Progress& progress = {});

// compute_iteration against the task's stored corpus, then persists the
// record as the task's next iteration. Holds the task lease for the whole
// run, so a second concurrent run on the same task gets TaskBusy.
IterationRecord run_iteration(provider::Gateway& gateway, store::Store& store,
                              const std::string& task_id, const Codebook& codebook,
                              const PipelineConfig& cfg, const Progress& progress = {});

}  // namespace edgebook::pipeline
