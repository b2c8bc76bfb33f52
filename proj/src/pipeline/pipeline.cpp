#include "edgebook/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "edgebook/cluster/projection.hpp"
#include "edgebook/core/codebook.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"
#include "edgebook/eval/metrics.hpp"

namespace edgebook::pipeline {
namespace {

void report(const Progress& progress, double fraction, const std::string& stage) {
  if (progress) progress(std::clamp(fraction, 0.0, 1.0), stage);
}

std::vector<ProjectedPoint> to_points(const std::vector<cluster::Point2>& xy,
                                      const std::vector<const AnnotationRecord*>& records) {
  std::vector<ProjectedPoint> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back({records[i]->doc_id, xy[i].x, xy[i].y, records[i]->uncertainty(),
                   records[i]->label});
  }
  return out;
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  if (!(cfg.edge_threshold > 0.0 && cfg.edge_threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "edge_threshold must be in (0, 1)");
  }
  if (cfg.min_edge_items_for_clustering < 1) {
    fail(ErrorCode::kInvalidArgument, "min_edge_items_for_clustering must be >= 1");
  }
  if (!(cfg.max_failed_fraction >= 0.0 && cfg.max_failed_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "max_failed_fraction must be in [0, 1)");
  }
  cluster::validate(cfg.cluster_params);
}

std::vector<AnnotationRecord> flag_edge_items(const std::vector<AnnotationRecord>& annotations,
                                              double edge_threshold) {
  std::vector<AnnotationRecord> out;
  for (const auto& a : annotations) {
    if (a.confidence < edge_threshold && a.item_edge_case) out.push_back(a);
  }
  return out;
}

std::vector<std::string> low_confidence_without_rule(
    const std::vector<AnnotationRecord>& annotations, double edge_threshold) {
  std::vector<std::string> out;
  for (const auto& a : annotations) {
    if (a.confidence < edge_threshold && !a.item_edge_case) out.push_back(a.doc_id);
  }
  return out;
}

IterationRecord compute_iteration(provider::Gateway& gateway, const std::string& task_id,
                                  const Codebook& codebook, const std::vector<Document>& corpus,
                                  const PipelineConfig& cfg, int iteration_number,
                                  const Progress& progress) {
  validate(cfg);
  validate(codebook);
  validate_corpus(corpus);
  if (iteration_number < 0) fail(ErrorCode::kInvalidArgument, "iteration must be >= 0");
  if (cfg.positive_label && !codebook.has_label(*cfg.positive_label)) {
    fail(ErrorCode::kUnknownLabel, "positive_label is not a codebook label");
  }

  IterationRecord rec;
  rec.task_id = task_id;
  rec.iteration = iteration_number;
  rec.codebook_version = codebook.version;
  rec.edge_threshold = cfg.edge_threshold;
  rec.provider_fingerprint = gateway.fingerprint();

  // Annotate.
  const std::string prompt = render_prompt_codebook(codebook);
  const std::vector<int> labels = codebook.label_values();
  report(progress, 0.0, "annotate");
  const auto outcomes = gateway.annotate_all(
      prompt, corpus, labels,
      [&](std::size_t done, std::size_t total) {
        report(progress, 0.7 * static_cast<double>(done) / static_cast<double>(total), "annotate");
      });

  std::vector<std::string> failed;
  bool all_unavailable = true;
  std::string first_failure;
  for (const auto& o : outcomes) {
    if (const auto* f = std::get_if<provider::AnnotationFailure>(&o)) {
      failed.push_back(f->doc_id);
      all_unavailable = all_unavailable && f->code == ErrorCode::kProviderUnavailable;
      if (first_failure.empty()) first_failure = f->message;
    }
  }
  if (failed.size() == corpus.size() && all_unavailable) {
    throw Error(ErrorCode::kProviderUnavailable, "provider unavailable: " + first_failure,
                failed);
  }
  if (static_cast<double>(failed.size()) >
      cfg.max_failed_fraction * static_cast<double>(corpus.size())) {
    throw Error(ErrorCode::kPartialAnnotationFailure,
                std::to_string(failed.size()) + " of " + std::to_string(corpus.size()) +
                    " documents failed annotation",
                failed);
  }

  rec.annotations.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (const auto* f = std::get_if<provider::AnnotationFailure>(&outcomes[i])) {
      rec.annotations.push_back(make_annotation(corpus[i].doc_id, codebook.smallest_label(), 0.0,
                                                "annotation failed: " + f->message, std::nullopt,
                                                codebook.version));
      continue;
    }
    const auto& out = std::get<provider::AnnotatorOutput>(outcomes[i]);
    std::optional<EdgeCaseRule> rule = out.edge_rule;
    if (rule && out.confidence >= cfg.edge_threshold) {
      // A rule on a confident annotation would violate the record invariant.
      rec.diagnostics.rules_dropped_above_threshold.push_back(corpus[i].doc_id);
      rule.reset();
    }
    rec.annotations.push_back(make_annotation(corpus[i].doc_id, out.label, out.confidence,
                                              out.rationale, std::move(rule), codebook.version));
  }
  rec.diagnostics.failed_doc_ids = failed;
  for (auto& id : low_confidence_without_rule(rec.annotations, cfg.edge_threshold)) {
    if (std::find(failed.begin(), failed.end(), id) == failed.end()) {
      rec.diagnostics.low_confidence_without_rule.push_back(std::move(id));
    }
  }

  // Upper scatter: document text embeddings.
  report(progress, 0.7, "embed");
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& d : corpus) texts.push_back(d.text);
  const auto doc_vectors = gateway.embed_texts(texts);
  std::vector<const AnnotationRecord*> all_records;
  for (const auto& a : rec.annotations) all_records.push_back(&a);
  rec.projection = to_points(cluster::project_2d(doc_vectors), all_records);

  const auto edge = flag_edge_items(rec.annotations, cfg.edge_threshold);
  if (!edge.empty()) {
    std::vector<const AnnotationRecord*> edge_records;
    std::vector<std::string> descriptions;
    for (const auto& a : rec.annotations) {
      if (a.confidence < cfg.edge_threshold && a.item_edge_case) {
        edge_records.push_back(&a);
        descriptions.push_back(a.item_edge_case->case_description);
      }
    }

    report(progress, 0.8, "cluster");
    const auto edge_vectors = gateway.embed_texts(descriptions);
    rec.edge_projection = to_points(cluster::project_2d(edge_vectors), edge_records);

    std::vector<int> assignment(edge.size(), 0);
    int k = 1;
    if (static_cast<int>(edge.size()) >= cfg.min_edge_items_for_clustering) {
      const auto result = cluster::cluster_constrained(edge_vectors, cfg.cluster_params);
      assignment = result.labels;
      k = static_cast<int>(result.centroids.size());
      if (result.relaxed_max) {
        rec.diagnostics.warnings.push_back(
            "no cluster count fits " + std::to_string(edge.size()) + " edge items within [" +
            std::to_string(cfg.cluster_params.min_size) + ", " +
            std::to_string(cfg.cluster_params.max_size) + "]; the last cluster was enlarged");
      }
    }

    std::vector<std::vector<EdgeCaseRule>> member_rules(k);
    std::vector<std::vector<std::string>> members(k);
    for (std::size_t i = 0; i < edge_records.size(); ++i) {
      member_rules[assignment[i]].push_back(*edge_records[i]->item_edge_case);
      members[assignment[i]].push_back(edge_records[i]->doc_id);
    }

    report(progress, 0.85, "summarize");
    std::vector<std::vector<EdgeCaseRule>> nonempty_rules;
    std::vector<std::vector<std::string>> nonempty_members;
    for (int j = 0; j < k; ++j) {
      if (members[j].empty()) continue;
      nonempty_rules.push_back(std::move(member_rules[j]));
      nonempty_members.push_back(std::move(members[j]));
    }
    const auto summaries = gateway.summarize_clusters(nonempty_rules, prompt);
    for (std::size_t j = 0; j < summaries.size(); ++j) {
      rec.clusters.push_back({"c" + std::to_string(j), std::move(nonempty_members[j]),
                              summaries[j].high_level_description, summaries[j].suggested_rule});
    }

    report(progress, 0.95, "merge");
    auto merged = gateway.merge_summaries(rec.clusters, prompt);
    rec.merged = std::move(merged.merged);
    for (auto& v : merged.violations) {
      rec.diagnostics.warnings.push_back("merge output repaired: " + v);
    }
  }

  const int positive = cfg.positive_label.value_or(codebook.largest_label());
  const bool gold_in_vocabulary = std::all_of(corpus.begin(), corpus.end(), [&](const Document& d) {
    return !d.gold_label || codebook.has_label(*d.gold_label);
  });
  if (gold_in_vocabulary) {
    rec.metrics = eval::corpus_metrics(corpus, rec.annotations, positive, labels);
  } else {
    rec.diagnostics.warnings.push_back(
        "some gold labels are not in the codebook's label set; metrics skipped");
  }
  rec.created_at = utc_timestamp_now();
  validate(rec);
  report(progress, 1.0, "done");
  return rec;
}

IterationRecord run_iteration(provider::Gateway& gateway, store::Store& store,
                              const std::string& task_id, const Codebook& codebook,
                              const PipelineConfig& cfg, const Progress& progress) {
  const auto lease = store.acquire_lease(task_id);
  if (codebook.task_id != task_id || store.get_codebook(task_id, codebook.version) != codebook) {
    fail(ErrorCode::kInvalidArgument, "run_iteration needs a codebook stored for the task");
  }
  const auto corpus = store.get_corpus(task_id);
  if (corpus.empty()) fail(ErrorCode::kEmptyCorpus, "corpus is empty");
  IterationRecord rec = compute_iteration(gateway, task_id, codebook, corpus, cfg,
                                          store.iteration_count(task_id), progress);
  store.put_iteration(task_id, rec);
  return rec;
}

}  // namespace edgebook::pipeline
