#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "edgebook/core/errors.hpp"
#include "edgebook/provider/provider.hpp"

namespace edgebook::provider {

struct RetryPolicy {
  // Retries after the first attempt, for kProviderUnavailable only.
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

struct GatewayOptions {
  int max_parallel = 8;
  RetryPolicy retry;
  // Replaced in tests to avoid real sleeps.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Counting semaphore with a runtime bound.
class Admission {
 public:
  explicit Admission(int slots) : free_(slots) {}
  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

struct AnnotationFailure {
  std::string doc_id;
  ErrorCode code;
  std::string message;
};

using AnnotationOutcome = std::variant<AnnotatorOutput, AnnotationFailure>;

struct MergeResult {
  std::vector<MergedEdgeCase> merged;
  // Non-empty when the provider's grouping dropped, duplicated or invented
  // cluster ids and had to be repaired.
  std::vector<std::string> violations;
};

// Checks a proposed grouping against the cluster set and repairs it: unknown
// and repeated ids are dropped, empty groups removed, and clusters not
// mentioned become singleton cases. Merged ids are "m0", "m1", ... in group
// order; member_doc_ids is the ordered union of the source members.
[[nodiscard]] MergeResult repair_merge_partition(const std::vector<EdgeCluster>& clusters,
                                                 const std::vector<MergeGroup>& groups);

// The calling surface used by the pipeline. Adds retry with exponential
// backoff, one repair round for malformed output, response validation and a
// bound on in-flight provider requests. Results of batch calls come back in
// input order regardless of completion order.
class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, GatewayOptions options);

  AnnotatorOutput annotate_one(std::string_view codebook_prompt, const Document& doc,
                               std::span<const int> label_values);

  // progress(done, total) is called after every finished document.
  std::vector<AnnotationOutcome> annotate_all(
      std::string_view codebook_prompt, std::span<const Document> docs,
      std::span<const int> label_values,
      const std::function<void(std::size_t, std::size_t)>& progress = {});

  ClusterSummary summarize_cluster(const std::vector<EdgeCaseRule>& cluster_rules,
                                   std::string_view codebook_prompt);

  // Runs summarize_cluster for every entry concurrently.
  std::vector<ClusterSummary> summarize_clusters(
      const std::vector<std::vector<EdgeCaseRule>>& clusters, std::string_view codebook_prompt);

  MergeResult merge_summaries(const std::vector<EdgeCluster>& clusters,
                              std::string_view codebook_prompt);

  // One L2-normalized vector per text, batched by the provider's batch size.
  std::vector<Vector> embed_texts(std::span<const std::string> texts);

  [[nodiscard]] std::string fingerprint() const { return provider_->fingerprint(); }
  [[nodiscard]] int max_parallel() const { return options_.max_parallel; }

 private:
  template <typename Fn>
  auto with_retries(const Fn& fn, const std::optional<std::string>& doc_id);

  template <typename Fn>
  void parallel_for(std::size_t n, const Fn& fn);

  std::shared_ptr<Provider> provider_;
  GatewayOptions options_;
  Admission admission_;
};

}  // namespace edgebook::provider
