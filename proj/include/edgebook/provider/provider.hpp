#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgebook/core/types.hpp"

namespace edgebook::provider {

using Vector = std::vector<double>;

struct AnnotatorOutput {
  int label = 0;
  double confidence = 0.0;
  std::string rationale;
  std::optional<EdgeCaseRule> edge_rule;

  bool operator==(const AnnotatorOutput&) const = default;
};

struct ClusterSummary {
  std::string high_level_description;
  EdgeCaseRule suggested_rule;

  bool operator==(const ClusterSummary&) const = default;
};

// One merged case as proposed by a model, before the partition check.
struct MergeGroup {
  std::vector<std::string> source_cluster_ids;
  std::string high_level_description;
  EdgeCaseRule suggested_rule;

  bool operator==(const MergeGroup&) const = default;
};

// A model backend for the three roles. Implementations throw
// Error(kProviderUnavailable) for transport failures and
// Error(kMalformedResponse) for output they cannot parse. `repair_hint`, when
// set, carries the validation error of the previous attempt so it can be fed
// back to the model. Implementations must be safe to call concurrently.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual AnnotatorOutput annotate(std::string_view codebook_prompt, const Document& doc,
                                   const std::optional<std::string>& repair_hint) = 0;

  virtual ClusterSummary summarize(const std::vector<EdgeCaseRule>& cluster_rules,
                                   std::string_view codebook_prompt,
                                   const std::optional<std::string>& repair_hint) = 0;

  virtual std::vector<MergeGroup> merge(const std::vector<EdgeCluster>& clusters,
                                        std::string_view codebook_prompt,
                                        const std::optional<std::string>& repair_hint) = 0;

  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;

  // Identifies backend, models and prompt template version.
  [[nodiscard]] virtual std::string fingerprint() const = 0;

  [[nodiscard]] virtual std::size_t embed_batch_size() const { return 64; }
};

}  // namespace edgebook::provider
