#pragma once

#include <map>
#include <string>
#include <string_view>

#include "edgebook/provider/config.hpp"
#include "edgebook/provider/provider.hpp"

namespace edgebook::provider {

// Replaces every "{{key}}" with vars[key] in one pass; substituted text is not
// rescanned. Unknown keys are left as they are.
[[nodiscard]] std::string render_template(std::string_view tmpl,
                                          const std::map<std::string, std::string>& vars);

// Extracts the JSON object from a chat reply that may wrap it in a code fence
// or surround it with prose.
[[nodiscard]] std::string extract_json_object(std::string_view content);

// Strict parsers for the three structured replies. All throw
// Error(kMalformedResponse) naming the offending field.
[[nodiscard]] AnnotatorOutput parse_annotation_reply(std::string_view content);
[[nodiscard]] ClusterSummary parse_summary_reply(std::string_view content);
[[nodiscard]] std::vector<MergeGroup> parse_merge_reply(std::string_view content);

// "scheme://host[:port]" and the path prefix, e.g. "/v1".
struct BaseUrl {
  std::string origin;
  std::string path_prefix;
};
[[nodiscard]] BaseUrl split_base_url(const std::string& url);

// Chat-completions and embeddings client for any OpenAI-compatible endpoint.
// The annotator model handles annotate, the reasoner model handles summarize
// and merge, using the versioned prompt templates under templates/.
class OpenAiProvider final : public Provider {
 public:
  explicit OpenAiProvider(ProviderConfig config);

  AnnotatorOutput annotate(std::string_view codebook_prompt, const Document& doc,
                           const std::optional<std::string>& repair_hint) override;
  ClusterSummary summarize(const std::vector<EdgeCaseRule>& cluster_rules,
                           std::string_view codebook_prompt,
                           const std::optional<std::string>& repair_hint) override;
  std::vector<MergeGroup> merge(const std::vector<EdgeCluster>& clusters,
                                std::string_view codebook_prompt,
                                const std::optional<std::string>& repair_hint) override;
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;
  [[nodiscard]] std::string fingerprint() const override;

 private:
  std::string chat(const std::string& model, std::string_view system, const std::string& user,
                   bool json_mode);
  std::string post(const std::string& path, const std::string& body);

  ProviderConfig config_;
  BaseUrl base_;
};

}  // namespace edgebook::provider
