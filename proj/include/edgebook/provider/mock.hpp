#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edgebook/provider/provider.hpp"

namespace edgebook::provider {

inline constexpr std::string_view kAmbiguityMarker = "@@amb";
inline constexpr std::string_view kMarkerCaseDescription =
    "text contains the @@amb ambiguity marker";
inline constexpr std::size_t kMockEmbeddingDim = 64;

// Labels and handling-rule text recovered from a rendered codebook prompt.
struct PromptView {
  struct Label {
    int value;
    std::string definition;
  };
  std::vector<Label> labels;
  std::string rules_section;
};

// Throws Error(kInvalidArgument) if the prompt has no parsable labels section.
[[nodiscard]] PromptView parse_codebook_prompt(std::string_view prompt);

// Deterministic offline backend. Its behaviour is a fixed contract that the
// test-suite relies on:
//
// annotate: label = argmax over labels of |words(text) ∩ words(definition)|,
//   ties to the smallest value; confidence 0.95 for a unique argmax, 0.55 for
//   ties (including zero overlap). If the text contains "@@amb" and no
//   handling rule mentions it: confidence 0.50, smallest label, and the edge
//   rule ("text contains the @@amb ambiguity marker", "assign label <largest>").
//   If a rule mentions "@@amb": confidence 0.95, largest label.
//
// summarize: "when the text involves <w1, w2, w3>, do <action>" where w are
//   the three most frequent non-stopword words of the case descriptions
//   (ties alphabetical) and action is the most frequent whitespace-collapsed
//   action (ties lexicographic).
//
// merge: clusters whose suggested rules are equal after whitespace collapsing
//   (case-sensitive) share one group, in order of first appearance;
//   everything else passes through.
//
// embed: 64-dim signed feature hashing of byte trigrams of
//   "\x02" + text + "\x03", keyed by the seed, then L2-normalized.
class MockProvider final : public Provider {
 public:
  explicit MockProvider(std::uint64_t seed) : seed_(seed) {}

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

  [[nodiscard]] Vector embed_one(std::string_view text) const;

 private:
  std::uint64_t seed_;
};

}  // namespace edgebook::provider
