#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgebook/core/types.hpp"

namespace edgebook {

// Appends accepted handling rules to `base`, producing version base.version+1.
// Rules whose normalized (case_description, action) already occur are dropped;
// existing rules keep their order. Throws kEmptyRule on a blank field.
[[nodiscard]] Codebook compose_codebook(const Codebook& base,
                                        const std::vector<EdgeCaseRule>& accepted);

// A general edit. Absent fields are carried over from the base version.
struct CodebookEdit {
  std::optional<std::string> task_description;
  std::optional<std::vector<LabelDef>> labels;
  std::optional<std::vector<EdgeCaseRule>> handling_rules;

  [[nodiscard]] bool empty() const {
    return !task_description && !labels && !handling_rules;
  }
};

// Replaces the edited fields and bumps the version. Replacement rule lists
// are deduplicated the same way compose_codebook does.
[[nodiscard]] Codebook update_codebook(const Codebook& base, const CodebookEdit& edit);

// Removes later duplicates by normalized key, keeping first occurrences.
[[nodiscard]] std::vector<EdgeCaseRule> dedupe_rules(std::vector<EdgeCaseRule> rules);

// Canonical prompt text for providers:
//
//   ## Task
//   <task description>
//
//   ## Labels
//   <value>: <name> — <definition>
//
//   ## Edge Case Handling
//   1. When <case description>, do <action>
//
// The handling section is omitted when there are no rules. Label and rule
// fields are whitespace-collapsed so each occupies exactly one line.
[[nodiscard]] std::string render_prompt_codebook(const Codebook& codebook);

inline constexpr std::string_view kLabelSeparator = " — ";
inline constexpr std::string_view kLabelsHeader = "## Labels";
inline constexpr std::string_view kRulesHeader = "## Edge Case Handling";

}  // namespace edgebook
