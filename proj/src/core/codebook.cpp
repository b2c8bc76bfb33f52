#include "edgebook/core/codebook.hpp"

#include <sstream>
#include <unordered_set>

#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"

namespace edgebook {

std::vector<EdgeCaseRule> dedupe_rules(std::vector<EdgeCaseRule> rules) {
  std::vector<EdgeCaseRule> out;
  out.reserve(rules.size());
  std::unordered_set<std::string> seen;
  for (auto& rule : rules) {
    validate(rule);
    if (!seen.insert(rule_key(rule.case_description, rule.action)).second) {
      continue;
    }
    out.push_back(std::move(rule));
  }
  return out;
}

Codebook compose_codebook(const Codebook& base,
                          const std::vector<EdgeCaseRule>& accepted) {
  std::vector<EdgeCaseRule> rules = base.handling_rules;
  for (const auto& rule : accepted) {
    validate(rule);
    rules.push_back({trim(rule.case_description), trim(rule.action)});
  }

  Codebook next = base;
  next.version = base.version + 1;
  next.parent_version = base.version;
  next.handling_rules = dedupe_rules(std::move(rules));
  validate(next);
  return next;
}

Codebook update_codebook(const Codebook& base, const CodebookEdit& edit) {
  if (edit.empty()) {
    fail(ErrorCode::kInvalidArgument, "codebook edit changes nothing");
  }
  Codebook next = base;
  next.version = base.version + 1;
  next.parent_version = base.version;
  if (edit.task_description) next.task_description = *edit.task_description;
  if (edit.labels) next.labels = *edit.labels;
  if (edit.handling_rules) {
    std::vector<EdgeCaseRule> rules;
    for (const auto& rule : *edit.handling_rules) {
      validate(rule);
      rules.push_back({trim(rule.case_description), trim(rule.action)});
    }
    next.handling_rules = dedupe_rules(std::move(rules));
  }
  validate(next);
  return next;
}

std::string render_prompt_codebook(const Codebook& codebook) {
  std::ostringstream out;
  out << "## Task\n" << trim(codebook.task_description) << "\n\n";
  out << kLabelsHeader << '\n';
  for (const auto& label : codebook.labels) {
    out << label.value << ": " << collapse_whitespace(label.name)
        << kLabelSeparator << collapse_whitespace(label.definition) << '\n';
  }
  if (!codebook.handling_rules.empty()) {
    out << '\n' << kRulesHeader << '\n';
    int n = 1;
    for (const auto& rule : codebook.handling_rules) {
      out << n++ << ". When " << collapse_whitespace(rule.case_description)
          << ", do " << collapse_whitespace(rule.action) << '\n';
    }
  }
  return out.str();
}

}  // namespace edgebook
