#include "edgebook/provider/mock.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "edgebook/core/codebook.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"

namespace edgebook::provider {
namespace {

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::set<std::string> word_set(std::string_view s) {
  auto words = tokenize_words(s);
  return {words.begin(), words.end()};
}

}  // namespace

PromptView parse_codebook_prompt(std::string_view prompt) {
  const std::string labels_header = "\n" + std::string(kLabelsHeader) + "\n";
  const std::string rules_header = "\n" + std::string(kRulesHeader) + "\n";
  const auto labels_at = prompt.rfind(labels_header);
  if (labels_at == std::string_view::npos) {
    fail(ErrorCode::kInvalidArgument, "codebook prompt has no labels section");
  }
  std::string_view tail = prompt.substr(labels_at + labels_header.size());

  PromptView view;
  const auto rules_at = tail.find(rules_header);
  if (rules_at != std::string_view::npos) {
    view.rules_section = std::string(tail.substr(rules_at + rules_header.size()));
    tail = tail.substr(0, rules_at);
  }
  for (std::string_view line : split_lines(tail)) {
    if (line.empty()) break;
    const auto colon = line.find(": ");
    const auto sep = line.find(kLabelSeparator);
    if (colon == std::string_view::npos || sep == std::string_view::npos) continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + colon, value);
    if (ec != std::errc{} || ptr != line.data() + colon) continue;
    view.labels.push_back({value, std::string(line.substr(sep + kLabelSeparator.size()))});
  }
  if (view.labels.empty()) {
    fail(ErrorCode::kInvalidArgument, "codebook prompt lists no labels");
  }
  return view;
}

AnnotatorOutput MockProvider::annotate(std::string_view codebook_prompt,
                                       const Document& doc,
                                       const std::optional<std::string>&) {
  const PromptView view = parse_codebook_prompt(codebook_prompt);
  int smallest = view.labels.front().value;
  int largest = smallest;
  for (const auto& l : view.labels) {
    smallest = std::min(smallest, l.value);
    largest = std::max(largest, l.value);
  }

  AnnotatorOutput out;
  if (doc.text.find(kAmbiguityMarker) != std::string::npos) {
    if (view.rules_section.find(kAmbiguityMarker) != std::string::npos) {
      out.label = largest;
      out.confidence = 0.95;
      out.rationale = "mock: a handling rule covers the ambiguity marker";
    } else {
      out.label = smallest;
      out.confidence = 0.50;
      out.rationale = "mock: ambiguity marker present and no rule covers it";
      out.edge_rule = EdgeCaseRule{std::string(kMarkerCaseDescription),
                                   "assign label " + std::to_string(largest)};
    }
    return out;
  }

  const auto text_words = word_set(doc.text);
  std::map<int, std::size_t> overlap;
  for (const auto& l : view.labels) {
    const auto def_words = word_set(l.definition);
    std::size_t n = 0;
    for (const auto& w : def_words) n += text_words.count(w);
    overlap[l.value] = n;
  }
  std::size_t best = 0;
  for (const auto& [value, n] : overlap) best = std::max(best, n);
  int best_label = largest;
  int n_best = 0;
  for (const auto& [value, n] : overlap) {
    if (n == best) {
      if (n_best == 0) best_label = value;
      ++n_best;
    }
  }
  out.label = best_label;
  out.confidence = n_best == 1 ? 0.95 : 0.55;
  std::ostringstream why;
  why << "mock: definition word overlap";
  for (const auto& [value, n] : overlap) why << ' ' << value << '=' << n;
  out.rationale = why.str();
  return out;
}

ClusterSummary MockProvider::summarize(const std::vector<EdgeCaseRule>& cluster_rules,
                                       std::string_view,
                                       const std::optional<std::string>&) {
  if (cluster_rules.empty()) {
    fail(ErrorCode::kInvalidArgument, "summarize needs at least one rule");
  }
  std::map<std::string, int> word_counts;
  std::map<std::string, int> action_counts;
  for (const auto& rule : cluster_rules) {
    for (auto& w : tokenize_words(rule.case_description)) {
      if (!is_stopword(w)) ++word_counts[w];
    }
    ++action_counts[collapse_whitespace(rule.action)];
  }
  std::vector<std::pair<std::string, int>> ranked(word_counts.begin(), word_counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string involves;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
    if (i > 0) involves += ", ";
    involves += ranked[i].first;
  }
  if (involves.empty()) involves = "an unspecified ambiguity";

  // std::map iterates keys in order, so the first maximum is the
  // lexicographically smallest action.
  auto action = action_counts.begin();
  for (auto it = action_counts.begin(); it != action_counts.end(); ++it) {
    if (it->second > action->second) action = it;
  }

  ClusterSummary out;
  out.suggested_rule = {"the text involves " + involves, action->first};
  out.high_level_description = "when " + out.suggested_rule.case_description + ", do " +
                               out.suggested_rule.action;
  return out;
}

std::vector<MergeGroup> MockProvider::merge(const std::vector<EdgeCluster>& clusters,
                                            std::string_view,
                                            const std::optional<std::string>&) {
  std::vector<MergeGroup> groups;
  std::unordered_map<std::string, std::size_t> by_rule;
  for (const auto& c : clusters) {
    const std::string key = collapse_whitespace(c.suggested_rule.case_description) + '\x1f' +
                            collapse_whitespace(c.suggested_rule.action);
    auto [it, inserted] = by_rule.emplace(key, groups.size());
    if (inserted) {
      groups.push_back({{c.cluster_id}, c.high_level_description, c.suggested_rule});
    } else {
      groups[it->second].source_cluster_ids.push_back(c.cluster_id);
    }
  }
  return groups;
}

Vector MockProvider::embed_one(std::string_view text) const {
  std::string padded;
  padded.reserve(text.size() + 2);
  padded.push_back('\x02');
  padded.append(text);
  padded.push_back('\x03');

  Vector v(kMockEmbeddingDim, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::uint64_t h = splitmix64(fnv1a64(std::string_view(padded).substr(i, 3)) ^ seed_);
    v[h % kMockEmbeddingDim] += ((h >> 32) & 1u) ? 1.0 : -1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    // Every trigram cancelled out; fall back to a one-hot on the whole text.
    v[splitmix64(fnv1a64(text) ^ seed_) % kMockEmbeddingDim] = 1.0;
    return v;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<Vector> MockProvider::embed(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

std::string MockProvider::fingerprint() const {
  return "mock/v1 seed=" + std::to_string(seed_);
}

}  // namespace edgebook::provider
