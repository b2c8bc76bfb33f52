#include "edgebook/eval/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>

#include "edgebook/core/csv.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"

namespace edgebook::eval {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::optional<int> parse_int(std::string_view s) {
  const std::string t = trim(s);
  int v = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// 0/1 flags, also accepting "0.0" / "1.0" as written by some exports.
bool parse_flag(const std::string& cell, std::size_t row, const char* column) {
  const std::string t = trim(cell);
  if (t == "1" || t == "1.0" || t == "True" || t == "true") return true;
  if (t == "0" || t == "0.0" || t == "False" || t == "false" || t.empty()) return false;
  fail(ErrorCode::kInvalidArgument,
       "row " + std::to_string(row) + ": column " + column + " is not a 0/1 flag");
}

}  // namespace

GoEmotionsTarget parse_goemotions_target(const std::string& name) {
  if (name == "positive") return GoEmotionsTarget::kPositive;
  if (name == "negative") return GoEmotionsTarget::kNegative;
  fail(ErrorCode::kInvalidArgument, "GoEmotions target must be positive or negative");
}

const std::vector<std::string>& goemotions_emotions() {
  static const std::vector<std::string> emotions = {
      "admiration", "amusement",   "anger",       "annoyance",      "approval", "caring",
      "confusion",  "curiosity",   "desire",      "disappointment", "disapproval",
      "disgust",    "embarrassment", "excitement", "fear",          "gratitude", "grief",
      "joy",        "love",        "nervousness", "optimism",       "pride",    "realization",
      "relief",     "remorse",     "sadness",     "surprise",       "neutral"};
  return emotions;
}

const std::vector<std::string>& goemotions_group(GoEmotionsTarget target) {
  static const std::vector<std::string> positive = {
      "admiration", "amusement", "approval", "caring",   "desire", "excitement",
      "gratitude",  "joy",       "love",     "optimism", "pride",  "relief"};
  static const std::vector<std::string> negative = {
      "anger",   "annoyance",   "disappointment", "disapproval", "disgust", "embarrassment",
      "fear",    "grief",       "nervousness",    "remorse",     "sadness"};
  return target == GoEmotionsTarget::kPositive ? positive : negative;
}

std::vector<Document> convert_goemotions_tsv(std::string_view tsv, GoEmotionsTarget target) {
  if (tsv.substr(0, 3) == "\xEF\xBB\xBF") tsv.remove_prefix(3);
  const auto& names = goemotions_emotions();
  const auto& group = goemotions_group(target);
  std::vector<bool> in_group(names.size(), false);
  for (std::size_t i = 0; i < names.size(); ++i) {
    in_group[i] = std::find(group.begin(), group.end(), names[i]) != group.end();
  }

  std::vector<Document> docs;
  std::size_t line_no = 0;
  for (auto line : split(tsv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_blank(line)) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3) {
      fail(ErrorCode::kInvalidArgument,
           "line " + std::to_string(line_no) + ": expected text, emotion ids and comment id");
    }
    bool hit = false;
    for (auto id_text : split(cols[1], ',')) {
      const auto id = parse_int(id_text);
      if (!id || *id < 0 || *id >= static_cast<int>(names.size())) {
        fail(ErrorCode::kInvalidArgument,
             "line " + std::to_string(line_no) + ": bad emotion id '" + std::string(id_text) + "'");
      }
      hit = hit || in_group[*id];
    }
    docs.push_back({trim(cols[2]), std::string(cols[0]), hit ? 1 : 0});
  }
  if (docs.empty()) fail(ErrorCode::kEmptyCorpus, "GoEmotions file has no rows");
  validate_corpus(docs);
  return docs;
}

Codebook goemotions_codebook(GoEmotionsTarget target, const std::string& task_id) {
  const bool pos = target == GoEmotionsTarget::kPositive;
  std::string listed;
  const auto& group = goemotions_group(target);
  for (std::size_t i = 0; i < group.size(); ++i) listed += (i ? ", " : "") + group[i];
  Codebook cb;
  cb.task_id = task_id;
  cb.task_description = std::string("Decide whether a Reddit comment expresses a ") +
                        (pos ? "positive" : "negative") + " emotion.";
  cb.labels = {{0, pos ? "not positive" : "not negative",
                std::string("the comment expresses no ") + (pos ? "positive" : "negative") +
                    " emotion; it is neutral, ambiguous or of the opposite sentiment"},
               {1, pos ? "positive" : "negative",
                "the comment expresses at least one of: " + listed}};
  return cb;
}

std::vector<Document> convert_ghc_tsv(std::string_view tsv) {
  const auto rows = parse_csv(tsv, '\t');
  if (rows.empty()) fail(ErrorCode::kEmptyCorpus, "GHC file is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[to_lower_ascii(trim(rows[0][i]))] = i;
  for (const char* need : {"text", "hd", "cv"}) {
    if (!col.count(need)) {
      fail(ErrorCode::kInvalidArgument, std::string("GHC header lacks a '") + need + "' column");
    }
  }
  const bool per_annotator = col.count("annotator") > 0;
  if (per_annotator && !col.count("id")) {
    fail(ErrorCode::kInvalidArgument, "per-annotator GHC rows need an id column");
  }

  struct Votes {
    std::string text;
    int hate = 0;
    int total = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Votes> by_id;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != rows[0].size()) {
      fail(ErrorCode::kInvalidArgument, "row " + std::to_string(r) + " has the wrong column count");
    }
    const std::string id = col.count("id") ? trim(row[col["id"]]) : std::to_string(order.size());
    const bool hate = parse_flag(row[col["hd"]], r, "hd") || parse_flag(row[col["cv"]], r, "cv");
    auto [it, fresh] = by_id.try_emplace(id);
    if (fresh) {
      order.push_back(id);
      it->second.text = row[col["text"]];
    } else if (!per_annotator) {
      fail(ErrorCode::kInvalidArgument, "duplicate id " + id);
    }
    it->second.hate += hate ? 1 : 0;
    it->second.total += 1;
  }
  std::vector<Document> docs;
  docs.reserve(order.size());
  for (const auto& id : order) {
    const auto& v = by_id.at(id);
    docs.push_back({id, v.text, 2 * v.hate > v.total ? 1 : 0});
  }
  if (docs.empty()) fail(ErrorCode::kEmptyCorpus, "GHC file has no rows");
  validate_corpus(docs);
  return docs;
}

Codebook ghc_codebook(const std::string& task_id) {
  Codebook cb;
  cb.task_id = task_id;
  cb.task_description = "Decide whether a social media post is hate speech.";
  cb.labels = {{0, "not hate", "the post neither assaults human dignity nor calls for violence"},
               {1, "hate",
                "the post assaults the dignity of people based on group identity, or calls for "
                "violence against them"}};
  return cb;
}

}  // namespace edgebook::eval
