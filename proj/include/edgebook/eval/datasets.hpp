#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edgebook/core/types.hpp"

// Converters from the public benchmark file formats to the corpus contract.
// The datasets themselves are not shipped; point these at local copies.
namespace edgebook::eval {

enum class GoEmotionsTarget { kPositive, kNegative };

[[nodiscard]] GoEmotionsTarget parse_goemotions_target(const std::string& name);

// The 28 GoEmotions categories in the id order of the released emotions.txt.
[[nodiscard]] const std::vector<std::string>& goemotions_emotions();

// Emotions grouped under the dataset's own positive / negative sentiment
// mapping. Ambiguous emotions and neutral belong to neither group.
[[nodiscard]] const std::vector<std::string>& goemotions_group(GoEmotionsTarget target);

// Released TSV split (train.tsv, dev.tsv, test.tsv): unquoted
// "text<TAB>comma-separated emotion ids<TAB>comment id" lines. Gold label 1
// when any of the document's emotions is in the target group, else 0.
[[nodiscard]] std::vector<Document> convert_goemotions_tsv(std::string_view tsv,
                                                           GoEmotionsTarget target);

[[nodiscard]] Codebook goemotions_codebook(GoEmotionsTarget target,
                                           const std::string& task_id = "goemotions");

// Gab Hate Corpus TSV with a header row. Columns (case-insensitive): `text`,
// `hd` and `cv` are required; `id` is optional and `annotator` marks the
// per-annotator release. Gold label 1 when hd or cv is set. Per-annotator
// rows are grouped by id and labelled 1 when more than half of the
// annotators marked hd or cv.
[[nodiscard]] std::vector<Document> convert_ghc_tsv(std::string_view tsv);

[[nodiscard]] Codebook ghc_codebook(const std::string& task_id = "ghc");

}  // namespace edgebook::eval
