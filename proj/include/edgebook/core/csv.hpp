#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edgebook/core/types.hpp"

namespace edgebook {

// Raw RFC 4180 records. Accepts LF or CRLF line ends and a leading UTF-8
// BOM. Throws Error(kInvalidArgument) on an unterminated quote. Pass '\t'
// for quoted TSV.
[[nodiscard]] std::vector<std::vector<std::string>> parse_csv(std::string_view data,
                                                               char delimiter = ',');

// Corpus upload contract: a header row naming `text` (required), `id` and
// `gold_label` (optional); other columns are ignored. Without an id column
// documents are numbered by 0-based row index. Empty gold cells mean no gold
// label. Throws kEmptyCorpus when there are no data rows and
// kInvalidArgument for a missing text column, ragged rows, bad labels,
// blank texts or duplicate ids.
[[nodiscard]] std::vector<Document> parse_corpus_csv(std::string_view data);

// Writes id,text[,gold_label]; the gold column appears if any document has one.
[[nodiscard]] std::string write_corpus_csv(const std::vector<Document>& docs);

}  // namespace edgebook
