#include "edgebook/core/csv.hpp"

#include <charconv>

#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"

namespace edgebook {
namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool is_blank_record(const std::vector<std::string>& r) { return r.size() == 1 && r[0].empty(); }

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view data, char delimiter) {
  if (data.substr(0, 3) == "\xEF\xBB\xBF") data.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  while (i < data.size()) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\n' || c == '\r') {
      end_record();
      if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) fail(ErrorCode::kInvalidArgument, "CSV has an unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::vector<Document> parse_corpus_csv(std::string_view data) {
  auto records = parse_csv(data);
  while (!records.empty() && is_blank_record(records.back())) records.pop_back();
  if (records.empty()) fail(ErrorCode::kEmptyCorpus, "CSV file is empty");

  int text_col = -1, id_col = -1, gold_col = -1;
  const auto& header = records.front();
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = to_lower_ascii(trim(header[c]));
    int* slot = name == "text" ? &text_col : name == "id" ? &id_col : name == "gold_label" ? &gold_col : nullptr;
    if (!slot) continue;
    if (*slot >= 0) fail(ErrorCode::kInvalidArgument, "CSV header repeats column '" + name + "'");
    *slot = static_cast<int>(c);
  }
  if (text_col < 0) fail(ErrorCode::kInvalidArgument, "CSV header has no 'text' column");

  std::vector<Document> docs;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (is_blank_record(row)) continue;
    const std::string where = "CSV row " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      fail(ErrorCode::kInvalidArgument, where + " has " + std::to_string(row.size()) +
                                            " fields, header has " + std::to_string(header.size()));
    }
    Document d;
    d.doc_id = id_col >= 0 ? trim(row[id_col]) : std::to_string(docs.size());
    if (d.doc_id.empty()) fail(ErrorCode::kInvalidArgument, where + " has an empty id");
    d.text = row[text_col];
    if (gold_col >= 0) {
      const std::string g = trim(row[gold_col]);
      if (!g.empty()) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), v);
        if (ec != std::errc{} || ptr != g.data() + g.size()) {
          fail(ErrorCode::kInvalidArgument, where + " has a non-integer gold_label '" + g + "'");
        }
        d.gold_label = v;
      }
    }
    docs.push_back(std::move(d));
  }
  if (docs.empty()) fail(ErrorCode::kEmptyCorpus, "CSV file has no data rows");
  validate_corpus(docs);
  return docs;
}

std::string write_corpus_csv(const std::vector<Document>& docs) {
  bool with_gold = false;
  for (const auto& d : docs) with_gold = with_gold || d.gold_label.has_value();
  std::string out = with_gold ? "id,text,gold_label\n" : "id,text\n";
  for (const auto& d : docs) {
    out += quote(d.doc_id) + "," + quote(d.text);
    if (with_gold) out += "," + (d.gold_label ? std::to_string(*d.gold_label) : std::string());
    out += "\n";
  }
  return out;
}

}  // namespace edgebook
