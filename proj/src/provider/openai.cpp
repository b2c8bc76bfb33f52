#include "edgebook/provider/openai.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>

#include "edgebook/core/errors.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/core/text.hpp"
#include "edgebook/embedded_templates.hpp"

namespace edgebook::provider {
namespace {

[[noreturn]] void malformed(const std::string& msg) {
  fail(ErrorCode::kMalformedResponse, msg);
}

Json parse_object(std::string_view content) {
  Json j;
  try {
    j = Json::parse(extract_json_object(content));
  } catch (const Json::exception& e) {
    malformed(std::string("reply is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) malformed("reply must be a JSON object");
  return j;
}

std::string required_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    malformed(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

EdgeCaseRule rule_fields(const Json& j) {
  EdgeCaseRule r{required_string(j, "case_description"), required_string(j, "action")};
  if (is_blank(r.case_description) || is_blank(r.action)) {
    malformed("case_description and action must be non-empty");
  }
  return r;
}

std::string repair_block(const std::optional<std::string>& hint) {
  if (!hint) return "";
  return "\n# Your previous reply was rejected\n\n" + *hint +
         "\n\nReply again with a corrected JSON object.\n";
}

std::string template_digest() {
  std::string all;
  for (auto t : {embedded::annotate_system, embedded::annotate_user,
                 embedded::summarize_system, embedded::summarize_user, embedded::merge_system,
                 embedded::merge_user}) {
    all.append(t);
    all.push_back('\0');
  }
  return sha256_hex(all).substr(0, 12);
}

}  // namespace

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    if (auto it = vars.find(key); it != vars.end()) {
      out.append(it->second);
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(tmpl.substr(std::min(pos, tmpl.size())));
  return out;
}

std::string extract_json_object(std::string_view content) {
  const auto first = content.find('{');
  const auto last = content.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
    malformed("reply contains no JSON object");
  }
  return std::string(content.substr(first, last - first + 1));
}

AnnotatorOutput parse_annotation_reply(std::string_view content) {
  const Json j = parse_object(content);
  AnnotatorOutput out;

  const auto label = j.find("label");
  if (label == j.end() || !label->is_number()) malformed("field 'label' must be an integer");
  if (label->is_number_float()) {
    const double v = label->get<double>();
    if (!std::isfinite(v) || std::floor(v) != v) malformed("field 'label' must be an integer");
    out.label = static_cast<int>(v);
  } else {
    out.label = label->get<int>();
  }

  const auto conf = j.find("confidence");
  if (conf == j.end() || !conf->is_number()) malformed("field 'confidence' must be a number");
  out.confidence = conf->get<double>();
  if (!std::isfinite(out.confidence) || out.confidence < 0.0 || out.confidence > 1.0) {
    malformed("field 'confidence' must be in [0,1]");
  }

  out.rationale = required_string(j, "rationale");

  const auto edge = j.find("edge_case");
  if (edge != j.end() && !edge->is_null()) {
    if (!edge->is_object()) malformed("field 'edge_case' must be an object or null");
    out.edge_rule = rule_fields(*edge);
  }
  return out;
}

ClusterSummary parse_summary_reply(std::string_view content) {
  const Json j = parse_object(content);
  ClusterSummary s;
  s.high_level_description = required_string(j, "high_level_description");
  if (is_blank(s.high_level_description)) malformed("high_level_description is empty");
  s.suggested_rule = rule_fields(j);
  return s;
}

std::vector<MergeGroup> parse_merge_reply(std::string_view content) {
  const Json j = parse_object(content);
  const auto merged = j.find("merged");
  if (merged == j.end() || !merged->is_array()) malformed("field 'merged' must be an array");
  std::vector<MergeGroup> groups;
  for (const auto& entry : *merged) {
    if (!entry.is_object()) malformed("entries of 'merged' must be objects");
    MergeGroup g;
    const auto ids = entry.find("source_cluster_ids");
    if (ids == entry.end() || !ids->is_array()) {
      malformed("field 'source_cluster_ids' must be an array");
    }
    for (const auto& id : *ids) {
      if (!id.is_string()) malformed("cluster ids must be strings");
      g.source_cluster_ids.push_back(id.get<std::string>());
    }
    g.high_level_description = required_string(entry, "high_level_description");
    g.suggested_rule = rule_fields(entry);
    groups.push_back(std::move(g));
  }
  return groups;
}

BaseUrl split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "base_url must start with http:// or https://");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorCode::kInvalidArgument, "base_url must start with http:// or https://");
  }
  const auto path_at = url.find('/', scheme_end + 3);
  BaseUrl b;
  b.origin = url.substr(0, path_at);
  b.path_prefix = path_at == std::string::npos ? "" : url.substr(path_at);
  while (!b.path_prefix.empty() && b.path_prefix.back() == '/') b.path_prefix.pop_back();
  return b;
}

OpenAiProvider::OpenAiProvider(ProviderConfig config)
    : config_(std::move(config)), base_(split_base_url(config_.base_url.value_or(""))) {
  validate(config_);
}

std::string OpenAiProvider::post(const std::string& path, const std::string& body) {
  httplib::Client client(base_.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      config_.request_timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_bearer_token_auth(config_.api_key.value_or(""));

  auto res = client.Post(base_.path_prefix + path, body, "application/json");
  if (!res) {
    fail(ErrorCode::kProviderUnavailable,
         "request to " + base_.origin + base_.path_prefix + path + " failed: " +
             httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    fail(ErrorCode::kProviderUnavailable,
         "request to " + path + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string OpenAiProvider::chat(const std::string& model, std::string_view system,
                                 const std::string& user, bool json_mode) {
  Json req = {{"model", model},
              {"messages",
               Json::array({{{"role", "system"}, {"content", std::string(system)}},
                            {{"role", "user"}, {"content", user}}})},
              {"seed", config_.seed}};
  if (json_mode) {
    req["temperature"] = 0;
    req["response_format"] = {{"type", "json_object"}};
  }
  const std::string body = post("/chat/completions", req.dump());
  Json res;
  try {
    res = Json::parse(body);
    const auto& content = res.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) malformed("chat reply has no text content");
    return content.get<std::string>();
  } catch (const Json::exception& e) {
    malformed(std::string("unexpected chat completion body: ") + e.what());
  }
}

AnnotatorOutput OpenAiProvider::annotate(std::string_view codebook_prompt, const Document& doc,
                                         const std::optional<std::string>& repair_hint) {
  const std::string user =
      render_template(embedded::annotate_user, {{"codebook", std::string(codebook_prompt)},
                                                {"text", doc.text},
                                                {"repair", repair_block(repair_hint)}});
  return parse_annotation_reply(chat(config_.annotator_model, embedded::annotate_system, user,
                                     true));
}

ClusterSummary OpenAiProvider::summarize(const std::vector<EdgeCaseRule>& cluster_rules,
                                         std::string_view codebook_prompt,
                                         const std::optional<std::string>& repair_hint) {
  std::string rules;
  for (std::size_t i = 0; i < cluster_rules.size(); ++i) {
    rules += std::to_string(i + 1) + ". When " + collapse_whitespace(cluster_rules[i].case_description) +
             ", do " + collapse_whitespace(cluster_rules[i].action) + "\n";
  }
  const std::string user = render_template(
      embedded::summarize_user, {{"codebook", std::string(codebook_prompt)},
                                 {"rules", rules},
                                 {"repair", repair_block(repair_hint)}});
  return parse_summary_reply(chat(config_.reasoner_model, embedded::summarize_system, user,
                                  false));
}

std::vector<MergeGroup> OpenAiProvider::merge(const std::vector<EdgeCluster>& clusters,
                                              std::string_view codebook_prompt,
                                              const std::optional<std::string>& repair_hint) {
  Json list = Json::array();
  for (const auto& c : clusters) {
    list.push_back({{"id", c.cluster_id},
                    {"high_level_description", c.high_level_description},
                    {"case_description", c.suggested_rule.case_description},
                    {"action", c.suggested_rule.action}});
  }
  const std::string user = render_template(
      embedded::merge_user, {{"codebook", std::string(codebook_prompt)},
                             {"clusters", list.dump(2)},
                             {"repair", repair_block(repair_hint)}});
  return parse_merge_reply(chat(config_.reasoner_model, embedded::merge_system, user, false));
}

std::vector<Vector> OpenAiProvider::embed(const std::vector<std::string>& texts) {
  const Json req = {{"model", config_.embed_model}, {"input", texts}};
  const std::string body = post("/embeddings", req.dump());
  try {
    const Json res = Json::parse(body);
    const auto& data = res.at("data");
    if (!data.is_array() || data.size() != texts.size()) {
      malformed("embeddings reply has the wrong number of vectors");
    }
    std::vector<Vector> out(texts.size());
    std::vector<bool> seen(texts.size(), false);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data[i];
      const std::size_t index = item.contains("index") ? item.at("index").get<std::size_t>() : i;
      if (index >= out.size() || seen[index]) malformed("embeddings reply has bad indices");
      seen[index] = true;
      out[index] = item.at("embedding").get<Vector>();
    }
    return out;
  } catch (const Json::exception& e) {
    malformed(std::string("unexpected embeddings body: ") + e.what());
  }
}

std::string OpenAiProvider::fingerprint() const {
  return "openai_compatible/v1 annotator=" + config_.annotator_model +
         " reasoner=" + config_.reasoner_model + " embed=" + config_.embed_model +
         " templates=" + template_digest();
}

}  // namespace edgebook::provider
