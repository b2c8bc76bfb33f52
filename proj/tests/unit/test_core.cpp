#include <doctest.h>

#include <random>

#include "edgebook/core/codebook.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/core/text.hpp"
#include "edgebook/core/types.hpp"

using namespace edgebook;

namespace {

Codebook base_codebook() {
  Codebook cb;
  cb.task_id = "t1";
  cb.version = 0;
  cb.task_description = "Decide whether a post is toxic.";
  cb.labels = {{0, "clean", "no insults"}, {1, "toxic", "insults or threats"}};
  return cb;
}

const EdgeCaseRule r1{"the post quotes someone else", "label the quoted speaker's intent"};
const EdgeCaseRule r2{"sarcasm is present", "label the literal meaning"};
const EdgeCaseRule r3{"the post is a question", "label 0 unless it contains an insult"};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an edgebook::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("text normalization") {
  CHECK(collapse_whitespace("  a \t b\n\nc  ") == "a b c");
  CHECK(normalize_key(" Foo   BAR ") == "foo bar");
  CHECK(rule_key("a  b", "C") == rule_key("A b", " c "));
  CHECK(rule_key("a b", "c") != rule_key("a", "b c"));
  CHECK(tokenize_words("The @@amb marker, isn't IT?") ==
        std::vector<std::string>{"the", "@@amb", "marker", "isn", "t", "it"});
  CHECK(is_blank(" \n\t"));
  CHECK_FALSE(is_blank(" x "));
}

TEST_CASE("sha256 known vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("compose_codebook appends to an empty list") {
  const Codebook v1 = compose_codebook(base_codebook(), {r1});
  CHECK(v1.version == 1);
  CHECK(v1.parent_version == 0);
  CHECK(v1.handling_rules == std::vector<EdgeCaseRule>{r1});
}

TEST_CASE("compose_codebook drops an exact duplicate") {
  const Codebook v1 = compose_codebook(base_codebook(), {r1});
  const Codebook v2 = compose_codebook(v1, {r1});
  CHECK(v2.version == 2);
  CHECK(v2.parent_version == 1);
  CHECK(v2.handling_rules == std::vector<EdgeCaseRule>{r1});
}

TEST_CASE("compose_codebook preserves order") {
  Codebook v0 = base_codebook();
  v0.handling_rules = {r1};
  const Codebook v1 = compose_codebook(v0, {r2, r3});
  CHECK(v1.handling_rules == std::vector<EdgeCaseRule>{r1, r2, r3});
  CHECK(v1.task_description == v0.task_description);
  CHECK(v1.labels == v0.labels);
}

TEST_CASE("compose_codebook dedupes case-insensitively after collapsing whitespace") {
  const Codebook v1 = compose_codebook(base_codebook(), {r1});
  const EdgeCaseRule shouty{"  THE post   quotes someone else", "Label the quoted speaker's intent "};
  CHECK(compose_codebook(v1, {shouty}).handling_rules.size() == 1);
}

TEST_CASE("compose_codebook rejects blank rules") {
  CHECK(code_of([] { (void)compose_codebook(base_codebook(), {{"x", "  "}}); }) ==
        ErrorCode::kEmptyRule);
  CHECK(code_of([] { (void)compose_codebook(base_codebook(), {{"", "y"}}); }) ==
        ErrorCode::kEmptyRule);
}

TEST_CASE("compose_codebook never removes or reorders existing rules") {
  std::mt19937 rng(3);
  const std::vector<EdgeCaseRule> pool = {r1, r2, r3, {"a", "b"}, {"c", "d"}, {"A ", "B"}};
  Codebook cb = base_codebook();
  for (int step = 0; step < 30; ++step) {
    std::vector<EdgeCaseRule> accept;
    const int m = static_cast<int>(rng() % 3);
    for (int i = 0; i < m; ++i) accept.push_back(pool[rng() % pool.size()]);
    const Codebook next = compose_codebook(cb, accept);
    REQUIRE(next.handling_rules.size() >= cb.handling_rules.size());
    for (std::size_t i = 0; i < cb.handling_rules.size(); ++i) {
      CHECK(next.handling_rules[i] == cb.handling_rules[i]);
    }
    cb = next;
  }
  CHECK(cb.version == 30);
}

TEST_CASE("update_codebook bumps the version and keeps the base intact") {
  const Codebook v0 = base_codebook();
  CodebookEdit edit;
  edit.task_description = "New description";
  const Codebook v1 = update_codebook(v0, edit);
  CHECK(v1.version == 1);
  CHECK(v1.parent_version == 0);
  CHECK(v1.task_description == "New description");
  CHECK(v0.task_description == "Decide whether a post is toxic.");

  CHECK(code_of([&] { (void)update_codebook(v0, CodebookEdit{}); }) ==
        ErrorCode::kInvalidArgument);

  CodebookEdit bad_labels;
  bad_labels.labels = std::vector<LabelDef>{{0, "only", ""}};
  CHECK(code_of([&] { (void)update_codebook(v0, bad_labels); }) ==
        ErrorCode::kInvalidArgument);

  CodebookEdit dup_rules;
  dup_rules.handling_rules = std::vector<EdgeCaseRule>{r1, r2, r1};
  CHECK(update_codebook(v0, dup_rules).handling_rules == std::vector<EdgeCaseRule>{r1, r2});
}

TEST_CASE("version chain reaches 0 in exactly `version` steps") {
  std::vector<Codebook> chain{base_codebook()};
  for (int i = 0; i < 6; ++i) {
    if (i % 2 == 0) {
      chain.push_back(compose_codebook(chain.back(), {{"case " + std::to_string(i), "act"}}));
    } else {
      CodebookEdit e;
      e.task_description = "desc " + std::to_string(i);
      chain.push_back(update_codebook(chain.back(), e));
    }
  }
  for (const auto& cb : chain) {
    int steps = 0;
    const Codebook* cur = &cb;
    while (cur->parent_version) {
      cur = &chain.at(*cur->parent_version);
      ++steps;
    }
    CHECK(cur->version == 0);
    CHECK(steps == cb.version);
  }
}

TEST_CASE("codebook invariants") {
  Codebook cb = base_codebook();
  cb.labels = {{0, "a", ""}};
  CHECK_THROWS_AS(validate(cb), Error);
  cb = base_codebook();
  cb.labels.push_back({1, "dup", ""});
  CHECK_THROWS_AS(validate(cb), Error);
  cb = base_codebook();
  cb.labels[0].value = -1;
  CHECK_THROWS_AS(validate(cb), Error);
  cb = base_codebook();
  cb.labels[0].name = " ";
  CHECK_THROWS_AS(validate(cb), Error);
  cb = base_codebook();
  cb.parent_version = 0;
  CHECK_THROWS_AS(validate(cb), Error);
  cb = base_codebook();
  cb.version = 2;
  CHECK_THROWS_AS(validate(cb), Error);
  cb.parent_version = 1;
  CHECK_NOTHROW(validate(cb));
  cb.handling_rules = {r1, {" the post quotes SOMEONE else", "label the quoted speaker's intent"}};
  CHECK_THROWS_AS(validate(cb), Error);
}

TEST_CASE("render_prompt_codebook") {
  SUBCASE("determinism") {
    CHECK(render_prompt_codebook(base_codebook()) == render_prompt_codebook(base_codebook()));
  }
  SUBCASE("no rules, no handling section") {
    const std::string text = render_prompt_codebook(base_codebook());
    CHECK(text.find("Edge Case Handling") == std::string::npos);
    CHECK(text.find("0: clean — no insults\n") != std::string::npos);
    CHECK(text.find("1: toxic — insults or threats\n") != std::string::npos);
    CHECK(text.find("Decide whether a post is toxic.") < text.find("0: clean"));
  }
  SUBCASE("rules are numbered in insertion order") {
    Codebook cb = base_codebook();
    cb.handling_rules = {r2, r1};
    const std::string text = render_prompt_codebook(cb);
    const auto section = text.find("## Edge Case Handling");
    const auto first = text.find("1. When sarcasm is present, do label the literal meaning");
    const auto second = text.find("2. When the post quotes someone else, do label the quoted");
    REQUIRE(section != std::string::npos);
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    CHECK(text.find("1: toxic") < section);
    CHECK(section < first);
    CHECK(first < second);
  }
  SUBCASE("multi-line fields collapse to one line") {
    Codebook cb = base_codebook();
    cb.labels[0].definition = "no\ninsults";
    CHECK(render_prompt_codebook(cb).find("0: clean — no insults\n") != std::string::npos);
  }
}

TEST_CASE("annotation confidence is rejected out of range, not clamped") {
  CHECK_NOTHROW(make_annotation("d", 0, 0.0, "", std::nullopt, 0));
  CHECK_NOTHROW(make_annotation("d", 0, 1.0, "", std::nullopt, 0));
  CHECK_THROWS_AS(make_annotation("d", 0, 1.0000001, "", std::nullopt, 0), Error);
  CHECK_THROWS_AS(make_annotation("d", 0, -0.1, "", std::nullopt, 0), Error);
  CHECK_THROWS_AS(make_annotation("d", 0, std::nan(""), "", std::nullopt, 0), Error);
  CHECK(make_annotation("d", 0, 0.25, "", std::nullopt, 0).uncertainty() == doctest::Approx(0.75));

  const AnnotationRecord rec = make_annotation("d", 7, 0.5, "", std::nullopt, 0);
  CHECK(code_of([&] { validate_against(rec, base_codebook()); }) == ErrorCode::kUnknownLabel);
}

TEST_CASE("corpus invariants") {
  CHECK(code_of([] { validate_corpus({}); }) == ErrorCode::kEmptyCorpus);
  CHECK_THROWS_AS(validate_corpus({{"a", "x", {}}, {"a", "y", {}}}), Error);
  CHECK_THROWS_AS(validate_corpus({{"a", "  ", {}}}), Error);
  CHECK_NOTHROW(validate_corpus({{"a", "x", 1}, {"b", "y", {}}}));
}

TEST_CASE("task id charset") {
  CHECK(is_valid_task_id("abc_DEF-09"));
  CHECK_FALSE(is_valid_task_id("a/b"));
  CHECK_FALSE(is_valid_task_id(""));
  CHECK_FALSE(is_valid_task_id(std::string(65, 'a')));
  CHECK(is_valid_task_id(std::string(64, 'a')));
}

TEST_CASE("merge partition check") {
  const std::vector<EdgeCluster> clusters = {
      {"c0", {"a"}, "d", r1}, {"c1", {"b"}, "d", r1}, {"c2", {"c"}, "d", r2}};
  std::vector<MergedEdgeCase> merged = {{"m0", {"c0", "c1"}, "d", r1, {"a", "b"}},
                                        {"m1", {"c2"}, "d", r2, {"c"}}};
  CHECK_NOTHROW(validate_merge_partition(clusters, merged));
  merged[1].source_cluster_ids = {"c2", "c0"};
  CHECK(code_of([&] { validate_merge_partition(clusters, merged); }) ==
        ErrorCode::kPartitionViolation);
  merged[1].source_cluster_ids = {};
  merged.pop_back();
  CHECK_THROWS_AS(validate_merge_partition(clusters, merged), Error);
}

namespace {

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"alpha", "beta", "  ", "ü", "\"q\"", "\n", "x,y"};
  std::string s = "w";
  const int n = static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) s += words[rng() % words.size()];
  return s;
}

IterationRecord random_record(std::mt19937_64& rng) {
  IterationRecord rec;
  rec.task_id = "task";
  rec.iteration = static_cast<int>(rng() % 5);
  rec.codebook_version = static_cast<int>(rng() % 3);
  rec.edge_threshold = 0.8;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) {
    std::optional<EdgeCaseRule> rule;
    if (rng() % 2) rule = EdgeCaseRule{random_text(rng), random_text(rng)};
    rec.annotations.push_back(make_annotation("d" + std::to_string(i), static_cast<int>(rng() % 2),
                                              unit(rng), random_text(rng), rule,
                                              rec.codebook_version));
    rec.projection.push_back({"d" + std::to_string(i), unit(rng) - 0.5, unit(rng) * 1e-300,
                              1.0 - rec.annotations.back().confidence, rec.annotations.back().label});
  }
  rec.clusters.push_back({"c0", {"d0"}, random_text(rng), {"a", "b"}});
  rec.merged.push_back({"m0", {"c0"}, random_text(rng), {"a", "b"}, {"d0"}});
  if (rng() % 2) {
    rec.metrics = Metrics{{{0, 0.5, 1.0, 2.0 / 3.0, 3}}, 0, 2.0 / 3.0, 3, {{1, 2}, {0, 0}}};
  }
  rec.diagnostics.warnings = {random_text(rng)};
  rec.created_at = "2026-01-01T00:00:00Z";
  rec.provider_fingerprint = "mock";
  return rec;
}

}  // namespace

TEST_CASE("iteration record JSON round-trip is identity") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const IterationRecord rec = random_record(rng);
    const std::string text = Json(rec).dump();
    const auto back = Json::parse(text).get<IterationRecord>();
    CHECK(back == rec);
    CHECK(Json(back).dump() == text);
  }
}

TEST_CASE("codebook and document JSON round-trip") {
  Codebook cb = compose_codebook(base_codebook(), {r1, r2});
  CHECK(Json(cb).get<Codebook>() == cb);
  const Document doc{"d1", "text é", 1};
  CHECK(Json(doc).get<Document>() == doc);
  const Document no_gold{"d2", "text", std::nullopt};
  CHECK(Json(no_gold).get<Document>() == no_gold);
  CHECK(Json(no_gold)["gold_label"].is_null());
}

TEST_CASE("deserialization validates") {
  Json j = base_codebook();
  j["labels"] = Json::array({Json{{"value", 0}, {"name", "a"}, {"definition", ""}}});
  CHECK_THROWS_AS(j.get<Codebook>(), Error);
  Json a = make_annotation("d", 0, 0.5, "", std::nullopt, 0);
  a["confidence"] = 1.5;
  CHECK_THROWS_AS(a.get<AnnotationRecord>(), Error);
}

TEST_CASE("user codebook files fill defaults") {
  const Json j = Json::parse(R"({"task_description": "t", "labels": [
      {"value": 0, "name": "a", "definition": "x"}, {"value": 1, "name": "b", "definition": "y"}]})");
  const Codebook cb = codebook_from_user_json(j, "demo");
  CHECK(cb.task_id == "demo");
  CHECK(cb.version == 0);
  CHECK(cb.handling_rules.empty());
}
