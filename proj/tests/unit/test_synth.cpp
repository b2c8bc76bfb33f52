#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "edgebook/core/codebook.hpp"
#include "edgebook/core/csv.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"
#include "edgebook/provider/mock.hpp"
#include "edgebook/synth/demo.hpp"

using namespace edgebook;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

std::size_t marked(const std::vector<Document>& docs) {
  return static_cast<std::size_t>(std::count_if(docs.begin(), docs.end(), [](const Document& d) {
    return d.text.find("@@amb") != std::string::npos;
  }));
}

}  // namespace

TEST_CASE("csv parsing") {
  const auto docs = parse_corpus_csv(
      "\xEF\xBB\xBFid,text,gold_label,extra\r\n"
      "a,\"hello, world\",1,x\r\n"
      "b,\"multi\nline \"\"quoted\"\"\",,y\r\n"
      "c,plain,0,z\r\n");
  REQUIRE(docs.size() == 3);
  CHECK(docs[0] == Document{"a", "hello, world", 1});
  CHECK(docs[1] == Document{"b", "multi\nline \"quoted\"", std::nullopt});
  CHECK(docs[2] == Document{"c", "plain", 0});

  const auto numbered = parse_corpus_csv("text\nfirst\nsecond\n\n");
  REQUIRE(numbered.size() == 2);
  CHECK(numbered[0].doc_id == "0");
  CHECK(numbered[1].doc_id == "1");

  CHECK(code_of([] { (void)parse_corpus_csv(""); }) == ErrorCode::kEmptyCorpus);
  CHECK(code_of([] { (void)parse_corpus_csv("id,text\n"); }) == ErrorCode::kEmptyCorpus);
  CHECK(code_of([] { (void)parse_corpus_csv("id,body\n1,x\n"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)parse_corpus_csv("id,text\n1,x\n1,y\n"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)parse_corpus_csv("id,text\n1,x,extra\n"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)parse_corpus_csv("text,gold_label\nx,pos\n"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)parse_corpus_csv("text\n\"open\n"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)parse_corpus_csv("text\n   \n"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("csv writer round-trips") {
  const std::vector<Document> docs = {{"a,1", "say \"hi\"", 1},
                                      {"b", "line\nbreak", std::nullopt},
                                      {"c", "plain", 0}};
  CHECK(parse_corpus_csv(write_corpus_csv(docs)) == docs);
  const std::vector<Document> no_gold = {{"x", "y", std::nullopt}};
  CHECK(write_corpus_csv(no_gold) == "id,text\nx,y\n");
}

TEST_CASE("demo corpus is deterministic") {
  const auto a = synth::generate_demo(200, 0.2, 7);
  const auto b = synth::generate_demo(200, 0.2, 7);
  CHECK(write_corpus_csv(a.corpus) == write_corpus_csv(b.corpus));
  CHECK(a.codebook == b.codebook);
  CHECK(write_corpus_csv(synth::generate_demo(200, 0.2, 8).corpus) != write_corpus_csv(a.corpus));
}

TEST_CASE("demo corpus marker count and gold labels") {
  const auto demo = synth::generate_demo(200, 0.2, 7);
  CHECK(demo.corpus.size() == 200);
  CHECK(marked(demo.corpus) == 40);
  for (const auto& d : demo.corpus) {
    REQUIRE(d.gold_label);
    if (d.text.find("@@amb") != std::string::npos) CHECK(*d.gold_label == 1);
  }
  CHECK(marked(synth::generate_demo(200, 0.0, 7).corpus) == 0);
  CHECK(marked(synth::generate_demo(37, 0.29, 1).corpus) == 10);
  CHECK(marked(synth::generate_demo(10, 1.0, 1).corpus) == 10);
  CHECK(demo.codebook.handling_rules.empty());
  CHECK_NOTHROW(validate(demo.codebook));
  CHECK(demo.codebook.label_values() == std::vector<int>{0, 1});
}

TEST_CASE("demo corpus satisfies the CSV contract") {
  const auto demo = synth::generate_demo(120, 0.3, 3);
  CHECK(parse_corpus_csv(write_corpus_csv(demo.corpus)) == demo.corpus);
}

TEST_CASE("mock labels plain demo documents correctly") {
  provider::MockProvider mock(7);
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    const auto demo = synth::generate_demo(150, 0.25, seed);
    const std::string prompt = render_prompt_codebook(demo.codebook);
    for (const auto& d : demo.corpus) {
      const auto out = mock.annotate(prompt, d, std::nullopt);
      if (d.text.find("@@amb") != std::string::npos) {
        CHECK(out.confidence == 0.5);
        CHECK(out.label == 0);
      } else {
        CAPTURE(d.text);
        CHECK(out.label == *d.gold_label);
        CHECK(out.confidence == 0.95);
      }
    }
  }
}

TEST_CASE("filler words never touch a single definition") {
  const auto demo = synth::generate_demo(400, 0.2, 11);
  const auto defs0 = tokenize_words(demo.codebook.labels[0].definition);
  const auto defs1 = tokenize_words(demo.codebook.labels[1].definition);
  const std::set<std::string> w0(defs0.begin(), defs0.end()), w1(defs1.begin(), defs1.end());
  for (const auto& d : demo.corpus) {
    if (d.text.find("@@amb") != std::string::npos) continue;
    int only0 = 0, only1 = 0;
    for (const auto& w : tokenize_words(d.text)) {
      only0 += w0.count(w) && !w1.count(w);
      only1 += w1.count(w) && !w0.count(w);
    }
    CAPTURE(d.text);
    CHECK(only0 + only1 == 2);
    CHECK((only0 == 0 || only1 == 0));
  }
}

TEST_CASE("demo input validation") {
  CHECK(code_of([] { (void)synth::generate_demo(9, 0.2, 1); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)synth::generate_demo(50, 1.5, 1); }) == ErrorCode::kInvalidArgument);
}
