#include <doctest.h>

#include <algorithm>
#include <random>

#include "edgebook/core/errors.hpp"
#include "edgebook/eval/metrics.hpp"

using namespace edgebook;
using namespace edgebook::eval;

namespace {

std::vector<Labeled> labeled(const std::vector<int>& labels) {
  std::vector<Labeled> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({"d" + std::to_string(i), labels[i]});
  return out;
}

struct OracleScores {
  double precision, recall, f1;
};

// Straight counting over aligned arrays, one label against the rest.
OracleScores oracle(const std::vector<int>& pred, const std::vector<int>& gold, int positive) {
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive;
    const bool g = gold[i] == positive;
    if (p && g) ++tp;
    if (p && !g) ++fp;
    if (!p && g) ++fn;
  }
  OracleScores s{};
  s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

TEST_CASE("perfect agreement") {
  const auto g = labeled({1, 0, 1, 1, 0});
  const auto m = evaluate_f1(g, g, 1, {0, 1});
  CHECK(m.positive_f1 == 1.0);
  CHECK(m.n_gold == 5);
  CHECK(m.confusion == std::vector<std::vector<int>>{{2, 0}, {0, 3}});
}

TEST_CASE("preds [1,1,0] vs gold [1,0,0]") {
  const auto m = evaluate_f1(labeled({1, 1, 0}), labeled({1, 0, 0}), 1, {0, 1});
  REQUIRE(m.per_label.size() == 2);
  CHECK(m.per_label[1].precision == 0.5);
  CHECK(m.per_label[1].recall == 1.0);
  CHECK(m.positive_f1 == 2.0 / 3.0);
  CHECK(m.per_label[1].support == 1);
  CHECK(m.per_label[0].support == 2);
}

TEST_CASE("no predicted and no gold positives") {
  const auto m = evaluate_f1(labeled({0, 0, 0}), labeled({0, 0, 0}), 1, {0, 1});
  CHECK(m.per_label[1].precision == 0.0);
  CHECK(m.per_label[1].recall == 0.0);
  CHECK(m.positive_f1 == 0.0);
}

TEST_CASE("evaluate_f1 agrees with a counting oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 60);
    std::vector<int> vocab(k);
    for (int i = 0; i < k; ++i) vocab[i] = i * 3 + 1;
    std::vector<int> pred(n), gold(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = vocab[rng() % k];
      gold[i] = vocab[rng() % k];
    }
    const int positive = vocab[rng() % k];
    const auto m = evaluate_f1(labeled(pred), labeled(gold), positive, vocab);
    for (int c = 0; c < k; ++c) {
      const auto o = oracle(pred, gold, vocab[c]);
      CHECK(m.per_label[c].label == vocab[c]);
      CHECK(m.per_label[c].precision == o.precision);
      CHECK(m.per_label[c].recall == o.recall);
      CHECK(m.per_label[c].f1 == o.f1);
    }
    CHECK(m.positive_f1 == oracle(pred, gold, positive).f1);
  }
}

TEST_CASE("F1 does not depend on document order") {
  std::mt19937_64 rng(5);
  std::vector<int> pred(50), gold(50);
  for (int i = 0; i < 50; ++i) {
    pred[i] = static_cast<int>(rng() % 2);
    gold[i] = static_cast<int>(rng() % 2);
  }
  auto p = labeled(pred);
  auto g = labeled(gold);
  const auto base = evaluate_f1(p, g, 1, {0, 1});
  for (int t = 0; t < 20; ++t) {
    std::shuffle(p.begin(), p.end(), rng);
    std::shuffle(g.begin(), g.end(), rng);
    CHECK(evaluate_f1(p, g, 1, {0, 1}) == base);
  }
}

TEST_CASE("evaluate_f1 errors") {
  const auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code([] { (void)evaluate_f1(labeled({1, 0}), labeled({1}), 1, {0, 1}); }) ==
        ErrorCode::kIdMismatch);
  CHECK(code([] {
          (void)evaluate_f1({{"a", 1}, {"b", 0}}, {{"a", 1}, {"c", 0}}, 1, {0, 1});
        }) == ErrorCode::kIdMismatch);
  CHECK(code([] { (void)evaluate_f1({{"a", 1}, {"a", 0}}, labeled({1, 0}), 1, {0, 1}); }) ==
        ErrorCode::kIdMismatch);
  CHECK(code([] { (void)evaluate_f1(labeled({2}), labeled({1}), 1, {0, 1}); }) ==
        ErrorCode::kUnknownLabel);
  CHECK(code([] { (void)evaluate_f1(labeled({1}), labeled({1}), 5, {0, 1}); }) ==
        ErrorCode::kUnknownLabel);
  CHECK(code([] { (void)evaluate_f1({}, {}, 1, {0, 1}); }) == ErrorCode::kNoGoldLabels);
}

TEST_CASE("corpus metrics use only gold-labelled documents") {
  const std::vector<Document> corpus = {{"a", "x", 1}, {"b", "y", std::nullopt}, {"c", "z", 0}};
  const std::vector<AnnotationRecord> ann = {{"a", 1, 0.9, "", {}, 0},
                                             {"b", 1, 0.9, "", {}, 0},
                                             {"c", 1, 0.9, "", {}, 0}};
  const auto m = corpus_metrics(corpus, ann, 1, {0, 1});
  REQUIRE(m);
  CHECK(m->n_gold == 2);
  CHECK(m->per_label[1].precision == 0.5);
  CHECK_FALSE(corpus_metrics({{"b", "y", std::nullopt}}, ann, 1, {0, 1}));
}
