#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "edgebook/core/codebook.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/pipeline/pipeline.hpp"
#include "edgebook/provider/mock.hpp"
#include "edgebook/store/store.hpp"
#include "edgebook/synth/demo.hpp"
#include "support/scripted_provider.hpp"
#include "support/temp_dir.hpp"

using namespace edgebook;
using namespace edgebook::pipeline;
using edgebook::testing::ScriptedProvider;
using edgebook::testing::TempDir;

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

provider::GatewayOptions quiet_options() {
  provider::GatewayOptions o;
  o.max_parallel = 4;
  o.retry.max_retries = 1;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

provider::Gateway mock_gateway(std::uint64_t seed = 7) {
  return provider::Gateway(std::make_shared<provider::MockProvider>(seed), quiet_options());
}

bool is_marked(const Document& d) { return d.text.find("@@amb") != std::string::npos; }

std::set<std::string> marked_ids(const std::vector<Document>& docs) {
  std::set<std::string> out;
  for (const auto& d : docs) {
    if (is_marked(d)) out.insert(d.doc_id);
  }
  return out;
}

std::string stable_dump(IterationRecord rec) {
  rec.created_at.clear();
  return Json(rec).dump();
}

}  // namespace

TEST_CASE("no ambiguous documents means no edge cases") {
  const auto demo = synth::generate_demo(200, 0.0, 7);
  auto gw = mock_gateway();
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
  CHECK(rec.annotations.size() == 200);
  CHECK(flag_edge_items(rec.annotations, 0.8).empty());
  CHECK(rec.clusters.empty());
  CHECK(rec.merged.empty());
  CHECK(rec.edge_projection.empty());
  CHECK(rec.projection.size() == 200);
  REQUIRE(rec.metrics);
  CHECK(rec.metrics->positive_f1 == 1.0);
  CHECK(rec.diagnostics.failed_doc_ids.empty());
  CHECK(rec.diagnostics.warnings.empty());
}

TEST_CASE("demo corpus with 40 ambiguous documents") {
  const auto demo = synth::generate_demo(200, 0.2, 7);
  auto gw = mock_gateway();
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);

  const auto edge = flag_edge_items(rec.annotations, rec.edge_threshold);
  std::set<std::string> flagged;
  for (const auto& a : edge) flagged.insert(a.doc_id);
  CHECK(edge.size() == 40);
  CHECK(flagged == marked_ids(demo.corpus));

  CHECK(cluster::choose_k(40, {}) == 3);
  REQUIRE(rec.clusters.size() == 3);
  std::multiset<std::string> members;
  for (std::size_t j = 0; j < rec.clusters.size(); ++j) {
    const auto& c = rec.clusters[j];
    CHECK(c.cluster_id == "c" + std::to_string(j));
    CHECK(c.member_doc_ids.size() >= 10);
    CHECK(c.member_doc_ids.size() <= 20);
    members.insert(c.member_doc_ids.begin(), c.member_doc_ids.end());
  }
  // Every flagged item sits in exactly one cluster.
  CHECK(members == std::multiset<std::string>(flagged.begin(), flagged.end()));

  CHECK(rec.merged.size() >= 1);
  CHECK_NOTHROW(validate_merge_partition(rec.clusters, rec.merged));
  // All members share the marker rule, so the mock merges them into one case.
  REQUIRE(rec.merged.size() == 1);
  CHECK(rec.merged[0].source_cluster_ids == std::vector<std::string>{"c0", "c1", "c2"});
  CHECK(rec.merged[0].suggested_rule.case_description.find("@@amb") != std::string::npos);
  CHECK(rec.merged[0].suggested_rule.action == "assign label 1");
  CHECK(rec.edge_projection.size() == 40);
}

TEST_CASE("identical inputs give identical records") {
  const auto demo = synth::generate_demo(200, 0.2, 7);
  auto gw1 = mock_gateway();
  auto gw2 = mock_gateway();
  const auto a = compute_iteration(gw1, "demo", demo.codebook, demo.corpus, {}, 0);
  const auto b = compute_iteration(gw2, "demo", demo.codebook, demo.corpus, {}, 0);
  CHECK(stable_dump(a) == stable_dump(b));
  CHECK(a.annotations == b.annotations);
  CHECK(a.clusters == b.clusters);
  CHECK(a.merged == b.merged);
}

TEST_CASE("result does not depend on parallelism") {
  const auto demo = synth::generate_demo(120, 0.25, 3);
  auto opts = quiet_options();
  opts.max_parallel = 1;
  provider::Gateway serial(std::make_shared<provider::MockProvider>(7), opts);
  opts.max_parallel = 8;
  provider::Gateway wide(std::make_shared<provider::MockProvider>(7), opts);
  CHECK(stable_dump(compute_iteration(serial, "demo", demo.codebook, demo.corpus, {}, 0)) ==
        stable_dump(compute_iteration(wide, "demo", demo.codebook, demo.corpus, {}, 0)));
}

TEST_CASE("projection sizes are exactly one minus confidence") {
  const auto demo = synth::generate_demo(150, 0.2, 5);
  auto gw = mock_gateway();
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
  std::map<std::string, const AnnotationRecord*> by_id;
  for (const auto& a : rec.annotations) by_id[a.doc_id] = &a;
  REQUIRE(rec.projection.size() == demo.corpus.size());
  for (std::size_t i = 0; i < rec.projection.size(); ++i) {
    const auto& p = rec.projection[i];
    CHECK(p.doc_id == demo.corpus[i].doc_id);
    CHECK(p.size == 1.0 - by_id.at(p.doc_id)->confidence);
    CHECK(p.label == by_id.at(p.doc_id)->label);
  }
  for (const auto& p : rec.edge_projection) {
    CHECK(p.size == 1.0 - by_id.at(p.doc_id)->confidence);
    CHECK(by_id.at(p.doc_id)->item_edge_case.has_value());
  }
}

TEST_CASE("few edge items form a single cluster") {
  const auto demo = synth::generate_demo(50, 0.1, 2);
  auto gw = mock_gateway();
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
  REQUIRE(rec.clusters.size() == 1);
  CHECK(rec.clusters[0].cluster_id == "c0");
  CHECK(rec.clusters[0].member_doc_ids.size() == 5);
  REQUIRE(rec.merged.size() == 1);
  CHECK(rec.merged[0].source_cluster_ids == std::vector<std::string>{"c0"});
  CHECK(rec.merged[0].member_doc_ids == rec.clusters[0].member_doc_ids);
}

TEST_CASE("flag_edge_items") {
  const EdgeCaseRule rule{"unclear", "pick 0"};
  const std::vector<AnnotationRecord> ann = {
      {"a", 1, 0.95, "", std::nullopt, 0},
      {"b", 0, 0.50, "", rule, 0},
      {"c", 0, 0.50, "", std::nullopt, 0},
      {"d", 0, 0.79, "", rule, 0},
      {"e", 0, 0.80, "", std::nullopt, 0},
  };
  const auto flagged = flag_edge_items(ann, 0.8);
  REQUIRE(flagged.size() == 2);
  CHECK(flagged[0].doc_id == "b");
  CHECK(flagged[1].doc_id == "d");
  CHECK(low_confidence_without_rule(ann, 0.8) == std::vector<std::string>{"c"});
}

TEST_CASE("low confidence without a rule is reported in diagnostics") {
  const auto demo = synth::generate_demo(60, 0.0, 4);
  auto scripted = std::make_shared<ScriptedProvider>(7);
  scripted->omit_rule = {demo.corpus[3].doc_id, demo.corpus[10].doc_id};
  provider::Gateway gw(scripted, quiet_options());
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
  CHECK(rec.clusters.empty());
  CHECK(rec.diagnostics.low_confidence_without_rule ==
        std::vector<std::string>{demo.corpus[3].doc_id, demo.corpus[10].doc_id});
}

TEST_CASE("rules on confident annotations are dropped") {
  const auto demo = synth::generate_demo(60, 0.0, 4);
  auto scripted = std::make_shared<ScriptedProvider>(7);
  scripted->confident_rule = {demo.corpus[5].doc_id};
  provider::Gateway gw(scripted, quiet_options());
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
  CHECK(rec.diagnostics.rules_dropped_above_threshold ==
        std::vector<std::string>{demo.corpus[5].doc_id});
  CHECK_FALSE(rec.annotations[5].item_edge_case);
  CHECK(rec.annotations[5].confidence == 0.9);

  // With a higher threshold the same rule is a genuine edge item.
  PipelineConfig cfg;
  cfg.edge_threshold = 0.95;
  const auto high = compute_iteration(gw, "demo", demo.codebook, demo.corpus, cfg, 0);
  CHECK(high.diagnostics.rules_dropped_above_threshold.empty());
  REQUIRE(high.clusters.size() == 1);
  CHECK(high.clusters[0].member_doc_ids == std::vector<std::string>{demo.corpus[5].doc_id});
}

TEST_CASE("raising the threshold never unflags an item") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AnnotationRecord> ann;
    for (int i = 0; i < 40; ++i) {
      const double conf = static_cast<double>(rng() % 1001) / 1000.0;
      std::optional<EdgeCaseRule> rule;
      if (rng() % 2) rule = EdgeCaseRule{"x", "y"};
      ann.push_back({"d" + std::to_string(i), 0, conf, "", rule, 0});
    }
    const double lo = static_cast<double>(1 + rng() % 998) / 1000.0;
    const double hi = lo + static_cast<double>(rng() % 1000) / 1000.0 * (0.999 - lo);
    std::set<std::string> at_lo, at_hi;
    for (const auto& a : flag_edge_items(ann, lo)) at_lo.insert(a.doc_id);
    for (const auto& a : flag_edge_items(ann, hi)) at_hi.insert(a.doc_id);
    CHECK(std::includes(at_hi.begin(), at_hi.end(), at_lo.begin(), at_lo.end()));
  }
}

TEST_CASE("a few failed documents get placeholder records") {
  const auto demo = synth::generate_demo(200, 0.2, 7);
  auto scripted = std::make_shared<ScriptedProvider>(7);
  for (int i : {1, 50, 99}) scripted->unavailable.insert(demo.corpus[i].doc_id);
  scripted->malformed.insert(demo.corpus[150].doc_id);
  provider::Gateway gw(scripted, quiet_options());
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
  CHECK(rec.annotations.size() == 200);
  CHECK(rec.diagnostics.failed_doc_ids ==
        std::vector<std::string>{demo.corpus[1].doc_id, demo.corpus[50].doc_id,
                                 demo.corpus[99].doc_id, demo.corpus[150].doc_id});
  for (int i : {1, 50, 99, 150}) {
    const auto& a = rec.annotations[i];
    CHECK(a.confidence == 0.0);
    CHECK(a.label == 0);
    CHECK(a.rationale.rfind("annotation failed: ", 0) == 0);
    CHECK_FALSE(a.item_edge_case);
  }
  for (const auto& id : rec.diagnostics.low_confidence_without_rule) {
    CHECK(std::find(rec.diagnostics.failed_doc_ids.begin(), rec.diagnostics.failed_doc_ids.end(),
                    id) == rec.diagnostics.failed_doc_ids.end());
  }
}

TEST_CASE("more than 2% failures abort the run") {
  const auto demo = synth::generate_demo(200, 0.2, 7);
  auto scripted = std::make_shared<ScriptedProvider>(7);
  std::vector<std::string> expected;
  for (int i : {0, 10, 20, 30, 40}) {
    scripted->unavailable.insert(demo.corpus[i].doc_id);
    expected.push_back(demo.corpus[i].doc_id);
  }
  provider::Gateway gw(scripted, quiet_options());
  try {
    (void)compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0);
    FAIL("expected PartialAnnotationFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPartialAnnotationFailure);
    CHECK(e.details() == expected);
  }
}

TEST_CASE("an unreachable provider aborts and persists nothing") {
  TempDir tmp;
  store::FileStore st(tmp.path());
  const auto demo = synth::generate_demo(40, 0.2, 7);
  st.create_task("demo", demo.codebook);
  st.put_corpus("demo", demo.corpus);
  auto scripted = std::make_shared<ScriptedProvider>(7);
  scripted->everything_unavailable = true;
  provider::Gateway gw(scripted, quiet_options());
  CHECK(code_of([&] { (void)run_iteration(gw, st, "demo", demo.codebook, {}); }) ==
        ErrorCode::kProviderUnavailable);
  CHECK(st.iteration_count("demo") == 0);
  // One attempt plus one retry per document.
  CHECK(scripted->annotate_calls == 80);
}

TEST_CASE("two iterations through the store") {
  TempDir tmp;
  store::FileStore st(tmp.path());
  const auto demo = synth::generate_demo(200, 0.2, 7);
  st.create_task("demo", demo.codebook);
  st.put_corpus("demo", demo.corpus);
  auto gw = mock_gateway();

  const auto first = run_iteration(gw, st, "demo", demo.codebook, {});
  CHECK(first.iteration == 0);
  CHECK(st.get_iteration("demo", 0) == first);

  // Oracle: plain documents are correct, the 40 marked ones (gold 1) come
  // back as label 0, so TP = gold positives minus 40, FN = 40, FP = 0.
  int gold_pos = 0;
  for (const auto& d : demo.corpus) gold_pos += *d.gold_label == 1 ? 1 : 0;
  const double tp = gold_pos - 40;
  const double expected_f1 = 2 * tp / (2 * tp + 40);
  REQUIRE(first.metrics);
  CHECK(first.metrics->positive_f1 == doctest::Approx(expected_f1).epsilon(1e-12));
  CHECK(first.metrics->per_label[1].precision == 1.0);
  CHECK(first.metrics->confusion[1][0] == 40);

  std::vector<EdgeCaseRule> accepted;
  for (const auto& m : first.merged) accepted.push_back(m.suggested_rule);
  const Codebook v1 = compose_codebook(demo.codebook, accepted);
  st.put_codebook(v1);
  const auto second = run_iteration(gw, st, "demo", v1, {});
  CHECK(second.iteration == 1);
  CHECK(second.codebook_version == 1);
  REQUIRE(second.metrics);
  CHECK(second.metrics->positive_f1 == 1.0);
  CHECK(flag_edge_items(second.annotations, 0.8).empty());

  std::vector<int> versions;
  for (const auto& cb : st.list_codebooks("demo")) versions.push_back(cb.version);
  CHECK(versions == std::vector<int>{0, 1});
  const auto task = st.get_task("demo");
  REQUIRE(task.iterations.size() == 2);
  CHECK(task.iterations[0].codebook_version == 0);
  CHECK(task.iterations[1].codebook_version == 1);
  CHECK(task.iterations[0].n_edge_items == 40);
}

TEST_CASE("run_iteration preconditions") {
  TempDir tmp;
  store::FileStore st(tmp.path());
  const auto demo = synth::generate_demo(30, 0.2, 7);
  st.create_task("demo", demo.codebook);
  auto gw = mock_gateway();
  CHECK(code_of([&] { (void)run_iteration(gw, st, "demo", demo.codebook, {}); }) ==
        ErrorCode::kCorpusNotSet);
  st.put_corpus("demo", demo.corpus);
  const Codebook unstored = compose_codebook(demo.codebook, {{"x", "y"}});
  CHECK(code_of([&] { (void)run_iteration(gw, st, "demo", unstored, {}); }) ==
        ErrorCode::kVersionNotFound);
  CHECK(code_of([&] { (void)run_iteration(gw, st, "nope", demo.codebook, {}); }) ==
        ErrorCode::kTaskNotFound);

  PipelineConfig bad;
  bad.edge_threshold = 1.0;
  CHECK(code_of([&] { (void)run_iteration(gw, st, "demo", demo.codebook, bad); }) ==
        ErrorCode::kInvalidArgument);
  bad = {};
  bad.positive_label = 4;
  CHECK(code_of([&] { (void)run_iteration(gw, st, "demo", demo.codebook, bad); }) ==
        ErrorCode::kUnknownLabel);
  CHECK(st.iteration_count("demo") == 0);
  CHECK(code_of([&] { (void)compute_iteration(gw, "demo", demo.codebook, {}, {}, 0); }) ==
        ErrorCode::kEmptyCorpus);
}

TEST_CASE("one iteration per task at a time") {
  TempDir tmp;
  store::FileStore st(tmp.path());
  const auto demo = synth::generate_demo(30, 0.2, 7);
  st.create_task("demo", demo.codebook);
  st.put_corpus("demo", demo.corpus);
  auto gw = mock_gateway();
  {
    const auto lease = st.acquire_lease("demo");
    CHECK(code_of([&] { (void)run_iteration(gw, st, "demo", demo.codebook, {}); }) ==
          ErrorCode::kTaskBusy);
  }
  CHECK_NOTHROW((void)run_iteration(gw, st, "demo", demo.codebook, {}));
}

TEST_CASE("progress is monotone and finishes at 1") {
  const auto demo = synth::generate_demo(80, 0.2, 7);
  auto gw = mock_gateway();
  std::vector<double> seen;
  std::set<std::string> stages;
  (void)compute_iteration(gw, "demo", demo.codebook, demo.corpus, {}, 0,
                          [&](double f, const std::string& stage) {
                            seen.push_back(f);
                            stages.insert(stage);
                          });
  REQUIRE_FALSE(seen.empty());
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(seen.back() == 1.0);
  CHECK(stages.count("annotate"));
  CHECK(stages.count("merge"));
}

TEST_CASE("positive label and out-of-vocabulary gold") {
  const auto demo = synth::generate_demo(60, 0.2, 7);
  auto gw = mock_gateway();
  PipelineConfig cfg;
  cfg.positive_label = 0;
  const auto rec = compute_iteration(gw, "demo", demo.codebook, demo.corpus, cfg, 0);
  REQUIRE(rec.metrics);
  CHECK(rec.metrics->positive_label == 0);

  auto corpus = demo.corpus;
  corpus[0].gold_label = 7;
  const auto skipped = compute_iteration(gw, "demo", demo.codebook, corpus, {}, 0);
  CHECK_FALSE(skipped.metrics);
  CHECK(skipped.diagnostics.warnings.size() == 1);

  for (auto& d : corpus) d.gold_label.reset();
  CHECK_FALSE(compute_iteration(gw, "demo", demo.codebook, corpus, {}, 0).metrics);
}
