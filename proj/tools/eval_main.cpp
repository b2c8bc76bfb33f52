#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "edgebook/core/csv.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/eval/experiment.hpp"
#include "tool_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run the two-iteration refinement experiment on a labelled corpus"};
  std::string corpus_path, codebook_path, provider, acceptance = "all", acceptance_file;
  std::string out = "report.json", name;
  double edge_threshold = 0.80;
  std::optional<int> positive_label;
  app.add_option("--corpus", corpus_path, "corpus CSV with gold_label")->required();
  app.add_option("--codebook", codebook_path, "v0 codebook JSON")->required();
  app.add_option("--provider", provider, "mock or openai_compatible (overrides CODETECT_PROVIDER)")
      ->check(CLI::IsMember({"mock", "openai_compatible"}));
  app.add_option("--acceptance", acceptance, "which suggested rules go into v1")
      ->check(CLI::IsMember({"all", "none", "file"}));
  app.add_option("--acceptance-file", acceptance_file,
                 "JSON with accepted_merged_ids and extra rules (for --acceptance file)");
  app.add_option("--edge-threshold", edge_threshold, "confidence threshold for edge items")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--positive-label", positive_label, "label scored by F1 (default: largest)");
  app.add_option("--name", name, "dataset name recorded in the report (default: corpus file)");
  app.add_option("--out", out, "report JSON path");
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = edgebook::provider::config_from_env();
    if (!provider.empty()) config.kind = edgebook::provider::parse_provider_kind(provider);
    edgebook::provider::validate(config);
    auto gateway = edgebook::tools::make_gateway(config);

    const auto corpus = edgebook::parse_corpus_csv(edgebook::tools::read_text(corpus_path));
    const auto codebook = edgebook::codebook_from_user_json(
        edgebook::Json::parse(edgebook::tools::read_text(codebook_path)), "eval");

    const auto mode = edgebook::eval::parse_rule_acceptance(acceptance);
    std::optional<edgebook::eval::AcceptanceSelection> selection;
    if (mode == edgebook::eval::RuleAcceptance::kFile) {
      if (acceptance_file.empty()) throw std::runtime_error("--acceptance file needs --acceptance-file");
      selection = edgebook::eval::parse_acceptance_selection(
          edgebook::Json::parse(edgebook::tools::read_text(acceptance_file)));
    }

    edgebook::pipeline::PipelineConfig cfg;
    cfg.edge_threshold = edge_threshold;
    cfg.positive_label = positive_label;
    if (name.empty()) name = std::filesystem::path(corpus_path).stem().string();

    const auto result = edgebook::eval::run_two_iteration_experiment(
        *gateway, name, corpus, codebook, mode, selection ? &*selection : nullptr, cfg);
    edgebook::tools::write_text(out, edgebook::Json(result.report).dump(2) + "\n");

    const auto& f1 = result.report.iteration_f1;
    std::printf("%s  n=%d gold=%d  F1 v0=%.4f  v1=%.4f  delta=%+.4f  rules accepted=%zu\n",
                name.c_str(), result.report.n_docs, result.report.n_gold, f1.at(0).f1,
                f1.at(1).f1, result.report.deltas.at(0), result.report.accepted_rules.size());
  } catch (const std::exception& e) {
    std::cerr << "edgebook-eval: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
