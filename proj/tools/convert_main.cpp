#include <CLI11.hpp>

#include <iostream>

#include "edgebook/core/csv.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/eval/datasets.hpp"
#include "tool_common.hpp"

namespace {

void write_outputs(const std::vector<edgebook::Document>& docs, const edgebook::Codebook& codebook,
                   const std::string& out, const std::string& codebook_out) {
  edgebook::tools::write_text(out, edgebook::write_corpus_csv(docs));
  if (!codebook_out.empty()) {
    edgebook::tools::write_text(codebook_out, edgebook::Json(codebook).dump(2) + "\n");
  }
  int positives = 0;
  for (const auto& d : docs) positives += d.gold_label == 1 ? 1 : 0;
  std::cout << "wrote " << docs.size() << " documents (" << positives << " positive) to " << out
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert benchmark TSV files to the corpus CSV format"};
  app.require_subcommand(1);

  std::string in, out, codebook_out, target = "positive";
  auto* go = app.add_subcommand("goemotions", "GoEmotions train/dev/test TSV");
  go->add_option("--in", in, "input TSV")->required();
  go->add_option("--out", out, "output corpus CSV")->required();
  go->add_option("--target", target, "positive or negative")
      ->check(CLI::IsMember({"positive", "negative"}));
  go->add_option("--codebook-out", codebook_out, "also write a matching codebook JSON");

  auto* ghc = app.add_subcommand("ghc", "Gab Hate Corpus TSV");
  ghc->add_option("--in", in, "input TSV")->required();
  ghc->add_option("--out", out, "output corpus CSV")->required();
  ghc->add_option("--codebook-out", codebook_out, "also write a matching codebook JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto tsv = edgebook::tools::read_text(in);
    if (go->parsed()) {
      const auto t = edgebook::eval::parse_goemotions_target(target);
      write_outputs(edgebook::eval::convert_goemotions_tsv(tsv, t),
                    edgebook::eval::goemotions_codebook(t), out, codebook_out);
    } else {
      write_outputs(edgebook::eval::convert_ghc_tsv(tsv), edgebook::eval::ghc_codebook(), out,
                    codebook_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "edgebook-convert: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
