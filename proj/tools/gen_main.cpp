#include <CLI11.hpp>

#include <iostream>

#include "edgebook/core/csv.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/synth/demo.hpp"
#include "tool_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic sentiment demo corpus"};
  int n = 200;
  double amb = 0.2;
  std::uint64_t seed = 7;
  std::string out = "demo.csv";
  std::string codebook_out;
  app.add_option("--n", n, "number of documents")->check(CLI::Range(10, 10000000));
  app.add_option("--amb", amb, "fraction of ambiguous documents")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--out", out, "corpus CSV path");
  app.add_option("--codebook-out", codebook_out, "also write the v0 codebook JSON here");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto demo = edgebook::synth::generate_demo(n, amb, seed);
    edgebook::tools::write_text(out, edgebook::write_corpus_csv(demo.corpus));
    if (!codebook_out.empty()) {
      edgebook::tools::write_text(codebook_out, edgebook::Json(demo.codebook).dump(2) + "\n");
    }
    std::cout << "wrote " << demo.corpus.size() << " documents to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "edgebook-gen: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
