#pragma once

#include <cstdint>
#include <vector>

#include "edgebook/core/types.hpp"

namespace edgebook::synth {

struct DemoData {
  std::vector<Document> corpus;
  Codebook codebook;
};

// Product-review sentiment demo: label 0 "negative", label 1 "positive".
// Each label definition lists its keyword pool; every plain document uses two
// keywords from its gold label's pool and no other word that appears in only
// one definition, so the mock annotator labels it correctly at confidence
// 0.95. Exactly floor(ambiguous_fraction * n_docs) documents, chosen by a
// seeded shuffle, mix one keyword of each pool, carry the "@@amb" marker and
// have gold label 1. The codebook has no handling rules.
//
// Only raw 64-bit engine output is used, never std:: distributions, so the
// output is identical across standard libraries.
//
// Throws Error(kInvalidArgument) if n_docs < 10 or the fraction is outside
// [0, 1].
[[nodiscard]] DemoData generate_demo(int n_docs, double ambiguous_fraction, std::uint64_t seed);

}  // namespace edgebook::synth
