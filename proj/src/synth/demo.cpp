#include "edgebook/synth/demo.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string_view>

#include "edgebook/core/errors.hpp"

namespace edgebook::synth {
namespace {

constexpr std::array<std::string_view, 12> kNegative = {
    "awful", "broken", "flimsy", "noisy", "disappointing", "useless",
    "overpriced", "leaky", "dull", "fragile", "sluggish", "faulty"};
constexpr std::array<std::string_view, 12> kPositive = {
    "great", "sturdy", "quiet", "reliable", "delightful", "useful",
    "affordable", "elegant", "bright", "durable", "speedy", "excellent"};
constexpr std::array<std::string_view, 12> kProducts = {
    "blender", "kettle", "toaster", "lamp", "backpack", "headset",
    "keyboard", "umbrella", "jacket", "mixer", "speaker", "charger"};

// None of the filler words here may occur in a label definition.
constexpr std::array<std::string_view, 4> kTemplates = {
    "The {p} felt {a} and {b}.",
    "My new {p} is {a}, honestly {b}.",
    "Bought a {p}: {a} and {b}.",
    "This {p} seems {a} and quite {b}."};

constexpr std::string_view kAmbiguousTemplate = "The {p} felt {a} but also {b} @@amb.";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

std::string fill(std::string_view tmpl, std::string_view p, std::string_view a, std::string_view b) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      const char key = tmpl[i + 1];
      out.append(key == 'p' ? p : key == 'a' ? a : b);
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

template <std::size_t N>
std::string join(const std::array<std::string_view, N>& words) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) out += i + 1 == N ? ", or " : ", ";
    out.append(words[i]);
  }
  return out;
}

std::string doc_id(int i, int n) {
  const std::size_t width = std::to_string(n - 1).size();
  std::string digits = std::to_string(i);
  return "doc-" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

DemoData generate_demo(int n_docs, double ambiguous_fraction, std::uint64_t seed) {
  if (n_docs < 10) fail(ErrorCode::kInvalidArgument, "the demo corpus needs at least 10 documents");
  if (!(ambiguous_fraction >= 0.0 && ambiguous_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "ambiguous_fraction must be in [0, 1]");
  }

  DemoData out;
  out.codebook.task_id = "demo";
  out.codebook.version = 0;
  out.codebook.task_description =
      "Decide whether a short product review expresses a negative or a positive opinion.";
  out.codebook.labels = {
      {0, "negative", "the review calls the product " + join(kNegative)},
      {1, "positive", "the review calls the product " + join(kPositive)}};

  Rng rng(seed);
  const int n_amb = static_cast<int>(std::floor(ambiguous_fraction * n_docs + 1e-9));
  std::vector<int> order(n_docs);
  for (int i = 0; i < n_docs; ++i) order[i] = i;
  for (int i = n_docs - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<bool> ambiguous(n_docs, false);
  for (int i = 0; i < n_amb; ++i) ambiguous[order[i]] = true;

  out.corpus.reserve(n_docs);
  for (int i = 0; i < n_docs; ++i) {
    const auto product = kProducts[rng.below(kProducts.size())];
    Document d;
    d.doc_id = doc_id(i, n_docs);
    if (ambiguous[i]) {
      d.text = fill(kAmbiguousTemplate, product, kPositive[rng.below(kPositive.size())],
                    kNegative[rng.below(kNegative.size())]);
      d.gold_label = 1;
    } else {
      const int gold = static_cast<int>(rng.below(2));
      const auto& pool = gold == 1 ? kPositive : kNegative;
      const std::size_t a = rng.below(pool.size());
      std::size_t b = rng.below(pool.size() - 1);
      if (b >= a) ++b;
      d.text = fill(kTemplates[rng.below(kTemplates.size())], product, pool[a], pool[b]);
      d.gold_label = gold;
    }
    out.corpus.push_back(std::move(d));
  }
  return out;
}

}  // namespace edgebook::synth
