#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "edgebook/provider/provider.hpp"

namespace edgebook::provider {

enum class ProviderKind { kMock, kOpenAiCompatible };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kMock;
  std::optional<std::string> base_url;
  std::optional<std::string> api_key;
  std::string annotator_model = "gpt-4.1";
  std::string reasoner_model = "deepseek-reasoner";
  std::string embed_model = "text-embedding-3-large";
  int max_parallel = 8;
  std::chrono::milliseconds request_timeout{120000};
  int max_retries = 3;
  std::uint64_t seed = 0;
};

// openai_compatible needs base_url and api_key; max_parallel >= 1.
void validate(const ProviderConfig& config);

[[nodiscard]] ProviderKind parse_provider_kind(const std::string& name);
[[nodiscard]] std::string provider_kind_name(ProviderKind kind);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads CODETECT_PROVIDER, CODETECT_BASE_URL, CODETECT_API_KEY,
// CODETECT_ANNOTATOR_MODEL, CODETECT_REASONER_MODEL, CODETECT_EMBED_MODEL,
// CODETECT_MAX_PARALLEL, CODETECT_SEED, CODETECT_REQUEST_TIMEOUT_MS and
// CODETECT_MAX_RETRIES on top of the defaults above.
[[nodiscard]] ProviderConfig config_from_env(const EnvLookup& lookup);
[[nodiscard]] ProviderConfig config_from_env();

[[nodiscard]] std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace edgebook::provider
