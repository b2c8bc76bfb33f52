#include "edgebook/provider/config.hpp"

#include <charconv>
#include <cstdlib>

#include "edgebook/core/errors.hpp"
#include "edgebook/provider/mock.hpp"
#include "edgebook/provider/openai.hpp"

namespace edgebook::provider {
namespace {

template <typename T>
T parse_number(const std::string& name, const std::string& raw) {
  T value{};
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
    fail(ErrorCode::kInvalidArgument, name + " is not a valid integer: '" + raw + "'");
  }
  return value;
}

}  // namespace

void validate(const ProviderConfig& config) {
  if (config.max_parallel < 1) fail(ErrorCode::kInvalidArgument, "max_parallel must be >= 1");
  if (config.max_retries < 0) fail(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  if (config.request_timeout.count() <= 0) {
    fail(ErrorCode::kInvalidArgument, "request_timeout must be positive");
  }
  if (config.kind == ProviderKind::kOpenAiCompatible) {
    if (!config.base_url || config.base_url->empty()) {
      fail(ErrorCode::kInvalidArgument, "openai_compatible provider needs a base_url");
    }
    if (!config.api_key || config.api_key->empty()) {
      fail(ErrorCode::kInvalidArgument, "openai_compatible provider needs an api_key");
    }
  }
}

ProviderKind parse_provider_kind(const std::string& name) {
  if (name == "mock") return ProviderKind::kMock;
  if (name == "openai_compatible") return ProviderKind::kOpenAiCompatible;
  fail(ErrorCode::kInvalidArgument,
       "unknown provider '" + name + "' (expected mock or openai_compatible)");
}

std::string provider_kind_name(ProviderKind kind) {
  return kind == ProviderKind::kMock ? "mock" : "openai_compatible";
}

ProviderConfig config_from_env(const EnvLookup& lookup) {
  ProviderConfig c;
  if (auto v = lookup("CODETECT_PROVIDER")) c.kind = parse_provider_kind(*v);
  if (auto v = lookup("CODETECT_BASE_URL")) c.base_url = *v;
  if (auto v = lookup("CODETECT_API_KEY")) c.api_key = *v;
  if (auto v = lookup("CODETECT_ANNOTATOR_MODEL")) c.annotator_model = *v;
  if (auto v = lookup("CODETECT_REASONER_MODEL")) c.reasoner_model = *v;
  if (auto v = lookup("CODETECT_EMBED_MODEL")) c.embed_model = *v;
  if (auto v = lookup("CODETECT_MAX_PARALLEL")) {
    c.max_parallel = parse_number<int>("CODETECT_MAX_PARALLEL", *v);
  }
  if (auto v = lookup("CODETECT_SEED")) c.seed = parse_number<std::uint64_t>("CODETECT_SEED", *v);
  if (auto v = lookup("CODETECT_REQUEST_TIMEOUT_MS")) {
    c.request_timeout =
        std::chrono::milliseconds(parse_number<long long>("CODETECT_REQUEST_TIMEOUT_MS", *v));
  }
  if (auto v = lookup("CODETECT_MAX_RETRIES")) {
    c.max_retries = parse_number<int>("CODETECT_MAX_RETRIES", *v);
  }
  validate(c);
  return c;
}

ProviderConfig config_from_env() {
  return config_from_env([](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  });
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
  validate(config);
  if (config.kind == ProviderKind::kMock) return std::make_shared<MockProvider>(config.seed);
  return std::make_shared<OpenAiProvider>(config);
}

}  // namespace edgebook::provider
