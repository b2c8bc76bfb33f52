#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "edgebook/api/server.hpp"
#include "edgebook/store/store.hpp"
#include "tool_common.hpp"

namespace {

edgebook::api::ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

std::optional<std::string> env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annotation and edge-case discovery HTTP service"};
  std::string data_dir, provider;
  std::optional<int> port;
  app.add_option("--data-dir", data_dir, "storage root (default: CODETECT_DATA_DIR or ./data)");
  app.add_option("--port", port, "listen port (overrides CODETECT_BIND_ADDR)")
      ->check(CLI::Range(0, 65535));
  app.add_option("--provider", provider, "mock or openai_compatible (overrides CODETECT_PROVIDER)")
      ->check(CLI::IsMember({"mock", "openai_compatible"}));
  CLI11_PARSE(app, argc, argv);

  try {
    auto pconfig = edgebook::provider::config_from_env();
    if (!provider.empty()) pconfig.kind = edgebook::provider::parse_provider_kind(provider);
    edgebook::provider::validate(pconfig);

    auto sconfig = edgebook::api::server_config_from_env(env);
    if (port) sconfig.port = *port;

    const std::filesystem::path root =
        data_dir.empty() ? edgebook::store::data_dir_from_env() : std::filesystem::path(data_dir);
    auto store = std::make_shared<edgebook::store::FileStore>(root);

    edgebook::api::ApiServer server(store, edgebook::tools::make_gateway(pconfig), sconfig);
    const int bound = server.bind();
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << sconfig.host << ":" << bound << " (provider "
              << edgebook::provider::provider_kind_name(pconfig.kind) << ", data " << root.string()
              << ")" << std::endl;
    server.listen();
    g_server = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "edgebook-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
