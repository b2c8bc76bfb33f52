#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "edgebook/provider/config.hpp"
#include "edgebook/provider/gateway.hpp"

namespace edgebook::tools {

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for " + path.string());
}

inline std::shared_ptr<provider::Gateway> make_gateway(const provider::ProviderConfig& config) {
  provider::GatewayOptions opts;
  opts.max_parallel = config.max_parallel;
  opts.retry.max_retries = config.max_retries;
  return std::make_shared<provider::Gateway>(provider::make_provider(config), opts);
}

}  // namespace edgebook::tools
