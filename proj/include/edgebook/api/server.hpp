#pragma once

#include <memory>
#include <string>

#include "edgebook/core/errors.hpp"
#include "edgebook/pipeline/pipeline.hpp"
#include "edgebook/provider/config.hpp"
#include "edgebook/provider/gateway.hpp"
#include "edgebook/store/store.hpp"

namespace edgebook::api {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  // Sent as Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin = "*";
  int job_workers = 2;
  // Defaults for iterations; edge_threshold can be overridden per request.
  pipeline::PipelineConfig pipeline;
};

// CODETECT_BIND_ADDR ("host", "host:port" or ":port"), CODETECT_CORS_ORIGIN
// and CODETECT_JOB_WORKERS on top of the defaults.
[[nodiscard]] ServerConfig server_config_from_env(const provider::EnvLookup& lookup);

// HTTP status for an error code: validation 400, missing 404, state
// conflicts 409, provider trouble 502/503, storage 500.
[[nodiscard]] int http_status(ErrorCode code);

// The JSON/HTTP service. Error bodies are {"error": <code name>, "message": ...}.
class ApiServer {
 public:
  ApiServer(std::shared_ptr<store::Store> store, std::shared_ptr<provider::Gateway> gateway,
            ServerConfig config);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds config.host:config.port (port 0 picks a free one) and returns the
  // bound port. Throws Error(kIo) if binding fails.
  int bind();
  // Serves until stop(). Call bind() first.
  void listen();
  // bind() plus listen() on a background thread; returns the port once the
  // server accepts connections.
  int start();
  void stop();

  [[nodiscard]] int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace edgebook::api
