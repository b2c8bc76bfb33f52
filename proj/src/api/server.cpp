#include "edgebook/api/server.hpp"

#include <httplib.h>

#include <charconv>
#include <thread>

#include "edgebook/api/jobs.hpp"
#include "edgebook/core/codebook.hpp"
#include "edgebook/core/csv.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/core/text.hpp"
#include "edgebook/embedded_templates.hpp"

namespace edgebook::api {
namespace {

constexpr const char* kJson = "application/json";

// Corpora outside this range still upload, with a warning.
constexpr std::size_t kSuggestedMinDocs = 500;
constexpr std::size_t kSuggestedMaxDocs = 1000;

Json summary_json(const store::IterationSummary& s) {
  Json j{{"iteration", s.iteration},
         {"codebook_version", s.codebook_version},
         {"created_at", s.created_at},
         {"n_edge_items", s.n_edge_items},
         {"n_merged", s.n_merged}};
  j["positive_f1"] = s.positive_f1 ? Json(*s.positive_f1) : Json(nullptr);
  return j;
}

Json job_json(const JobStatus& s) {
  return Json{{"job_id", s.job_id},
              {"task_id", s.task_id},
              {"state", job_state_name(s.state)},
              {"iteration", s.iteration ? Json(*s.iteration) : Json(nullptr)},
              {"error", s.error ? Json(*s.error) : Json(nullptr)},
              {"error_code", s.error_code ? Json(*s.error_code) : Json(nullptr)},
              {"progress", s.progress},
              {"stage", s.stage}};
}

Json error_json(const std::string& code, const std::string& message) {
  return Json{{"error", code}, {"message", message}};
}

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

Json parse_body(const httplib::Request& req, bool allow_empty) {
  if (is_blank(req.body)) {
    if (allow_empty) return Json::object();
    fail(ErrorCode::kInvalidArgument, "request body is empty");
  }
  Json j;
  try {
    j = Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Error&) {
    throw;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown_fields(const Json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return it.key() == a; })) {
      fail(ErrorCode::kInvalidArgument, "unknown field '" + it.key() + "'");
    }
  }
}

int parse_iteration_param(const std::string& s) {
  int v = -1;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    fail(ErrorCode::kIterationNotFound, "no iteration '" + s + "'");
  }
  return v;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyRule:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kInvalidTaskId:
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kIdMismatch:
    case ErrorCode::kDimensionMismatch:
      return 400;
    case ErrorCode::kTaskNotFound:
    case ErrorCode::kIterationNotFound:
    case ErrorCode::kVersionNotFound:
      return 404;
    case ErrorCode::kDuplicateTask:
    case ErrorCode::kCorpusAlreadySet:
    case ErrorCode::kCorpusNotSet:
    case ErrorCode::kTaskBusy:
    case ErrorCode::kNoGoldLabels:
    case ErrorCode::kVersionExists:
    case ErrorCode::kNonContiguousIteration:
      return 409;
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kPartitionViolation:
    case ErrorCode::kPartialAnnotationFailure:
      return 502;
    case ErrorCode::kProviderUnavailable:
      return 503;
    case ErrorCode::kStoreCorrupted:
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

ServerConfig server_config_from_env(const provider::EnvLookup& lookup) {
  ServerConfig cfg;
  if (const auto bind = lookup("CODETECT_BIND_ADDR")) {
    const auto colon = bind->rfind(':');
    std::string host = colon == std::string::npos ? *bind : bind->substr(0, colon);
    if (colon != std::string::npos) {
      const std::string port = bind->substr(colon + 1);
      int p = 0;
      const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
      if (ec != std::errc() || ptr != port.data() + port.size() || p < 0 || p > 65535) {
        fail(ErrorCode::kInvalidArgument, "CODETECT_BIND_ADDR has a bad port: " + *bind);
      }
      cfg.port = p;
    }
    if (!host.empty()) cfg.host = host;
  }
  if (const auto origin = lookup("CODETECT_CORS_ORIGIN")) cfg.cors_origin = *origin;
  if (const auto workers = lookup("CODETECT_JOB_WORKERS")) {
    int w = 0;
    const auto [ptr, ec] = std::from_chars(workers->data(), workers->data() + workers->size(), w);
    if (ec != std::errc() || ptr != workers->data() + workers->size() || w < 1) {
      fail(ErrorCode::kInvalidArgument, "CODETECT_JOB_WORKERS must be a positive integer");
    }
    cfg.job_workers = w;
  }
  return cfg;
}

struct ApiServer::Impl {
  std::shared_ptr<store::Store> store;
  std::shared_ptr<provider::Gateway> gateway;
  ServerConfig config;
  JobManager jobs;
  httplib::Server http;
  std::thread listener;
  int bound_port = -1;

  Impl(std::shared_ptr<store::Store> s, std::shared_ptr<provider::Gateway> g, ServerConfig c)
      : store(std::move(s)), gateway(std::move(g)), config(std::move(c)), jobs(config.job_workers) {
    pipeline::validate(config.pipeline);
    routes();
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  // Maps library errors to status codes and JSON error bodies.
  static httplib::Server::Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send(res, http_status(e.code()), error_json(std::string(error_code_name(e.code())), e.what()));
      } catch (const std::exception& e) {
        send(res, 500, error_json("Internal", e.what()));
      }
    };
  }

  Json task_json(const std::string& task_id) {
    const auto t = store->get_task(task_id);
    Json iterations = Json::array();
    for (const auto& s : t.iterations) iterations.push_back(summary_json(s));
    const auto active = jobs.active_job(task_id);
    return Json{{"task_id", t.task_id},
                {"created_at", t.created_at},
                {"corpus_digest", t.corpus_digest ? Json(*t.corpus_digest) : Json(nullptr)},
                {"n_docs", t.n_docs},
                {"n_gold", t.n_gold},
                {"codebook_versions", t.codebook_versions},
                {"iterations", iterations},
                {"active_job_id", active ? Json(*active) : Json(nullptr)}};
  }

  IterationRecord iteration(const httplib::Request& req) {
    const auto& id = req.path_params.at("task_id");
    return store->get_iteration(id, parse_iteration_param(req.path_params.at("n")));
  }

  void routes() {
    http.set_payload_max_length(std::size_t{256} << 20);

    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      const std::string code = res.status == 404 ? "NotFound" : "HttpError";
      res.set_content(error_json(code, std::string(httplib::status_message(res.status))).dump(),
                      kJson);
      return httplib::Server::HandlerResponse::Handled;
    });
    http.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      if (config.cors_origin.empty()) return;
      res.set_header("Access-Control-Allow-Origin", config.cors_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    http.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http.Get("/openapi.json", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(embedded::openapi_json), kJson);
    });
    http.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, Json{{"status", "ok"}, {"provider_fingerprint", gateway->fingerprint()}});
    }));

    http.Get("/tasks", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, Json{{"task_ids", store->list_tasks()}});
    }));

    http.Post("/tasks", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = parse_body(req, false);
      reject_unknown_fields(body, {"task_id", "task_description", "labels", "handling_rules"});
      Codebook cb;
      cb.task_id = field<std::string>(body, "task_id");
      if (!is_valid_task_id(cb.task_id)) {
        fail(ErrorCode::kInvalidTaskId, "task_id must match [A-Za-z0-9_-]{1,64}");
      }
      cb.task_description = field<std::string>(body, "task_description");
      cb.labels = field<std::vector<LabelDef>>(body, "labels");
      if (body.contains("handling_rules")) {
        cb.handling_rules = dedupe_rules(field<std::vector<EdgeCaseRule>>(body, "handling_rules"));
      }
      validate(cb);
      store->create_task(cb.task_id, cb);
      send(res, 201, task_json(cb.task_id));
    }));

    http.Get("/tasks/:task_id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send(res, 200, task_json(req.path_params.at("task_id")));
    }));

    http.Post("/tasks/:task_id/corpus",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto& id = req.path_params.at("task_id");
                (void)store->get_task(id);
                std::string csv;
                if (req.is_multipart_form_data()) {
                  if (!req.has_file("file")) {
                    fail(ErrorCode::kInvalidArgument, "multipart upload needs a 'file' part");
                  }
                  csv = req.get_file_value("file").content;
                } else {
                  csv = req.body;
                }
                const auto docs = parse_corpus_csv(csv);
                const auto digest = store->put_corpus(id, docs);
                const auto task = store->get_task(id);
                Json out{{"n_docs", task.n_docs}, {"n_gold", task.n_gold}, {"corpus_digest", digest}};
                if (docs.size() < kSuggestedMinDocs || docs.size() > kSuggestedMaxDocs) {
                  out["warning"] = "corpus has " + std::to_string(docs.size()) +
                                   " documents; 500 to 1000 is the suggested range";
                } else {
                  out["warning"] = nullptr;
                }
                send(res, 200, out);
              }));

    http.Get("/tasks/:task_id/corpus",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, Json(store->get_corpus(req.path_params.at("task_id"))));
             }));

    http.Post("/tasks/:task_id/iterations",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.path_params.at("task_id");
                const Json body = parse_body(req, true);
                reject_unknown_fields(body, {"edge_threshold", "accepted_rules"});
                pipeline::PipelineConfig cfg = config.pipeline;
                if (body.contains("edge_threshold") && !body["edge_threshold"].is_null()) {
                  cfg.edge_threshold = field<double>(body, "edge_threshold");
                }
                pipeline::validate(cfg);
                std::optional<std::vector<EdgeCaseRule>> accepted;
                if (body.contains("accepted_rules") && !body["accepted_rules"].is_null()) {
                  accepted = field<std::vector<EdgeCaseRule>>(body, "accepted_rules");
                }
                const auto task = store->get_task(id);
                if (!task.corpus_digest) fail(ErrorCode::kCorpusNotSet, "upload a corpus first");

                const auto status = jobs.submit(
                    id,
                    [&] {
                      if (!accepted) return;
                      store->put_codebook(compose_codebook(store->latest_codebook(id), *accepted));
                    },
                    [this, id, cfg](const pipeline::Progress& progress) {
                      const Codebook cb = store->latest_codebook(id);
                      return pipeline::run_iteration(*gateway, *store, id, cb, cfg, progress)
                          .iteration;
                    });
                send(res, 202, job_json(status));
              }));

    http.Get("/tasks/:task_id/iterations",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               Json out = Json::array();
               for (const auto& s : store->get_task(req.path_params.at("task_id")).iterations) {
                 out.push_back(summary_json(s));
               }
               send(res, 200, out);
             }));

    http.Get("/tasks/:task_id/jobs", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& id = req.path_params.at("task_id");
      (void)store->get_task(id);
      Json out = Json::array();
      for (const auto& s : jobs.list(id)) out.push_back(job_json(s));
      send(res, 200, out);
    }));

    http.Get("/tasks/:task_id/jobs/:job_id",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto& id = req.path_params.at("task_id");
               (void)store->get_task(id);
               const auto s = jobs.get(req.path_params.at("job_id"));
               if (!s || s->task_id != id) {
                 send(res, 404, error_json("JobNotFound", "no such job for this task"));
                 return;
               }
               send(res, 200, job_json(*s));
             }));

    http.Get("/tasks/:task_id/iterations/:n",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, Json(iteration(req)));
             }));
    http.Get("/tasks/:task_id/iterations/:n/annotations",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, Json(iteration(req).annotations));
             }));
    http.Get("/tasks/:task_id/iterations/:n/projection",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, Json(iteration(req).projection));
             }));
    http.Get("/tasks/:task_id/iterations/:n/edge-clusters",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto rec = iteration(req);
               send(res, 200,
                    Json{{"iteration", rec.iteration},
                         {"edge_threshold", rec.edge_threshold},
                         {"clusters", rec.clusters},
                         {"merged", rec.merged},
                         {"edge_projection", rec.edge_projection}});
             }));

    http.Get("/tasks/:task_id/codebook",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, Json(store->latest_codebook(req.path_params.at("task_id"))));
             }));
    http.Get("/tasks/:task_id/codebook/history",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, Json(store->list_codebooks(req.path_params.at("task_id"))));
             }));
    http.Put("/tasks/:task_id/codebook",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto& id = req.path_params.at("task_id");
               const Json body = parse_body(req, false);
               reject_unknown_fields(body, {"task_description", "labels", "handling_rules"});
               CodebookEdit edit;
               if (body.contains("task_description")) {
                 edit.task_description = field<std::string>(body, "task_description");
               }
               if (body.contains("labels")) edit.labels = field<std::vector<LabelDef>>(body, "labels");
               if (body.contains("handling_rules")) {
                 edit.handling_rules = field<std::vector<EdgeCaseRule>>(body, "handling_rules");
               }
               if (edit.empty()) fail(ErrorCode::kInvalidArgument, "nothing to change");
               const Codebook next = update_codebook(store->latest_codebook(id), edit);
               store->put_codebook(next);
               send(res, 200, Json(next));
             }));

    http.Get("/tasks/:task_id/metrics",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto& id = req.path_params.at("task_id");
               const auto task = store->get_task(id);
               if (task.n_gold == 0) {
                 fail(ErrorCode::kNoGoldLabels, "the corpus has no gold_label column");
               }
               Json iterations = Json::array();
               for (int n = 0; n < static_cast<int>(task.iterations.size()); ++n) {
                 const auto rec = store->get_iteration(id, n);
                 iterations.push_back(
                     Json{{"iteration", rec.iteration},
                          {"codebook_version", rec.codebook_version},
                          {"metrics", rec.metrics ? Json(*rec.metrics) : Json(nullptr)}});
               }
               send(res, 200, Json{{"n_gold", task.n_gold}, {"iterations", iterations}});
             }));
  }
};

ApiServer::ApiServer(std::shared_ptr<store::Store> store, std::shared_ptr<provider::Gateway> gateway,
                     ServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(store), std::move(gateway), std::move(config))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind() {
  auto& i = *impl_;
  if (i.config.port == 0) {
    i.bound_port = i.http.bind_to_any_port(i.config.host);
  } else if (i.http.bind_to_port(i.config.host, i.config.port)) {
    i.bound_port = i.config.port;
  } else {
    i.bound_port = -1;
  }
  if (i.bound_port <= 0) {
    fail(ErrorCode::kIo, "cannot bind " + i.config.host + ":" + std::to_string(i.config.port));
  }
  return i.bound_port;
}

void ApiServer::listen() { impl_->http.listen_after_bind(); }

int ApiServer::start() {
  const int p = bind();
  impl_->listener = std::thread([this] { listen(); });
  impl_->http.wait_until_ready();
  return p;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

int ApiServer::port() const { return impl_->bound_port; }

}  // namespace edgebook::api
