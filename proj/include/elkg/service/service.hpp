#pragma once

// HTTP facade over the store and the pipeline.
//
//   POST /sparql         application/sparql-query body -> SPARQL 1.1 JSON results
//   POST /ask            {"question", "rag", "backendId"} -> trace JSON
//   GET  /resource/NAME  triples with the resource as subject, grouped by predicate
//   GET  /health         {"status", "tripleCount", "backends"}
//
// Every response carries CORS headers; OPTIONS requests get 204.

#include "elkg/http.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <thread>

#include "elkg/kg/builder.hpp"
#include "elkg/kg/fixture.hpp"
#include "elkg/llm/registry.hpp"
#include "elkg/pipeline/pipeline.hpp"
#include "elkg/rdf/store.hpp"
#include "elkg/rdf/turtle.hpp"
#include "elkg/sparql/json_results.hpp"
#include "elkg/sparql/parser.hpp"

namespace elkg::service {

inline constexpr std::size_t kMaxQueryBytes = 64 * 1024;
inline constexpr std::size_t kMaxQuestionChars = 2000;
inline constexpr std::size_t kWorkerThreads = 32;  // an ask may block on a slow backend

/// Service settings. Keys: bind ("host:port"), kgPath (Turtle file; empty for
/// the built-in seed graph), maxRows, maxChars, includeQuery, defaultBackend,
/// traceLog, backends[] (see llm/registry.hpp). Secrets are never read from
/// here; remote backends name an environment variable instead.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string kg_path;
  std::size_t max_rows = context::kDefaultMaxRows;
  std::size_t max_chars = context::kDefaultMaxChars;
  bool include_query = true;
  std::string default_backend = "extractive-mock";
  std::string trace_log;
  nlohmann::json backends = nlohmann::json::array({{{"id", "extractive-mock"}, {"kind", "extractive-mock"}}});

  static ServiceConfig from_json(const nlohmann::json& j) {
    ServiceConfig c;
    try {
      if (j.contains("bind")) {
        auto bind = j["bind"].get<std::string>();
        auto colon = bind.rfind(':');
        if (colon == std::string::npos) throw InvalidArgument("bind must be host:port, got '" + bind + "'");
        c.host = bind.substr(0, colon);
        c.port = std::stoi(bind.substr(colon + 1));
        if (c.port < 0 || c.port > 65535) throw InvalidArgument("bind port out of range: " + bind);
      }
      c.kg_path = j.value("kgPath", "");
      c.max_rows = j.value("maxRows", c.max_rows);
      c.max_chars = j.value("maxChars", c.max_chars);
      c.include_query = j.value("includeQuery", c.include_query);
      c.default_backend = j.value("defaultBackend", c.default_backend);
      c.trace_log = j.value("traceLog", "");
      if (j.contains("backends")) c.backends = j["backends"];
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("malformed service config: ") + e.what());
    } catch (const std::logic_error& e) {
      throw InvalidArgument(std::string("malformed service config: ") + e.what());
    }
    if (c.max_rows < 1) throw InvalidArgument("maxRows must be >= 1");
    if (!c.backends.is_array()) throw InvalidArgument("backends must be an array");
    for (const auto& b : c.backends)
      if (b.contains("apiKey")) throw InvalidArgument("API keys must come from the environment, not the config file");
    return c;
  }

  static ServiceConfig from_file(const std::string& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(kg::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("config " + path + " is not JSON: " + e.what());
    }
    return from_json(j);
  }

  /// Environment variables named by remote backends, for log redaction.
  [[nodiscard]] std::vector<std::string> secret_env_vars() const {
    std::vector<std::string> out;
    for (const auto& b : backends)
      if (b.contains("apiKeyEnv") && b["apiKeyEnv"].is_string()) out.push_back(b["apiKeyEnv"].get<std::string>());
    return out;
  }
};

/// Loads the configured graph: a Turtle file, or the built-in seed graph.
inline rdf::Store load_graph(const ServiceConfig& c) {
  if (c.kg_path.empty()) return kg::build_graph(kg::generate_seed_fixture(kg::default_fixture_spec()));
  rdf::Store store;
  rdf::load_turtle(store, kg::read_file(c.kg_path));
  return store;
}

inline nlohmann::json error_body(const std::string& type, const std::string& message) {
  return {{"error", {{"type", type}, {"message", message}}}};
}

inline nlohmann::json error_body(const std::string& type, const PositionedError& e) {
  return {{"error", {{"type", type}, {"message", e.what()}, {"line", e.line()}, {"column", e.column()}}}};
}

class Service {
public:
  using Logger = std::function<void(const std::string&)>;

  Service(ServiceConfig config, llm::BackendRegistry registry, Logger logger = {})
      : config_(std::move(config)), registry_(std::move(registry)), logger_(std::move(logger)) {
    if (!config_.trace_log.empty()) trace_log_ = std::make_unique<pipeline::TraceLog>(config_.trace_log);
    install();
  }

  ~Service() { stop(); }
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Makes the store visible to requests; until then data endpoints answer 503.
  void set_store(std::shared_ptr<const rdf::Store> store) {
    std::lock_guard lock(store_mutex_);
    store_ = std::move(store);
  }

  [[nodiscard]] std::shared_ptr<const rdf::Store> store() const {
    std::lock_guard lock(store_mutex_);
    return store_;
  }

  [[nodiscard]] const llm::BackendRegistry& registry() const noexcept { return registry_; }
  httplib::Server& http() noexcept { return server_; }

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port.
  int start(const std::string& host, int port) {
    int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    port_ = bound;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  [[nodiscard]] int port() const noexcept { return port_; }

  [[nodiscard]] std::string redact(std::string line) const {
    for (const auto& var : config_.secret_env_vars())
      if (const char* v = std::getenv(var.c_str()); v && *v) line = llm::redact(std::move(line), v);
    return line;
  }

private:
  static void send_json(httplib::Response& res, int status, const nlohmann::json& body,
                        const char* content_type = "application/json") {
    res.status = status;
    res.set_content(body.dump(), content_type);
  }

  void log(const std::string& line) const {
    if (logger_) logger_(redact(line));
  }

  void install() {
    server_.new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };
    server_.set_payload_max_length(4 * kMaxQueryBytes);
    server_.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server_.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      log(req.method + " " + req.path + " " + std::to_string(res.status));
    });
    server_.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) { health(res); });
    server_.Post("/sparql", [this](const httplib::Request& req, httplib::Response& res) { sparql(req, res); });
    server_.Post("/ask", [this](const httplib::Request& req, httplib::Response& res) { ask(req, res); });
    server_.Get(R"(/resource/([^/]+))",
                [this](const httplib::Request& req, httplib::Response& res) { resource(req.matches[1], res); });
  }

  void health(httplib::Response& res) const {
    auto s = store();
    if (!s) return send_json(res, 503, {{"status", "loading"}, {"tripleCount", 0}, {"backends", registry_.ids()}});
    send_json(res, 200, {{"status", "ok"}, {"tripleCount", s->size()}, {"backends", registry_.ids()}});
  }

  void sparql(const httplib::Request& req, httplib::Response& res) const {
    auto type = req.get_header_value("Content-Type");
    if (type.rfind("application/sparql-query", 0) != 0)
      return send_json(res, 415, error_body("UnsupportedMediaType", "Content-Type must be application/sparql-query"));
    if (req.body.size() > kMaxQueryBytes)
      return send_json(res, 413, error_body("QueryTooLarge", "query exceeds " + std::to_string(kMaxQueryBytes) + " bytes"));
    auto s = store();
    if (!s) return send_json(res, 503, error_body("NotReady", "store is not loaded"));
    try {
      auto table = sparql::evaluate(*s, sparql::parse(req.body));
      send_json(res, 200, sparql::to_json(table), "application/sparql-results+json");
    } catch (const PositionedError& e) {
      send_json(res, 400, error_body("SyntaxError", e));
    } catch (const sparql::QueryError& e) {
      send_json(res, 400, error_body("QueryError", e.what()));
    }
  }

  void ask(const httplib::Request& req, httplib::Response& res) const {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      return send_json(res, 400, error_body("BadRequest", std::string("body is not JSON: ") + e.what()));
    }
    if (!body.is_object()) return send_json(res, 400, error_body("BadRequest", "body must be a JSON object"));
    if (!body.contains("question") || !body["question"].is_string())
      return send_json(res, 400, error_body("BadRequest", "question must be a string"));
    auto question = body["question"].get<std::string>();
    if (question.empty()) return send_json(res, 400, error_body("BadRequest", "question must not be empty"));
    if (question.size() > kMaxQuestionChars)
      return send_json(res, 400, error_body("BadRequest", "question exceeds " + std::to_string(kMaxQuestionChars) + " characters"));
    bool rag = true;
    if (body.contains("rag")) {
      if (!body["rag"].is_boolean()) return send_json(res, 400, error_body("BadRequest", "rag must be a boolean"));
      rag = body["rag"].get<bool>();
    }
    std::string backend_id = config_.default_backend;
    if (body.contains("backendId") && !body["backendId"].is_null()) {
      if (!body["backendId"].is_string()) return send_json(res, 400, error_body("BadRequest", "backendId must be a string"));
      backend_id = body["backendId"].get<std::string>();
    }
    auto backend = registry_.find(backend_id);
    if (!backend) return send_json(res, 404, error_body("UnknownBackend", "unknown backend: " + backend_id));
    auto s = store();
    if (!s) return send_json(res, 503, error_body("NotReady", "store is not loaded"));

    pipeline::AskOptions options;
    options.max_rows = config_.max_rows;
    options.max_chars = config_.max_chars;
    options.include_query = config_.include_query;
    try {
      auto trace = pipeline::ask(*s, question, rag ? llm::Mode::Rag : llm::Mode::NonRag, *backend, options);
      if (trace_log_) trace_log_->append(trace);
      send_json(res, 200, pipeline::to_json(trace));
    } catch (const pipeline::AskFailed& e) {
      if (trace_log_) trace_log_->append(e.trace());
      int status = 500;
      std::string type = "InternalError";
      try {
        e.rethrow_cause();
      } catch (const llm::Timeout&) {
        status = 504;
        type = "BackendTimeout";
      } catch (const llm::BackendError&) {
        status = 502;
        type = "BackendError";
      } catch (...) {
      }
      auto out = error_body(type, redact(e.what()));
      out["trace"] = pipeline::to_json(e.trace());
      out["trace"]["error"] = redact(e.what());
      send_json(res, status, out);
    } catch (const std::exception& e) {
      send_json(res, 500, error_body("InternalError", redact(e.what())));
    }
  }

  void resource(const std::string& name, httplib::Response& res) const {
    auto s = store();
    if (!s) return send_json(res, 503, error_body("NotReady", "store is not loaded"));
    rdf::Term subject;
    try {
      subject = kg::vocab::res(name);
    } catch (const Error&) {
      return send_json(res, 404, error_body("NotFound", "no such resource: " + name));
    }
    auto triples = s->match(subject, std::nullopt, std::nullopt);
    if (triples.empty()) return send_json(res, 404, error_body("NotFound", "no such resource: " + name));
    std::sort(triples.begin(), triples.end(), [](const rdf::Triple& a, const rdf::Triple& b) {
      return std::pair(a.predicate.value(), a.object.to_ntriples()) < std::pair(b.predicate.value(), b.object.to_ntriples());
    });
    nlohmann::json properties = nlohmann::json::object();
    for (const auto& t : triples) properties[t.predicate.value()].push_back(sparql::term_to_json(t.object));
    send_json(res, 200, {{"iri", subject.value()}, {"name", name}, {"properties", properties}});
  }

  ServiceConfig config_;
  llm::BackendRegistry registry_;
  Logger logger_;
  std::unique_ptr<pipeline::TraceLog> trace_log_;
  mutable std::mutex store_mutex_;
  std::shared_ptr<const rdf::Store> store_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace elkg::service
