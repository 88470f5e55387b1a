// elkg: build fixtures, load, query, ask, evaluate and serve.
//
// Exit codes: 0 success, 1 query error, 2 input or config error, 3 backend error.

#include <CLI11.hpp>
#include <unistd.h>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "elkg/context/context.hpp"
#include "elkg/eval/eval.hpp"
#include "elkg/kg/builder.hpp"
#include "elkg/kg/fixture.hpp"
#include "elkg/llm/registry.hpp"
#include "elkg/pipeline/pipeline.hpp"
#include "elkg/rdf/turtle.hpp"
#include "elkg/service/service.hpp"
#include "elkg/sparql/json_results.hpp"

namespace {

using namespace elkg;

constexpr int kOk = 0;
constexpr int kQueryError = 1;
constexpr int kInputError = 2;
constexpr int kBackendError = 3;

bool use_color() {
  const char* no_color = std::getenv("NO_COLOR");
  return (no_color == nullptr || *no_color == '\0') && isatty(STDERR_FILENO);
}

void report(const std::string& label, const std::string& message, const char* color) {
  if (use_color())
    std::cerr << color << label << "\033[0m " << message << "\n";
  else
    std::cerr << label << " " << message << "\n";
}

void error(const std::string& message) { report("error:", message, "\033[31m"); }
void warning(const std::string& message) { report("warning:", message, "\033[33m"); }

rdf::Store load_kg(const std::string& path) {
  if (path.empty()) return kg::build_graph(kg::generate_seed_fixture(kg::default_fixture_spec()));
  rdf::Store store;
  rdf::load_turtle(store, kg::read_file(path));
  return store;
}

service::ServiceConfig load_config(const std::string& path) {
  return path.empty() ? service::ServiceConfig{} : service::ServiceConfig::from_file(path);
}

llm::BackendRegistry load_registry(const service::ServiceConfig& config, bool verbose) {
  llm::RemoteChatBackend::Logger logger;
  if (verbose) logger = [](const std::string& line) { std::cerr << line << "\n"; };
  return llm::BackendRegistry::from_json(config.backends, logger);
}

struct Options {
  std::string config;
  bool verbose = false;

  std::string spec;
  std::string out_dir;

  std::string kg;
  std::string query_file;
  std::string query_inline;
  std::string format = "table";
  std::size_t max_rows = context::kDefaultMaxRows;
  std::size_t max_chars = context::kDefaultMaxChars;

  std::string question;
  bool rag = true;
  bool no_rag = false;
  std::string backend;
  bool show_trace = false;
  std::string trace_out;
  bool no_query_section = false;

  std::string suite;
  std::string backends;
  std::string report_out;
  std::string modes = "nonRag,rag";
  std::size_t parallelism = 4;

  std::string bind;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_seed(const Options& o) {
  auto spec = o.spec.empty() ? kg::default_fixture_spec() : kg::parse_fixture_spec(kg::read_file(o.spec));
  auto bundle = kg::generate_seed_fixture(spec);
  auto store = kg::build_graph(bundle);
  kg::write_bundle(o.out_dir, bundle);
  kg::write_file(std::filesystem::path(o.out_dir) / "seed.ttl", rdf::write_turtle(store));
  std::cout << "wrote " << bundle.households.size() << " households and " << store.size() << " triples to "
            << o.out_dir << "\n";
  return kOk;
}

int cmd_load(const Options& o) {
  auto store = load_kg(o.kg);
  std::cout << store.size() << " triples\n";
  return kOk;
}

int cmd_query(const Options& o) {
  std::string text = o.query_file.empty() ? o.query_inline : kg::read_file(o.query_file);
  auto store = load_kg(o.kg);
  sparql::ResultTable table;
  try {
    table = sparql::evaluate(store, sparql::parse(text));
  } catch (const PositionedError& e) {
    error(e.what());
    return kQueryError;
  } catch (const sparql::QueryError& e) {
    error(e.what());
    return kQueryError;
  }
  if (o.format == "json")
    std::cout << sparql::to_json(table).dump(2) << "\n";
  else
    std::cout << context::serialize(context::to_context(table, o.max_rows), o.max_rows, o.max_chars) << "\n";
  return kOk;
}

int cmd_ask(const Options& o) {
  auto config = load_config(o.config);
  auto registry = load_registry(config, o.verbose);
  auto id = o.backend.empty() ? config.default_backend : o.backend;
  auto backend = registry.find(id);
  if (!backend) {
    error("unknown backend: " + id);
    return kInputError;
  }
  auto store = load_kg(o.kg.empty() ? config.kg_path : o.kg);
  pipeline::AskOptions options;
  options.max_rows = o.max_rows;
  options.max_chars = o.max_chars;
  options.include_query = !o.no_query_section && config.include_query;
  auto emit_trace = [&](const pipeline::QaTrace& t) {
    if (o.show_trace) std::cerr << pipeline::to_json(t).dump(2) << "\n";
    if (!o.trace_out.empty()) pipeline::TraceLog(o.trace_out).append(t);
  };
  try {
    auto trace = pipeline::ask(store, o.question, o.no_rag ? llm::Mode::NonRag : llm::Mode::Rag, *backend, options);
    for (const auto& w : trace.warnings) warning(w);
    emit_trace(trace);
    std::cout << trace.answer->text << "\n";
    return kOk;
  } catch (const pipeline::AskFailed& e) {
    emit_trace(e.trace());
    error(e.what());
    try {
      e.rethrow_cause();
    } catch (const llm::BackendError&) {
      return kBackendError;
    } catch (const PositionedError&) {
      return kQueryError;
    } catch (const sparql::QueryError&) {
      return kQueryError;
    } catch (...) {
    }
    return kInputError;
  }
}

int cmd_eval(const Options& o) {
  auto config = load_config(o.config);
  auto registry = load_registry(config, o.verbose);
  auto suite = eval::Suite::from_file(o.suite);
  auto store = load_kg(o.kg.empty() ? config.kg_path : o.kg);
  std::vector<eval::BackendRef> refs;
  for (const auto& id : split_list(o.backends)) {
    std::shared_ptr<const llm::Backend> b = registry.find(id);
    if (!b)
      if (const auto* canned = suite.find_canned(id)) b = eval::make_canned_backend(suite, *canned);
    if (!b) warning("unknown backend: " + id);
    refs.push_back({id, b});
  }
  if (refs.empty()) {
    error("--backends names no backend");
    return kInputError;
  }
  eval::RunOptions options;
  options.modes.clear();
  for (const auto& m : split_list(o.modes)) options.modes.push_back(llm::parse_mode(m));
  options.parallelism = o.parallelism;
  options.ask.max_rows = o.max_rows;
  options.ask.max_chars = o.max_chars;
  std::unique_ptr<pipeline::TraceLog> log;
  if (!o.trace_out.empty()) {
    log = std::make_unique<pipeline::TraceLog>(o.trace_out);
    options.trace_log = log.get();
  }
  auto report = eval::run_suite(store, suite, refs, options);
  std::cout << eval::to_text(report);
  if (!o.report_out.empty()) kg::write_file(o.report_out, eval::to_json(report).dump(2) + "\n");
  return kOk;
}

std::atomic<bool> g_stop{false};

int cmd_serve(const Options& o) {
  auto config = load_config(o.config);
  if (!o.kg.empty()) config.kg_path = o.kg;
  if (!o.bind.empty()) config = service::ServiceConfig::from_json({{"bind", o.bind},
                                                                   {"kgPath", config.kg_path},
                                                                   {"maxRows", config.max_rows},
                                                                   {"maxChars", config.max_chars},
                                                                   {"includeQuery", config.include_query},
                                                                   {"defaultBackend", config.default_backend},
                                                                   {"traceLog", config.trace_log},
                                                                   {"backends", config.backends}});
  auto registry = load_registry(config, o.verbose);
  service::Service svc(config, std::move(registry), [](const std::string& line) { std::cerr << line << "\n"; });
  int port = svc.start(config.host, config.port);
  std::cerr << "listening on http://" << config.host << ":" << port << "\n";
  svc.set_store(std::make_shared<const rdf::Store>(service::load_graph(config)));
  std::cerr << "store loaded: " << svc.store()->size() << " triples\n";
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  svc.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Question answering over a household electricity knowledge graph"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Service config file (backends, caps, bind address)");
  app.add_flag("-v,--verbose", o.verbose, "Log backend requests to stderr");

  auto* seed = app.add_subcommand("seed", "Generate fixture CSVs and seed.ttl");
  seed->add_option("--spec", o.spec, "Fixture spec CSV (default: built-in spec)");
  seed->add_option("--out", o.out_dir, "Output directory")->required();

  auto* load = app.add_subcommand("load", "Parse a Turtle file and report its size");
  load->add_option("--kg", o.kg, "Turtle file")->required();

  auto* query = app.add_subcommand("query", "Run a SPARQL query");
  query->add_option("--kg", o.kg, "Turtle file (default: built-in seed graph)");
  auto* qfile = query->add_option("--file", o.query_file, "Query file");
  auto* qinline = query->add_option("--inline", o.query_inline, "Query text");
  qfile->excludes(qinline);
  query->add_option("--format", o.format, "table or json")->check(CLI::IsMember({"table", "json"}));
  query->add_option("--max-rows", o.max_rows, "Row cap for table output")->check(CLI::PositiveNumber);
  query->add_option("--max-chars", o.max_chars, "Character cap for table output")->check(CLI::PositiveNumber);

  auto* ask = app.add_subcommand("ask", "Answer one question");
  ask->add_option("--kg", o.kg, "Turtle file (default: config kgPath or built-in seed graph)");
  ask->add_option("--question", o.question, "Question text")->required();
  auto* rag = ask->add_flag("--rag", o.rag, "Retrieve context from the graph (default)");
  auto* no_rag = ask->add_flag("--no-rag", o.no_rag, "Send the bare question");
  rag->excludes(no_rag);
  ask->add_option("--backend", o.backend, "Backend id (default: config defaultBackend)");
  ask->add_flag("--show-trace", o.show_trace, "Print the trace JSON to stderr");
  ask->add_option("--trace-out", o.trace_out, "Append the trace to this NDJSON file");
  ask->add_flag("--no-query-section", o.no_query_section, "Leave the query out of the rendered prompt");
  ask->add_option("--max-rows", o.max_rows, "Context row cap")->check(CLI::PositiveNumber);
  ask->add_option("--max-chars", o.max_chars, "Context character cap")->check(CLI::PositiveNumber);

  auto* ev = app.add_subcommand("eval", "Run a prompt suite against backends");
  ev->add_option("--kg", o.kg, "Turtle file (default: config kgPath or built-in seed graph)");
  ev->add_option("--suite", o.suite, "Suite JSON file")->required();
  ev->add_option("--backends", o.backends, "Comma-separated backend ids")->required();
  ev->add_option("--out", o.report_out, "Write the JSON report here");
  ev->add_option("--modes", o.modes, "Comma-separated modes (nonRag,rag)");
  ev->add_option("--parallel", o.parallelism, "Cells run concurrently")->check(CLI::PositiveNumber);
  ev->add_option("--trace-out", o.trace_out, "Append every trace to this NDJSON file");
  ev->add_option("--max-rows", o.max_rows, "Context row cap")->check(CLI::PositiveNumber);
  ev->add_option("--max-chars", o.max_chars, "Context character cap")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--kg", o.kg, "Turtle file (overrides config kgPath)");
  serve->add_option("--bind", o.bind, "host:port (overrides config bind)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }
  if (query->parsed() && o.query_file.empty() && o.query_inline.empty()) {
    error("query needs --file or --inline");
    return kInputError;
  }

  try {
    if (seed->parsed()) return cmd_seed(o);
    if (load->parsed()) return cmd_load(o);
    if (query->parsed()) return cmd_query(o);
    if (ask->parsed()) return cmd_ask(o);
    if (ev->parsed()) return cmd_eval(o);
    if (serve->parsed()) return cmd_serve(o);
  } catch (const llm::BackendError& e) {
    error(e.what());
    return kBackendError;
  } catch (const std::exception& e) {
    error(e.what());
    return kInputError;
  }
  return kInputError;
}
