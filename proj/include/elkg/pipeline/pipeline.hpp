#pragma once

// One ask: transform -> retrieve -> serialize -> render -> generate. A rag ask
// whose question matches no intent is answered nonRag with a NoIntentMatched
// warning. Every intermediate artifact lands in the returned QaTrace.

#include <chrono>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "elkg/context/context.hpp"
#include "elkg/kg/profile.hpp"
#include "elkg/llm/backend.hpp"
#include "elkg/rdf/store.hpp"
#include "elkg/transform/llm_transform.hpp"
#include "elkg/transform/transform.hpp"

namespace elkg::pipeline {

inline constexpr int kTraceVersion = 1;

/// Milliseconds per stage. Stages tile the ask, so their sum equals total_ms.
struct StageTimings {
  double transform_ms = 0;
  double retrieve_ms = 0;
  double serialize_ms = 0;
  double render_ms = 0;
  double generate_ms = 0;
  double total_ms = 0;

  [[nodiscard]] double stage_sum() const {
    return transform_ms + retrieve_ms + serialize_ms + render_ms + generate_ms;
  }
};

struct QaTrace {
  std::string question;
  llm::Mode requested_mode = llm::Mode::NonRag;
  llm::Mode mode = llm::Mode::NonRag;  // mode actually used
  std::optional<std::string> intent_id;
  std::map<std::string, std::string> slots;
  std::optional<std::string> query_text;
  std::optional<context::ContextTable> context_table;
  std::optional<std::string> context_text;
  std::optional<kg::LoadProfile> load_profile;
  std::string rendered_prompt;
  std::optional<llm::AnswerRecord> answer;
  StageTimings timings;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
};

/// Raised when a stage fails; carries the trace up to the failing stage.
class AskFailed : public Error {
public:
  AskFailed(QaTrace trace, std::exception_ptr cause, const std::string& what)
      : Error(what), trace_(std::move(trace)), cause_(std::move(cause)) {}
  [[nodiscard]] const QaTrace& trace() const noexcept { return trace_; }
  [[nodiscard]] const std::exception_ptr& cause() const noexcept { return cause_; }
  [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

private:
  QaTrace trace_;
  std::exception_ptr cause_;
};

struct AskOptions {
  std::size_t max_rows = context::kDefaultMaxRows;
  std::size_t max_chars = context::kDefaultMaxChars;
  bool include_query = true;
  const transform::Catalog* catalog = nullptr;  // null: built-in catalog
  const llm::Backend* query_writer = nullptr;   // set to let an LLM write queries for unmatched questions
  std::string schema_hint = transform::default_schema_hint();
};

namespace detail {

class Laps {
public:
  Laps() : start_(Clock::now()), last_(start_) {}
  double lap() {
    auto now = Clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }
  double total() const { return std::chrono::duration<double, std::milli>(last_ - start_).count(); }

private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_;
  Clock::time_point last_;
};

}  // namespace detail

inline QaTrace ask(const rdf::Store& store, const std::string& question, llm::Mode mode, const llm::Backend& backend,
                   const AskOptions& options = {}) {
  if (question.empty()) throw InvalidArgument("question must not be empty");
  QaTrace trace;
  trace.question = question;
  trace.requested_mode = mode;
  trace.mode = mode;
  detail::Laps laps;
  auto fail = [&](double& stage, const std::exception& e) -> AskFailed {
    stage += laps.lap();
    trace.timings.total_ms = laps.total();
    trace.error = e.what();
    return AskFailed(trace, std::current_exception(), e.what());
  };

  llm::PromptBundle bundle = llm::PromptBundle::non_rag(question);
  if (mode == llm::Mode::Rag) {
    const auto& catalog = options.catalog ? *options.catalog : transform::default_catalog();
    transform::TransformOutcome outcome;
    try {
      outcome = transform::transform(question, catalog);
      if (!outcome.matched && options.query_writer) {
        try {
          outcome = transform::llm_transform(question, options.schema_hint, *options.query_writer);
        } catch (const transform::GeneratedQueryRejected& e) {
          trace.warnings.push_back(std::string("GeneratedQueryRejected: ") + e.reason());
        }
      }
    } catch (const std::exception& e) {
      throw fail(trace.timings.transform_ms, e);
    }
    trace.timings.transform_ms += laps.lap();

    if (!outcome.matched) {
      trace.warnings.push_back(outcome.diagnostic.empty() ? transform::kNoIntentMatched : outcome.diagnostic);
      trace.warnings.emplace_back("answered without retrieval (nonRag fallback)");
      trace.mode = llm::Mode::NonRag;
      if (!outcome.intent_id.empty()) trace.intent_id = outcome.intent_id;
    } else {
      trace.intent_id = outcome.intent_id;
      trace.slots = outcome.slots;
      trace.query_text = outcome.query_text;
      try {
        trace.context_table = context::retrieve(store, outcome.query_text, options.max_rows);
        if (outcome.intent_id == "LoadProfileOfHouse") {
          try {
            trace.load_profile = kg::get_load_profile(store, outcome.slots.at("house"));
          } catch (const kg::NotFound& e) {
            trace.warnings.push_back(e.what());
          }
        }
      } catch (const std::exception& e) {
        throw fail(trace.timings.retrieve_ms, e);
      }
      trace.timings.retrieve_ms += laps.lap();

      trace.context_text = context::serialize(*trace.context_table, options.max_rows, options.max_chars);
      trace.timings.serialize_ms += laps.lap();

      bundle = llm::PromptBundle::rag(question, outcome.query_text, *trace.context_text);
      bundle.attachment = trace.load_profile;
      bundle.intent = llm::IntentHint{outcome.intent_id, outcome.slots};
      bundle.include_query = options.include_query;
    }
  }
  try {
    trace.rendered_prompt = llm::render_prompt(bundle);
  } catch (const std::exception& e) {
    throw fail(trace.timings.render_ms, e);
  }
  trace.timings.render_ms += laps.lap();

  try {
    trace.answer = llm::generate(backend, bundle);
  } catch (const std::exception& e) {
    throw fail(trace.timings.generate_ms, e);
  }
  trace.timings.generate_ms += laps.lap();
  trace.timings.total_ms = laps.total();
  return trace;
}

// -- JSON --------------------------------------------------------------------

inline nlohmann::json to_json(const context::ContextTable& t) {
  return {{"header", t.header}, {"rows", t.rows}, {"truncated", t.truncated}, {"totalRows", t.total_rows}};
}

inline nlohmann::json to_json(const llm::AnswerRecord& a) {
  nlohmann::json j{{"text", a.text}, {"backendId", a.backend_id}, {"latencyMs", a.latency_ms}, {"usage", nullptr}};
  if (a.usage)
    j["usage"] = {{"promptTokens", a.usage->prompt_tokens}, {"completionTokens", a.usage->completion_tokens}};
  return j;
}

inline nlohmann::json to_json(const QaTrace& t) {
  auto opt = [](const auto& o) -> nlohmann::json { return o ? nlohmann::json(*o) : nlohmann::json(nullptr); };
  nlohmann::json j{{"v", kTraceVersion},
                   {"question", t.question},
                   {"requestedMode", llm::to_string(t.requested_mode)},
                   {"mode", llm::to_string(t.mode)},
                   {"intentId", opt(t.intent_id)},
                   {"slots", t.slots},
                   {"queryText", opt(t.query_text)},
                   {"contextTable", t.context_table ? to_json(*t.context_table) : nlohmann::json(nullptr)},
                   {"contextText", opt(t.context_text)},
                   {"loadProfile", nullptr},
                   {"renderedPrompt", t.rendered_prompt},
                   {"answer", t.answer ? to_json(*t.answer) : nlohmann::json(nullptr)},
                   {"timings",
                    {{"transformMs", t.timings.transform_ms},
                     {"retrieveMs", t.timings.retrieve_ms},
                     {"serializeMs", t.timings.serialize_ms},
                     {"renderMs", t.timings.render_ms},
                     {"generateMs", t.timings.generate_ms},
                     {"totalMs", t.timings.total_ms}}},
                   {"warnings", t.warnings},
                   {"error", opt(t.error)}};
  if (t.load_profile)
    j["loadProfile"] = {{"household", t.load_profile->household_ref},
                        {"hourly", t.load_profile->hourly_averages},
                        {"image", t.load_profile->image.empty() ? nlohmann::json(nullptr)
                                                                : nlohmann::json(t.load_profile->image)}};
  return j;
}

/// Appends traces to a file, one JSON document per line. Safe to share
/// between threads.
class TraceLog {
public:
  explicit TraceLog(std::string path) : path_(std::move(path)) {}

  void append(const QaTrace& t) { append_line(to_json(t).dump()); }

  void append_line(const std::string& line) {
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot open trace log: " + path_);
    out << line << '\n';
  }

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
  std::mutex mutex_;
};

}  // namespace elkg::pipeline
