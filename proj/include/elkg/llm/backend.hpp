#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "elkg/context/context.hpp"
#include "elkg/llm/prompt.hpp"

namespace elkg::llm {

// -- errors ----------------------------------------------------------------

class BackendError : public Error {
public:
  using Error::Error;
};

class Timeout : public BackendError {
public:
  explicit Timeout(const std::string& detail) : BackendError("LLM backend timed out: " + detail) {}
};

class HttpStatus : public BackendError {
public:
  HttpStatus(int code, std::string body_excerpt)
      : BackendError("LLM backend returned HTTP " + std::to_string(code) + ": " + body_excerpt),
        code_(code),
        excerpt_(std::move(body_excerpt)) {}
  [[nodiscard]] int code() const noexcept { return code_; }
  [[nodiscard]] const std::string& excerpt() const noexcept { return excerpt_; }

private:
  int code_;
  std::string excerpt_;
};

class MalformedResponse : public BackendError {
public:
  explicit MalformedResponse(const std::string& detail) : BackendError("malformed LLM response: " + detail) {}
};

class MissingApiKey : public BackendError {
public:
  explicit MissingApiKey(std::string env_var)
      : BackendError("API key environment variable is not set: " + env_var), env_var_(std::move(env_var)) {}
  [[nodiscard]] const std::string& env_var() const noexcept { return env_var_; }

private:
  std::string env_var_;
};

class ContextUnparseable : public BackendError {
public:
  explicit ContextUnparseable(const std::string& detail) : BackendError("cannot parse context block: " + detail) {}
};

// -- interface ---------------------------------------------------------------

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct Completion {
  std::string text;
  std::optional<TokenUsage> usage;
};

struct AnswerRecord {
  std::string text;
  std::string backend_id;
  double latency_ms = 0;
  std::optional<TokenUsage> usage;
};

/// One LLM backend. Implementations must be safe to call concurrently.
class Backend {
public:
  virtual ~Backend() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  /// Produces the answer text for one prompt bundle.
  [[nodiscard]] virtual Completion complete(const PromptBundle& bundle) const = 0;
};

inline AnswerRecord generate(const Backend& backend, const PromptBundle& bundle) {
  bundle.validate();
  auto start = std::chrono::steady_clock::now();
  auto c = backend.complete(bundle);
  auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (c.text.empty()) throw MalformedResponse("empty answer text from " + backend.id());
  return {std::move(c.text), backend.id(), elapsed, c.usage};
}

// -- scripted mock -----------------------------------------------------------

/// Canned replies for tests: first a queued reply, then an exact
/// (mode, question) match, then the default reply.
class ScriptedBackend : public Backend {
public:
  explicit ScriptedBackend(std::string id = "scripted-mock") : id_(std::move(id)) {}

  void reply(Mode mode, const std::string& question, std::string text) {
    std::lock_guard lock(mutex_);
    replies_[{mode, question}] = std::move(text);
  }
  void set_default(std::string text) {
    std::lock_guard lock(mutex_);
    default_ = std::move(text);
  }
  void enqueue(std::string text) {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(text));
  }
  /// Every later call throws this exception.
  void set_failure(std::exception_ptr e) {
    std::lock_guard lock(mutex_);
    failure_ = std::move(e);
  }
  void set_delay(std::chrono::milliseconds d) {
    std::lock_guard lock(mutex_);
    delay_ = d;
  }

  [[nodiscard]] std::string id() const override { return id_; }

  [[nodiscard]] Completion complete(const PromptBundle& bundle) const override {
    std::chrono::milliseconds delay;
    std::optional<std::string> text;
    {
      std::lock_guard lock(mutex_);
      if (failure_) std::rethrow_exception(failure_);
      delay = delay_;
      if (!queue_.empty()) {
        text = std::move(queue_.front());
        queue_.pop_front();
      } else if (auto it = replies_.find({bundle.mode, bundle.question}); it != replies_.end()) {
        text = it->second;
      } else {
        text = default_;
      }
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    if (!text) throw BackendError(id_ + ": no scripted reply for question: " + bundle.question);
    return {*text, std::nullopt};
  }

private:
  std::string id_;
  mutable std::mutex mutex_;
  std::map<std::pair<Mode, std::string>, std::string> replies_;
  std::optional<std::string> default_;
  mutable std::deque<std::string> queue_;
  std::exception_ptr failure_;
  std::chrono::milliseconds delay_{0};
};

// -- extractive mock ---------------------------------------------------------

inline constexpr const char* kNoRecordsAnswer = "No matching records were found in the knowledge graph.";
inline constexpr const char* kNoContextAnswer =
    "No knowledge graph context was supplied, so no grounded answer can be given.";

/// "X", "X and Y", "X, Y, and Z".
inline std::string english_list(const std::vector<std::string>& items) {
  if (items.empty()) return {};
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) out += items[i] + ", ";
  return out + "and " + items.back();
}

/// Distinct values of the first context column, in serialized order.
inline std::vector<std::string> first_column_values(const std::string& context_text) {
  context::ContextTable table;
  try {
    table = context::parse_serialized(context_text);
  } catch (const context::ContextParseError& e) {
    throw ContextUnparseable(e.what());
  }
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& row : table.rows)
    if (!row.empty() && seen.insert(row[0]).second) out.push_back(row[0]);
  return out;
}

inline std::string profile_summary(const kg::LoadProfile& p) {
  const auto& v = p.hourly_averages;
  std::size_t peak = 0;
  std::size_t low = 0;
  for (std::size_t h = 1; h < v.size(); ++h) {
    if (v[h] > v[peak]) peak = h;
    if (v[h] < v[low]) low = h;
  }
  auto mean = [&](std::size_t from, std::size_t to) {
    double s = 0;
    for (std::size_t h = from; h <= to; ++h) s += v[h];
    return std::round(s / static_cast<double>(to - from + 1) * 1000.0) / 1000.0;
  };
  const auto dataset = kg::dataset_prefix(p.household_ref);
  return "The load profile of " + p.household_ref + " of the " + dataset + " dataset peaks at hour " +
         std::to_string(peak) + " with " + kg::num(v[peak]) + " kW and is lowest at hour " + std::to_string(low) +
         " with " + kg::num(v[low]) + " kW; hours 0-5 average " + kg::num(mean(0, 5)) + " kW against " +
         kg::num(mean(5, 10)) + " kW over hours 5-10 and " + kg::num(mean(16, 23)) + " kW over hours 16-23.";
}

/// Deterministic grounded answers built only from the prompt's context.
class ExtractiveMock : public Backend {
public:
  explicit ExtractiveMock(std::string id = "extractive-mock") : id_(std::move(id)) {}

  [[nodiscard]] std::string id() const override { return id_; }

  [[nodiscard]] Completion complete(const PromptBundle& bundle) const override {
    if (bundle.mode == Mode::NonRag || !bundle.context_text) return {kNoContextAnswer, std::nullopt};
    if (bundle.attachment) return {profile_summary(*bundle.attachment), std::nullopt};
    auto values = first_column_values(*bundle.context_text);
    if (values.empty()) return {kNoRecordsAnswer, std::nullopt};
    return {"The electricity consumption datasets " + qualifier(bundle) + " include " + english_list(values) + ".",
            std::nullopt};
  }

  static std::string qualifier(const PromptBundle& bundle) {
    if (bundle.intent && bundle.intent->id == "DatasetsByCountry") {
      auto it = bundle.intent->slots.find("country");
      if (it != bundle.intent->slots.end() && it->second == "United Kingdom") return "collected in the UK";
    }
    return "retrieved from the knowledge graph";
  }

private:
  std::string id_;
};

}  // namespace elkg::llm
