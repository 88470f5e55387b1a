#pragma once

// OpenAI-compatible chat-completions client.
//
// Request:  POST {endpointUrl}  {"model", "messages": [{"role": "user", "content": prompt}], "temperature"}
// Response: choices[0].message.content, optional usage.{prompt,completion}_tokens
//
// The API key is read from the named environment variable on every request
// and is never stored or logged.

#include "elkg/http.hpp"

#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <nlohmann/json.hpp>

#include "elkg/llm/backend.hpp"

namespace elkg::llm {

struct LlmConfig {
  std::string id = "remote-chat";
  std::string endpoint_url;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model_name;
  std::string api_key_env_var;  // empty: send no Authorization header
  double timeout_seconds = 60;
  int max_retries = 2;
  double temperature = 0;
  int max_in_flight = 4;
  int backoff_ms = 250;  // first retry delay; doubles per attempt

  void validate() const {
    if (endpoint_url.empty()) throw InvalidArgument("endpointUrl is required for " + id);
    if (model_name.empty()) throw InvalidArgument("model is required for " + id);
    if (!(timeout_seconds > 0)) throw InvalidArgument("timeoutSeconds must be > 0 for " + id);
    if (max_retries < 0) throw InvalidArgument("maxRetries must be >= 0 for " + id);
    if (max_in_flight < 1) throw InvalidArgument("maxInFlight must be >= 1 for " + id);
    if (backoff_ms < 0) throw InvalidArgument("backoffMs must be >= 0 for " + id);
  }

  static LlmConfig from_json(const nlohmann::json& j) {
    LlmConfig c;
    if (j.contains("apiKey")) throw InvalidArgument("API keys must come from the environment, not the config file");
    c.id = j.value("id", c.id);
    c.endpoint_url = j.value("endpointUrl", "");
    c.model_name = j.value("model", "");
    c.api_key_env_var = j.value("apiKeyEnv", "");
    c.timeout_seconds = j.value("timeoutSeconds", c.timeout_seconds);
    c.max_retries = j.value("maxRetries", c.max_retries);
    c.temperature = j.value("temperature", c.temperature);
    c.max_in_flight = j.value("maxInFlight", c.max_in_flight);
    c.backoff_ms = j.value("backoffMs", c.backoff_ms);
    c.validate();
    return c;
  }
};

/// Replaces every occurrence of secret in text with "***".
inline std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 3))
    text.replace(pos, secret.size(), "***");
  return text;
}

class RemoteChatBackend : public Backend {
public:
  using Logger = std::function<void(const std::string&)>;

  explicit RemoteChatBackend(LlmConfig config, Logger logger = {})
      : config_(std::move(config)), logger_(std::move(logger)) {
    config_.validate();
    auto scheme_end = config_.endpoint_url.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("endpointUrl must be absolute: " + config_.endpoint_url);
    auto path_start = config_.endpoint_url.find('/', scheme_end + 3);
    origin_ = config_.endpoint_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint_url.substr(path_start);
  }

  [[nodiscard]] std::string id() const override { return config_.id; }
  [[nodiscard]] const LlmConfig& config() const noexcept { return config_; }

  /// Highest number of simultaneous requests observed so far.
  [[nodiscard]] int peak_in_flight() const {
    std::lock_guard lock(slots_mutex_);
    return peak_;
  }

  [[nodiscard]] nlohmann::json request_body(const PromptBundle& bundle) const {
    return {{"model", config_.model_name},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", render_prompt(bundle)}}})},
            {"temperature", config_.temperature}};
  }

  [[nodiscard]] Completion complete(const PromptBundle& bundle) const override {
    std::string key;
    if (!config_.api_key_env_var.empty()) {
      const char* v = std::getenv(config_.api_key_env_var.c_str());
      if (!v || !*v) throw MissingApiKey(config_.api_key_env_var);
      key = v;
    }
    const std::string body = request_body(bundle).dump();
    Slot slot(*this);

    for (int attempt = 0;; ++attempt) {
      try {
        return attempt_once(body, key);
      } catch (const Retryable& r) {
        log("attempt " + std::to_string(attempt + 1) + " failed: " + redact(r.message, key));
        if (attempt >= config_.max_retries) std::rethrow_exception(r.cause);
        std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long long>(config_.backoff_ms) << attempt));
      }
    }
  }

private:
  // A transient failure: worth another attempt while retries remain.
  struct Retryable {
    std::exception_ptr cause;
    std::string message;
  };

  template <typename E>
  static Retryable retryable(const E& e) {
    return {std::make_exception_ptr(e), e.what()};
  }

  /// RAII in-flight slot; blocks while the cap is reached.
  class Slot {
  public:
    explicit Slot(const RemoteChatBackend& b) : b_(b) {
      std::unique_lock lock(b_.slots_mutex_);
      b_.slots_cv_.wait(lock, [&] { return b_.in_flight_ < b_.config_.max_in_flight; });
      ++b_.in_flight_;
      b_.peak_ = std::max(b_.peak_, b_.in_flight_);
    }
    ~Slot() {
      {
        std::lock_guard lock(b_.slots_mutex_);
        --b_.in_flight_;
      }
      b_.slots_cv_.notify_one();
    }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

  private:
    const RemoteChatBackend& b_;
  };

  void log(const std::string& line) const {
    if (logger_) logger_("[" + config_.id + "] " + line);
  }

  Completion attempt_once(const std::string& body, const std::string& key) const {
    httplib::Client client(origin_);
    auto secs = static_cast<time_t>(config_.timeout_seconds);
    auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
    log("POST " + origin_ + path_ + " model=" + config_.model_name +
        (key.empty() ? "" : " Authorization: Bearer " + redact(key, key)));

    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body, "application/json");
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      auto err = res.error();
      auto what = httplib::to_string(err);
      if (err == httplib::Error::ConnectionTimeout ||
          (err == httplib::Error::Read && elapsed >= config_.timeout_seconds * 0.9))
        throw retryable(Timeout(what + " after " + std::to_string(elapsed) + " s"));
      throw retryable(BackendError("request to " + origin_ + path_ + " failed: " + what));
    }
    log("HTTP " + std::to_string(res->status) + " in " + std::to_string(static_cast<int>(elapsed * 1000)) + " ms");
    if (res->status == 429 || res->status >= 500)
      throw retryable(HttpStatus(res->status, redact(res->body.substr(0, 200), key)));
    if (res->status < 200 || res->status >= 300) throw HttpStatus(res->status, redact(res->body.substr(0, 200), key));

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedResponse(std::string("body is not JSON: ") + e.what());
    }
    const nlohmann::json* content = nullptr;
    if (j.is_object() && j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
      const auto& choice = j["choices"][0];
      if (choice.is_object() && choice.contains("message") && choice["message"].is_object() &&
          choice["message"].contains("content"))
        content = &choice["message"]["content"];
    }
    if (!content || !content->is_string()) throw MalformedResponse("missing choices[0].message.content");
    Completion c{content->get<std::string>(), std::nullopt};
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& u = j["usage"];
      c.usage = TokenUsage{u.value("prompt_tokens", 0LL), u.value("completion_tokens", 0LL)};
    }
    return c;
  }

  LlmConfig config_;
  Logger logger_;
  std::string origin_;
  std::string path_;
  mutable std::mutex slots_mutex_;
  mutable std::condition_variable slots_cv_;
  mutable int in_flight_ = 0;
  mutable int peak_ = 0;
};

}  // namespace elkg::llm
