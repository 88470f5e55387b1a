#pragma once

// Backend registry built from the "backends" array of a config file:
//
//   {"id": "extractive-mock", "kind": "extractive-mock"}
//   {"id": "canned", "kind": "scripted", "default": "...",
//    "replies": [{"mode": "nonRag", "question": "...", "text": "..."}]}
//   {"id": "gpt-4o", "kind": "remote-chat", "endpointUrl": "...", "model": "gpt-4o",
//    "apiKeyEnv": "OPENAI_API_KEY", "timeoutSeconds": 60, "maxRetries": 2,
//    "temperature": 0, "maxInFlight": 4}

#include <memory>
#include <nlohmann/json.hpp>

#include "elkg/llm/backend.hpp"
#include "elkg/llm/remote.hpp"

namespace elkg::llm {

class BackendRegistry {
public:
  void add(std::shared_ptr<const Backend> backend) {
    auto id = backend->id();
    if (!backends_.emplace(id, std::move(backend)).second) throw InvalidArgument("duplicate backend id: " + id);
  }

  [[nodiscard]] std::shared_ptr<const Backend> find(const std::string& id) const {
    auto it = backends_.find(id);
    return it == backends_.end() ? nullptr : it->second;
  }

  [[nodiscard]] std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : backends_) out.push_back(id);
    return out;
  }

  [[nodiscard]] bool empty() const { return backends_.empty(); }

  static BackendRegistry with_defaults() {
    BackendRegistry r;
    r.add(std::make_shared<ExtractiveMock>());
    return r;
  }

  static std::shared_ptr<const Backend> make(const nlohmann::json& j, RemoteChatBackend::Logger logger = {}) {
    const auto kind = j.value("kind", "");
    const auto id = j.value("id", kind);
    if (kind == "extractive-mock") return std::make_shared<ExtractiveMock>(id);
    if (kind == "scripted") {
      auto b = std::make_shared<ScriptedBackend>(id);
      if (j.contains("default")) b->set_default(j["default"].get<std::string>());
      const auto replies = j.value("replies", nlohmann::json::array());
      for (const auto& r : replies)
        b->reply(parse_mode(r.value("mode", "nonRag")), r.at("question").get<std::string>(),
                 r.at("text").get<std::string>());
      return b;
    }
    if (kind == "remote-chat") return std::make_shared<RemoteChatBackend>(LlmConfig::from_json(j), std::move(logger));
    throw InvalidArgument("unknown backend kind '" + kind + "' for backend '" + id + "'");
  }

  static BackendRegistry from_json(const nlohmann::json& backends, const RemoteChatBackend::Logger& logger = {}) {
    if (!backends.is_array()) throw InvalidArgument("backends must be an array");
    BackendRegistry r;
    for (const auto& b : backends) r.add(make(b, logger));
    return r;
  }

private:
  std::map<std::string, std::shared_ptr<const Backend>> backends_;
};

}  // namespace elkg::llm
