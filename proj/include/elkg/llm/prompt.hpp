#pragma once

// Prompt assembly. A RAG prompt has three labelled sections separated by
// blank lines:
//
//   Question:
//   <question>
//
//   Query:
//   <SPARQL text>
//
//   Enhanced Context:
//   <serialized context table>
//
// and, when a load profile is attached, a fourth "Load Profile:" section with
// one "hour,value" line per hour. A non-RAG prompt is the bare question.

#include <map>
#include <optional>
#include <string>

#include "elkg/error.hpp"
#include "elkg/kg/fixture.hpp"
#include "elkg/kg/records.hpp"

namespace elkg::llm {

enum class Mode { Rag, NonRag };

inline std::string to_string(Mode m) { return m == Mode::Rag ? "rag" : "nonRag"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "rag") return Mode::Rag;
  if (s == "nonRag") return Mode::NonRag;
  throw InvalidArgument("mode must be rag or nonRag, got '" + s + "'");
}

/// The intent the transform step matched, passed along so backends can
/// phrase their answer (the extractive mock uses it for its qualifier).
struct IntentHint {
  std::string id;
  std::map<std::string, std::string> slots;
};

struct PromptBundle {
  std::string question;
  std::optional<std::string> query_text;
  std::optional<std::string> context_text;
  std::optional<kg::LoadProfile> attachment;
  Mode mode = Mode::NonRag;
  std::optional<IntentHint> intent;
  bool include_query = true;  // false drops the Query section from the rendered prompt

  static PromptBundle non_rag(std::string question) {
    PromptBundle b;
    b.question = std::move(question);
    return b;
  }

  static PromptBundle rag(std::string question, std::string query_text, std::string context_text) {
    PromptBundle b;
    b.question = std::move(question);
    b.query_text = std::move(query_text);
    b.context_text = std::move(context_text);
    b.mode = Mode::Rag;
    return b;
  }

  void validate() const {
    if (mode == Mode::Rag && (!query_text || !context_text))
      throw InvalidArgument("a rag prompt needs both query text and context text");
    if (mode == Mode::NonRag && (query_text || context_text || attachment))
      throw InvalidArgument("a nonRag prompt carries only the question");
  }
};

inline std::string profile_lines(const kg::LoadProfile& p) {
  std::string out;
  for (std::size_t h = 0; h < p.hourly_averages.size(); ++h) {
    if (h) out += '\n';
    out += std::to_string(h) + "," + kg::num(p.hourly_averages[h]);
  }
  return out;
}

inline std::string render_prompt(const PromptBundle& b) {
  b.validate();
  if (b.mode == Mode::NonRag) return b.question;
  std::string out = "Question:\n" + b.question;
  if (b.include_query) out += "\n\nQuery:\n" + *b.query_text;
  out += "\n\nEnhanced Context:\n" + *b.context_text;
  if (b.attachment) out += "\n\nLoad Profile:\n" + profile_lines(*b.attachment);
  return out;
}

}  // namespace elkg::llm
