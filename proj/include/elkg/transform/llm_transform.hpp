#pragma once

// Optional fallback: ask an LLM backend to write the SPARQL query. The reply's
// first ``` code block is parsed and accepted only when every triple pattern
// uses a constant predicate from the allow-list.

#include <set>
#include <string>

#include "elkg/kg/builder.hpp"
#include "elkg/llm/backend.hpp"
#include "elkg/sparql/parser.hpp"
#include "elkg/transform/transform.hpp"

namespace elkg::transform {

class GeneratedQueryRejected : public Error {
public:
  explicit GeneratedQueryRejected(std::string reason)
      : Error("generated query rejected: " + reason), reason_(std::move(reason)) {}
  [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
  std::string reason_;
};

inline constexpr const char* kLlmGeneratedIntent = "LlmGenerated";

inline std::string default_schema_hint() {
  return "Prefixes: voc: <https://elkg.ijs.si/ontology/>, schema: <https://schema.org/>, "
         "saref: <https://saref.etsi.org/core/>, rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>.\n"
         "Households: ?house rdf:type schema:House; schema:name \"PREFIX_N\" (dataset prefix before '_'); "
         "voc:occupancy, voc:floorArea, voc:dwellingType, voc:measurementStart, voc:measurementEnd, "
         "voc:hasAppliance, voc:hourlyLoad_0 .. voc:hourlyLoad_23; schema:containedInPlace ?place.\n"
         "Places: schema:latitude, schema:longitude, schema:name (city), voc:populationDensity, "
         "voc:educationLevel; schema:containedInPlace ?country.\n"
         "Countries: rdf:type schema:Country; schema:name, voc:continent, voc:gdpPerCapita, voc:averageWage, "
         "voc:electricityPrice, voc:carbonIntensity.\n"
         "Appliances: rdf:type saref:Device; schema:name, voc:averageDailyConsumption, "
         "voc:averageOnEventConsumption.\n"
         "Supported syntax: PREFIX, SELECT [DISTINCT] vars WHERE { triple patterns, FILTER, "
         "BIND(STRBEFORE(...) AS ?v) }.";
}

inline std::string sparql_request_prompt(const std::string& question, const std::string& schema_hint) {
  return "Write one SPARQL SELECT query that answers the question below over this knowledge graph.\n\n" +
         schema_hint + "\n\nQuestion: " + question + "\n\nReply with the query in a single ``` code block.";
}

/// Body of the first fenced code block, without the optional language tag.
inline std::optional<std::string> first_code_block(const std::string& text) {
  auto open = text.find("```");
  if (open == std::string::npos) return std::nullopt;
  auto body_start = text.find('\n', open + 3);
  if (body_start == std::string::npos) return std::nullopt;
  auto close = text.find("```", body_start + 1);
  if (close == std::string::npos) return std::nullopt;
  return text.substr(body_start + 1, close - body_start - 1);
}

inline std::set<std::string> known_predicates() {
  std::set<std::string> out;
  for (const auto& p : kg::vocab::predicates()) out.insert(p.value());
  return out;
}

/// Throws GeneratedQueryRejected when a pattern's predicate is a variable or
/// not in allowed.
inline void check_predicates(const sparql::Query& q, const std::set<std::string>& allowed) {
  for (const auto& p : q.patterns) {
    if (const auto* v = std::get_if<sparql::Var>(&p.predicate))
      throw GeneratedQueryRejected("variable predicate ?" + v->name);
    const auto& t = std::get<rdf::Term>(p.predicate);
    if (!allowed.count(t.value())) throw GeneratedQueryRejected("unknown predicate <" + t.value() + ">");
  }
}

inline TransformOutcome llm_transform(const std::string& question, const std::string& schema_hint,
                                      const llm::Backend& backend,
                                      const std::set<std::string>& allowed = known_predicates()) {
  auto bundle = llm::PromptBundle::non_rag(sparql_request_prompt(question, schema_hint));
  auto reply = backend.complete(bundle);
  auto block = first_code_block(reply.text);
  if (!block) throw GeneratedQueryRejected("reply has no code block");
  sparql::Query q;
  try {
    q = sparql::parse(*block);
  } catch (const Error& e) {
    throw GeneratedQueryRejected(std::string("does not parse: ") + e.what());
  }
  check_predicates(q, allowed);
  TransformOutcome o;
  o.intent_id = kLlmGeneratedIntent;
  o.query_text = *block;
  o.matched = true;
  return o;
}

}  // namespace elkg::transform
