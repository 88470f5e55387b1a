#pragma once

// W3C SPARQL 1.1 Query Results JSON Format.

#include <nlohmann/json.hpp>

#include "elkg/sparql/eval.hpp"

namespace elkg::sparql {

inline nlohmann::json term_to_json(const rdf::Term& t) {
  nlohmann::json j;
  switch (t.kind()) {
    case rdf::TermKind::Iri:
      j["type"] = "uri";
      j["value"] = t.value();
      break;
    case rdf::TermKind::Blank:
      j["type"] = "bnode";
      j["value"] = t.value();
      break;
    case rdf::TermKind::Literal:
      j["type"] = "literal";
      j["value"] = t.value();
      if (t.has_lang()) {
        j["xml:lang"] = t.lang();
      } else if (t.datatype() != rdf::ns::xsd_string()) {
        j["datatype"] = t.datatype();
      }
      break;
  }
  return j;
}

inline rdf::Term term_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  const auto value = j.at("value").get<std::string>();
  if (type == "uri") return rdf::Term::iri(value);
  if (type == "bnode") return rdf::Term::blank(value);
  if (type == "literal" || type == "typed-literal") {
    if (j.contains("xml:lang")) return rdf::Term::lang_literal(value, j["xml:lang"].get<std::string>());
    if (j.contains("datatype")) return rdf::Term::literal(value, j["datatype"].get<std::string>());
    return rdf::Term::literal(value);
  }
  throw InvalidArgument("unknown SPARQL JSON term type: " + type);
}

inline nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json bindings = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json b = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i]) b[table.header[i]] = term_to_json(*row[i]);
    bindings.push_back(std::move(b));
  }
  return {{"head", {{"vars", table.header}}}, {"results", {{"bindings", std::move(bindings)}}}};
}

inline ResultTable table_from_json(const nlohmann::json& j) {
  ResultTable table;
  table.header = j.at("head").at("vars").get<std::vector<std::string>>();
  for (const auto& b : j.at("results").at("bindings")) {
    std::vector<std::optional<rdf::Term>> row;
    for (const auto& v : table.header)
      row.push_back(b.contains(v) ? std::optional<rdf::Term>(term_from_json(b[v])) : std::nullopt);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace elkg::sparql
