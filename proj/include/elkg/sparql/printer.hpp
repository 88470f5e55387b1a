#pragma once

#include <string>

#include "elkg/sparql/ast.hpp"

namespace elkg::sparql {

namespace detail {

inline std::string print_term(const rdf::Term& t) {
  if (t.is_iri()) return "<" + t.value() + ">";
  // Term::to_ntriples escapes exactly the characters the query lexer unescapes.
  return t.to_ntriples();
}

inline std::string print_slot(const Slot& s) {
  if (const auto* v = std::get_if<Var>(&s)) return "?" + v->name;
  return print_term(std::get<rdf::Term>(s));
}

}  // namespace detail

inline std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var: return "?" + e.var;
    case Expr::Kind::Const: return detail::print_term(e.constant);
    case Expr::Kind::Compare: return "(" + print(e.args[0]) + " " + to_string(e.op) + " " + print(e.args[1]) + ")";
    case Expr::Kind::And: return "(" + print(e.args[0]) + " && " + print(e.args[1]) + ")";
    case Expr::Kind::StrBefore: return "STRBEFORE(" + print(e.args[0]) + ", " + print(e.args[1]) + ")";
    case Expr::Kind::Str: return "STR(" + print(e.args[0]) + ")";
  }
  return {};
}

/// Canonical query text; parse(print(q)) == q.
inline std::string print(const Query& q) {
  std::string out;
  for (const auto& [label, iri] : q.prefixes) out += "PREFIX " + label + ": <" + iri + ">\n";
  out += "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  for (std::size_t i = 0; i < q.projection.size(); ++i) out += (i ? " ?" : "?") + q.projection[i];
  out += " WHERE {\n";
  for (const auto& p : q.patterns)
    out += "  " + detail::print_slot(p.subject) + " " + detail::print_slot(p.predicate) + " " +
           detail::print_slot(p.object) + " .\n";
  for (const auto& f : q.filters) out += "  FILTER(" + print(f) + ")\n";
  for (const auto& b : q.binds) out += "  BIND(" + print(b.expr) + " AS ?" + b.target + ")\n";
  out += "}\n";
  return out;
}

}  // namespace elkg::sparql
