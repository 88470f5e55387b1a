#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "elkg/rdf/store.hpp"
#include "elkg/sparql/parser.hpp"

namespace elkg::sparql {

using Solution = std::map<std::string, rdf::Term>;

/// Row-eliminating evaluation error (SPARQL type error). Never fatal.
struct TypeErrorSignal {
  std::string reason;

  friend bool operator==(const TypeErrorSignal&, const TypeErrorSignal&) = default;
};

using ExprValue = std::variant<rdf::Term, TypeErrorSignal>;

inline bool is_error(const ExprValue& v) { return std::holds_alternative<TypeErrorSignal>(v); }

class EvaluationError : public QueryError {
public:
  using QueryError::QueryError;
};

/// Projected result: header is the projection, cells are empty when the
/// variable is unbound in that solution.
struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<rdf::Term>>> rows;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

namespace detail {

enum class NumKind { Integer, Decimal, Double };

struct Numeric {
  NumKind kind;
  long double value;
};

inline std::optional<Numeric> as_numeric(const rdf::Term& t) {
  if (!t.is_literal()) return std::nullopt;
  const auto& dt = t.datatype();
  NumKind kind;
  if (dt == rdf::ns::xsd_integer()) kind = NumKind::Integer;
  else if (dt == rdf::ns::xsd_decimal()) kind = NumKind::Decimal;
  else if (dt == rdf::ns::xsd_double() || dt == rdf::ns::xsd_float()) kind = NumKind::Double;
  else return std::nullopt;
  return Numeric{kind, 0.0L};
}

/// Parses the lexical form; nullopt for ill-typed literals such as "abc"^^xsd:integer.
inline std::optional<long double> numeric_value(const rdf::Term& t, NumKind kind) {
  std::string s = t.value();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.erase(s.begin());
  for (char c : s) {
    bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '-';
    if (kind != NumKind::Integer) ok = ok || c == '.';
    if (kind == NumKind::Double) ok = ok || c == 'e' || c == 'E' || c == '+';
    if (!ok) {
      if (kind == NumKind::Double && (s == "INF" || s == "-INF" || s == "NaN")) break;
      return std::nullopt;
    }
  }
  if (s == "INF") return HUGE_VALL;
  if (s == "-INF") return -HUGE_VALL;
  if (s == "NaN") return std::nanl("");
  try {
    std::size_t used = 0;
    long double v = std::stold(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline bool is_plain_string(const rdf::Term& t) { return t.is_literal() && t.datatype() == rdf::ns::xsd_string(); }

inline std::optional<bool> boolean_value(const rdf::Term& t) {
  if (!t.is_literal() || t.datatype() != rdf::ns::xsd_boolean()) return std::nullopt;
  if (t.value() == "true" || t.value() == "1") return true;
  if (t.value() == "false" || t.value() == "0") return false;
  return std::nullopt;
}

inline rdf::Term boolean_term(bool b) { return rdf::Term::literal(b ? "true" : "false", rdf::ns::xsd_boolean()); }

template <typename T>
bool apply(CompareOp op, const T& a, const T& b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

inline ExprValue compare_terms(CompareOp op, const rdf::Term& a, const rdf::Term& b) {
  auto na = as_numeric(a);
  auto nb = as_numeric(b);
  if (na && nb) {
    auto va = numeric_value(a, na->kind);
    auto vb = numeric_value(b, nb->kind);
    if (!va || !vb) return TypeErrorSignal{"ill-typed numeric literal"};
    if (std::isnan(*va) || std::isnan(*vb)) return boolean_term(op == CompareOp::Ne);
    return boolean_term(apply(op, *va, *vb));
  }
  if (is_plain_string(a) && is_plain_string(b)) return boolean_term(apply(op, a.value(), b.value()));
  auto ba = boolean_value(a);
  auto bb = boolean_value(b);
  if (ba && bb) return boolean_term(apply(op, *ba, *bb));
  if (a.is_literal() && b.is_literal() && a.datatype() == b.datatype() &&
      (a.datatype() == rdf::ns::xsd_date() || a.datatype() == rdf::ns::xsd_date_time()))
    return boolean_term(apply(op, a.value(), b.value()));

  if (op == CompareOp::Eq || op == CompareOp::Ne) {
    bool same = a == b;
    if (!same && a.is_literal() && b.is_literal())
      return TypeErrorSignal{"cannot compare literals of different or unknown datatypes"};
    return boolean_term(op == CompareOp::Eq ? same : !same);
  }
  return TypeErrorSignal{"operands are not comparable with " + std::string(to_string(op))};
}

inline ExprValue effective_boolean(const ExprValue& v) {
  if (is_error(v)) return v;
  const auto& t = std::get<rdf::Term>(v);
  if (auto b = boolean_value(t)) return boolean_term(*b);
  if (t.is_literal() && t.datatype() == rdf::ns::xsd_boolean()) return boolean_term(false);
  if (auto n = as_numeric(t)) {
    auto val = numeric_value(t, n->kind);
    if (!val) return boolean_term(false);
    return boolean_term(!(std::isnan(*val) || *val == 0));
  }
  if (t.is_string_literal()) return boolean_term(!t.value().empty());
  return TypeErrorSignal{"no effective boolean value"};
}

/// Argument compatibility for string functions: both simple, both with the
/// same language tag, or first tagged and second simple.
inline bool compatible_string_args(const rdf::Term& a, const rdf::Term& b) {
  if (!a.is_string_literal() || !b.is_string_literal()) return false;
  if (!b.has_lang()) return true;
  return a.has_lang() && a.lang() == b.lang();
}

}  // namespace detail

/// Evaluates an expression against one solution. Type errors come back as
/// TypeErrorSignal instead of throwing.
inline ExprValue eval_expr(const Expr& e, const Solution& solution) {
  using detail::boolean_term;
  switch (e.kind) {
    case Expr::Kind::Var: {
      auto it = solution.find(e.var);
      if (it == solution.end()) return TypeErrorSignal{"unbound variable ?" + e.var};
      return it->second;
    }
    case Expr::Kind::Const:
      return e.constant;
    case Expr::Kind::Compare: {
      auto lhs = eval_expr(e.args[0], solution);
      if (is_error(lhs)) return lhs;
      auto rhs = eval_expr(e.args[1], solution);
      if (is_error(rhs)) return rhs;
      return detail::compare_terms(e.op, std::get<rdf::Term>(lhs), std::get<rdf::Term>(rhs));
    }
    case Expr::Kind::And: {
      auto lhs = detail::effective_boolean(eval_expr(e.args[0], solution));
      auto rhs = detail::effective_boolean(eval_expr(e.args[1], solution));
      auto is_false = [](const ExprValue& v) { return !is_error(v) && std::get<rdf::Term>(v).value() == "false"; };
      if (is_false(lhs) || is_false(rhs)) return boolean_term(false);
      if (is_error(lhs)) return lhs;
      if (is_error(rhs)) return rhs;
      return boolean_term(true);
    }
    case Expr::Kind::Str: {
      auto arg = eval_expr(e.args[0], solution);
      if (is_error(arg)) return arg;
      const auto& t = std::get<rdf::Term>(arg);
      if (t.is_blank()) return TypeErrorSignal{"STR of a blank node"};
      return rdf::Term::literal(t.value());
    }
    case Expr::Kind::StrBefore: {
      auto a = eval_expr(e.args[0], solution);
      if (is_error(a)) return a;
      auto b = eval_expr(e.args[1], solution);
      if (is_error(b)) return b;
      const auto& hay = std::get<rdf::Term>(a);
      const auto& needle = std::get<rdf::Term>(b);
      if (!detail::compatible_string_args(hay, needle)) return TypeErrorSignal{"STRBEFORE arguments are not compatible"};
      // UTF-8 is self-synchronising, so a byte search finds the first codepoint match.
      auto pos = hay.value().find(needle.value());
      if (pos == std::string::npos) return rdf::Term::literal("");
      std::string before = hay.value().substr(0, pos);
      if (hay.has_lang()) return rdf::Term::lang_literal(std::move(before), hay.lang());
      return rdf::Term::literal(std::move(before));
    }
  }
  throw EvaluationError("malformed expression node");
}

/// True iff the filter's effective boolean value is true (errors count as false).
inline bool passes(const Expr& filter, const Solution& s) {
  auto v = detail::effective_boolean(eval_expr(filter, s));
  return !is_error(v) && std::get<rdf::Term>(v).value() == "true";
}

namespace detail {

inline void check_expr(const Expr& e) {
  std::size_t want = 0;
  switch (e.kind) {
    case Expr::Kind::Var:
      if (e.var.empty()) throw EvaluationError("variable expression without a name");
      return;
    case Expr::Kind::Const: return;
    case Expr::Kind::Str: want = 1; break;
    default: want = 2;
  }
  if (e.args.size() != want) throw EvaluationError("expression node has the wrong number of operands");
  for (const auto& a : e.args) check_expr(a);
}

inline void check_query(const Query& q) {
  for (const auto& p : q.patterns) {
    if (const auto* t = std::get_if<rdf::Term>(&p.predicate); t && !t->is_iri())
      throw EvaluationError("pattern predicate must be an IRI or variable");
    if (const auto* t = std::get_if<rdf::Term>(&p.subject); t && t->is_literal())
      throw EvaluationError("pattern subject must not be a literal");
  }
  for (const auto& b : q.binds) check_expr(b.expr);
  for (const auto& f : q.filters) check_expr(f);
}

inline std::optional<rdf::Term> resolve(const Slot& slot, const Solution& s) {
  if (const auto* t = std::get_if<rdf::Term>(&slot)) return *t;
  auto it = s.find(std::get<Var>(slot).name);
  if (it == s.end()) return std::nullopt;
  return it->second;
}

inline bool bind_slot(const Slot& slot, const rdf::Term& value, Solution& s) {
  const auto* v = std::get_if<Var>(&slot);
  if (!v) return true;
  auto [it, inserted] = s.try_emplace(v->name, value);
  return inserted || it->second == value;
}

}  // namespace detail

/// Basic graph pattern solutions: nested index joins in declaration order.
inline std::vector<Solution> match_bgp(const rdf::Store& store, const std::vector<TriplePattern>& patterns) {
  std::vector<Solution> current{Solution{}};
  for (const auto& pattern : patterns) {
    std::vector<Solution> next;
    for (const auto& sol : current) {
      auto s = detail::resolve(pattern.subject, sol);
      auto p = detail::resolve(pattern.predicate, sol);
      auto o = detail::resolve(pattern.object, sol);
      for (const auto& t : store.match(s, p, o)) {
        Solution extended = sol;
        // Repeated variables inside one pattern (?x ?p ?x) must agree.
        if (detail::bind_slot(pattern.subject, t.subject, extended) &&
            detail::bind_slot(pattern.predicate, t.predicate, extended) &&
            detail::bind_slot(pattern.object, t.object, extended))
          next.push_back(std::move(extended));
      }
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

/// Full solutions before projection: BGP, then binds in declaration order,
/// then every filter as a conjunctive guard.
inline std::vector<Solution> solve(const rdf::Store& store, const Query& q) {
  detail::check_query(q);
  std::vector<Solution> out;
  for (auto& sol : match_bgp(store, q.patterns)) {
    for (const auto& b : q.binds) {
      auto v = eval_expr(b.expr, sol);
      if (!is_error(v)) sol.emplace(b.target, std::get<rdf::Term>(std::move(v)));
    }
    bool keep = true;
    for (const auto& f : q.filters) {
      if (!passes(f, sol)) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(std::move(sol));
  }
  return out;
}

inline ResultTable evaluate(const rdf::Store& store, const Query& q) {
  ResultTable table;
  table.header = q.projection;
  std::set<std::vector<std::optional<rdf::Term>>> seen;
  for (const auto& sol : solve(store, q)) {
    std::vector<std::optional<rdf::Term>> row;
    row.reserve(q.projection.size());
    for (const auto& v : q.projection) {
      auto it = sol.find(v);
      row.push_back(it == sol.end() ? std::nullopt : std::optional<rdf::Term>(it->second));
    }
    if (q.distinct && !seen.insert(row).second) continue;
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline ResultTable evaluate(const rdf::Store& store, std::string_view query_text) {
  return evaluate(store, parse(query_text));
}

}  // namespace elkg::sparql
