#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "elkg/rdf/term.hpp"

namespace elkg::sparql {

struct Var {
  std::string name;
  friend bool operator==(const Var&, const Var&) = default;
};

using Slot = std::variant<rdf::Term, Var>;

struct TriplePattern {
  Slot subject;
  Slot predicate;
  Slot object;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Gt, Le, Ge };

inline const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

/// Expression tree for FILTER and BIND. `args` holds the operands of
/// Compare (lhs, rhs), And (lhs, rhs), StrBefore (haystack, needle) and Str.
struct Expr {
  enum class Kind { Var, Const, Compare, And, StrBefore, Str };

  Kind kind = Kind::Const;
  CompareOp op = CompareOp::Eq;
  std::string var;
  rdf::Term constant;
  std::vector<Expr> args;

  static Expr variable(std::string name) {
    Expr e;
    e.kind = Kind::Var;
    e.var = std::move(name);
    return e;
  }
  static Expr constant_term(rdf::Term t) {
    Expr e;
    e.kind = Kind::Const;
    e.constant = std::move(t);
    return e;
  }
  static Expr compare(CompareOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Compare;
    e.op = op;
    e.args = {std::move(lhs), std::move(rhs)};
    return e;
  }
  static Expr logical_and(Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::And;
    e.args = {std::move(lhs), std::move(rhs)};
    return e;
  }
  static Expr str_before(Expr haystack, Expr needle) {
    Expr e;
    e.kind = Kind::StrBefore;
    e.args = {std::move(haystack), std::move(needle)};
    return e;
  }
  static Expr str(Expr arg) {
    Expr e;
    e.kind = Kind::Str;
    e.args = {std::move(arg)};
    return e;
  }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.args != b.args) return false;
    switch (a.kind) {
      case Kind::Var: return a.var == b.var;
      case Kind::Const: return a.constant == b.constant;
      case Kind::Compare: return a.op == b.op;
      default: return true;
    }
  }
};

struct Bind {
  Expr expr;
  std::string target;
  friend bool operator==(const Bind&, const Bind&) = default;
};

/// Parsed SELECT query. IRIs are stored fully expanded; `prefixes` keeps the
/// declarations in source order for printing.
struct Query {
  std::vector<std::pair<std::string, std::string>> prefixes;
  bool distinct = false;
  std::vector<std::string> projection;
  std::vector<TriplePattern> patterns;
  std::vector<Bind> binds;
  std::vector<Expr> filters;

  friend bool operator==(const Query&, const Query&) = default;
};

/// Variables bound by the basic graph pattern, in order of first appearance.
inline std::vector<std::string> pattern_variables(const Query& q) {
  std::vector<std::string> out;
  auto add = [&](const Slot& s) {
    if (const auto* v = std::get_if<Var>(&s)) {
      for (const auto& n : out)
        if (n == v->name) return;
      out.push_back(v->name);
    }
  };
  for (const auto& p : q.patterns) {
    add(p.subject);
    add(p.predicate);
    add(p.object);
  }
  return out;
}

}  // namespace elkg::sparql
