#pragma once

// Recursive-descent parser for the supported SPARQL subset:
//   PREFIX, SELECT [DISTINCT] ?v..., [WHERE] { basic graph pattern,
//   FILTER(expr), BIND(expr AS ?v) }
// Expressions: = != < > <= >= &&, STRBEFORE(a, b), STR(a), literals,
// IRIs and variables. Anything else is rejected with a SyntaxError.

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "elkg/sparql/ast.hpp"

namespace elkg::sparql {

class QueryError : public Error {
public:
  using Error::Error;
};

class SyntaxError : public PositionedError {
public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& expectation)
      : PositionedError("SPARQL syntax error", line, column, expectation) {}
};

class UnboundPrefix : public PositionedError {
public:
  UnboundPrefix(std::size_t line, std::size_t column, std::string label)
      : PositionedError("Unbound prefix", line, column, "prefix '" + label + ":' is not declared"),
        label_(std::move(label)) {}
  [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
  std::string label_;
};

class ProjectionOfUnboundVariable : public QueryError {
public:
  explicit ProjectionOfUnboundVariable(std::string name)
      : QueryError("projected variable ?" + name + " is not bound by any pattern or BIND"), name_(std::move(name)) {}
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class BindRebinding : public QueryError {
public:
  explicit BindRebinding(std::string name)
      : QueryError("BIND target ?" + name + " is already bound"), name_(std::move(name)) {}
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

namespace detail {

enum class Tok { End, Iri, PName, Var, String, Integer, Decimal, Double, Word, LangTag, Punct };

struct Token {
  Tok type = Tok::End;
  std::string text;  // IRI body, pname, var name, string body, number lexical, word, punctuation
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t;
      t.line = line_;
      t.column = col_;
      if (eof()) {
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (c == '<' && iri_ahead()) {
        get();
        while (peek() != '>') t.text += get();
        get();
        t.type = Tok::Iri;
      } else if (c == '?' || c == '$') {
        get();
        while (!eof() && is_name_char(peek())) t.text += get();
        if (t.text.empty()) throw SyntaxError(t.line, t.column, "expected variable name after '" + std::string(1, c) + "'");
        t.type = Tok::Var;
      } else if (c == '"' || c == '\'') {
        t.text = string_body();
        t.type = Tok::String;
      } else if (c == '@') {
        get();
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) t.text += get();
        if (t.text.empty()) throw SyntaxError(t.line, t.column, "expected language tag after '@'");
        t.type = Tok::LangTag;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
                 static_cast<unsigned char>(c) >= 0x80) {
        word_or_pname(t);
      } else {
        t.type = Tok::Punct;
        static const char* two[] = {"!=", "<=", ">=", "&&", "||", "^^"};
        for (const char* op : two) {
          if (c == op[0] && peek(1) == op[1]) {
            t.text = op;
            get();
            get();
            break;
          }
        }
        if (t.text.empty()) {
          if (std::string_view("{}().,;=<>!*+-/[]|&^").find(c) == std::string_view::npos)
            throw SyntaxError(t.line, t.column, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, get());
        }
      }
      out.push_back(std::move(t));
    }
  }

private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }
  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  bool iri_ahead() const {
    for (std::size_t i = pos_ + 1; i < text_.size(); ++i) {
      char c = text_[i];
      if (c == '>') return true;
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`' || c == '\\')
        return false;
    }
    return false;
  }

  std::string string_body() {
    std::size_t l = line_, c = col_;
    char quote = get();
    bool is_long = peek() == quote && peek(1) == quote;
    if (is_long) {
      get();
      get();
    }
    std::string out;
    for (;;) {
      if (eof()) throw SyntaxError(l, c, "unterminated string literal");
      char ch = get();
      if (ch == quote) {
        if (!is_long) return out;
        if (peek() == quote && peek(1) == quote) {
          get();
          get();
          return out;
        }
        out += ch;
        continue;
      }
      if (!is_long && ch == '\n') throw SyntaxError(line_, col_, "newline in string literal");
      if (ch == '\\') {
        if (eof()) throw SyntaxError(line_, col_, "expected escape sequence");
        char e = get();
        switch (e) {
          case 't': out += '\t'; break;
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          default: throw SyntaxError(line_, col_, std::string("invalid escape '\\") + e + "'");
        }
        continue;
      }
      out += ch;
    }
  }

  void number(Token& t) {
    bool dot = false, exp = false;
    while (!eof()) {
      char ch = peek();
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        t.text += get();
      } else if (ch == '.' && !dot && !exp && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        dot = true;
        t.text += get();
      } else if ((ch == 'e' || ch == 'E') && !exp) {
        exp = true;
        t.text += get();
        if (peek() == '+' || peek() == '-') t.text += get();
      } else {
        break;
      }
    }
    t.type = exp ? Tok::Double : dot ? Tok::Decimal : Tok::Integer;
  }

  void word_or_pname(Token& t) {
    std::string s;
    while (!eof() && (is_name_char(peek()) || peek() == '-' || peek() == '.')) {
      if (peek() == '.' && !is_name_char(peek(1)) && peek(1) != '-') break;
      s += get();
    }
    if (peek() == ':') {
      s += get();
      while (!eof() && (is_name_char(peek()) || peek() == '-' || peek() == ':' || peek() == '.')) {
        if (peek() == '.' && !is_name_char(peek(1)) && peek(1) != '-') break;
        s += get();
      }
      t.type = Tok::PName;
    } else {
      t.type = Tok::Word;
    }
    t.text = s;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  Query parse() {
    while (is_word("PREFIX")) prefix_decl();
    if (is_word("BASE")) fail("BASE is not supported");
    if (!is_word("SELECT")) fail(is_unsupported_form() ? "only SELECT queries are supported" : "expected SELECT");
    next();
    if (is_word("DISTINCT")) {
      q_.distinct = true;
      next();
    } else if (is_word("REDUCED")) {
      fail("REDUCED is not supported");
    }
    if (is_punct("*")) fail("SELECT * is not supported; list the projected variables");
    while (cur().type == Tok::Var) {
      for (const auto& v : q_.projection)
        if (v == cur().text) fail("variable ?" + v + " projected twice");
      q_.projection.push_back(cur().text);
      next();
    }
    if (q_.projection.empty()) fail("expected at least one projected variable");
    if (is_word("FROM")) fail("FROM is not supported");
    if (is_word("WHERE")) next();
    expect_punct("{");
    group_body();
    expect_punct("}");
    if (cur().type != Tok::End) {
      if (cur().type == Tok::Word) fail("unsupported keyword " + upper(cur().text));
      fail("expected end of query");
    }
    validate();
    return std::move(q_);
  }

private:
  const Token& cur() const { return toks_[i_]; }
  void next() {
    if (cur().type != Tok::End) ++i_;
  }
  bool is_word(std::string_view w) const { return cur().type == Tok::Word && upper(cur().text) == w; }
  bool is_punct(std::string_view p) const { return cur().type == Tok::Punct && cur().text == p; }

  [[noreturn]] void fail(const std::string& expectation) const {
    throw SyntaxError(cur().line, cur().column, expectation);
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'" + found());
    next();
  }

  std::string found() const {
    switch (cur().type) {
      case Tok::End: return " but reached end of query";
      case Tok::Var: return " but found ?" + cur().text;
      case Tok::Iri: return " but found <" + cur().text + ">";
      case Tok::String: return " but found string literal";
      default: return " but found '" + cur().text + "'";
    }
  }

  bool is_unsupported_form() const { return is_word("CONSTRUCT") || is_word("ASK") || is_word("DESCRIBE"); }

  void prefix_decl() {
    next();
    if (cur().type != Tok::PName || cur().text.back() != ':' ||
        cur().text.find(':') != cur().text.size() - 1)
      fail("expected prefix label ending in ':'");
    std::string label = cur().text.substr(0, cur().text.size() - 1);
    next();
    if (cur().type != Tok::Iri) fail("expected IRI after PREFIX " + label + ":");
    std::string iri = cur().text;
    next();
    for (auto& [l, v] : q_.prefixes) {
      if (l == label) {
        v = iri;
        return;
      }
    }
    q_.prefixes.emplace_back(label, iri);
  }

  std::string expand(const Token& t) const {
    auto colon = t.text.find(':');
    std::string label = t.text.substr(0, colon);
    for (const auto& [l, v] : q_.prefixes)
      if (l == label) return v + t.text.substr(colon + 1);
    throw UnboundPrefix(t.line, t.column, label);
  }

  void group_body() {
    bool need_dot = false;   // after a triples block
    bool dot_allowed = false;  // a single optional '.' may follow FILTER/BIND
    for (;;) {
      if (is_punct("}") || cur().type == Tok::End) return;
      if (is_punct(".")) {
        if (!need_dot && !dot_allowed) fail("unexpected '.'");
        need_dot = false;
        dot_allowed = false;
        next();
        continue;
      }
      if (is_word("FILTER")) {
        next();
        q_.filters.push_back(filter_constraint());
        need_dot = false;
        dot_allowed = true;
        continue;
      }
      if (is_word("BIND")) {
        next();
        expect_punct("(");
        Expr e = expression();
        if (!is_word("AS")) fail("expected AS in BIND" + found());
        next();
        if (cur().type != Tok::Var) fail("expected variable after AS");
        q_.binds.push_back({std::move(e), cur().text});
        next();
        expect_punct(")");
        need_dot = false;
        dot_allowed = true;
        continue;
      }
      if (cur().type == Tok::Word && !is_word("A") && !is_word("TRUE") && !is_word("FALSE"))
        fail("unsupported keyword " + upper(cur().text));
      if (is_punct("{")) fail("nested group patterns are not supported");
      if (need_dot) fail("expected '.' between triple patterns");
      triples_same_subject();
      need_dot = true;
      dot_allowed = false;
    }
  }

  Expr filter_constraint() {
    if (is_punct("(")) {
      next();
      Expr e = expression();
      expect_punct(")");
      return e;
    }
    if (cur().type == Tok::Word) return builtin_call();
    fail("expected '(' after FILTER");
  }

  void triples_same_subject() {
    Slot subject = term_or_var(Position::Subject);
    for (;;) {
      Slot predicate = term_or_var(Position::Predicate);
      for (;;) {
        Slot object = term_or_var(Position::Object);
        q_.patterns.push_back({subject, predicate, std::move(object)});
        if (!is_punct(",")) break;
        next();
      }
      if (!is_punct(";")) return;
      while (is_punct(";")) next();
      if (is_punct(".") || is_punct("}")) return;
    }
  }

  enum class Position { Subject, Predicate, Object };

  Slot term_or_var(Position pos) {
    const Token& t = cur();
    if (t.type == Tok::Var) {
      next();
      return Var{t.text};
    }
    if (t.type == Tok::Iri) {
      next();
      return rdf::Term::iri(t.text);
    }
    if (t.type == Tok::PName) {
      if (t.text.rfind("_:", 0) == 0) fail("blank nodes are not supported in query patterns");
      auto iri = expand(t);
      next();
      return rdf::Term::iri(iri);
    }
    if (pos == Position::Predicate) {
      if (is_word("A")) {
        next();
        return rdf::Term::iri(rdf::ns::rdf_type());
      }
      if (is_punct("^") || is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+") || is_punct("!") ||
          is_punct("("))
        fail("property paths are not supported");
      fail("expected predicate IRI or variable" + found());
    }
    if (is_punct("[") || is_punct("(")) fail("blank nodes and collections are not supported in query patterns");
    if (pos == Position::Subject) {
      if (t.type == Tok::String || t.type == Tok::Integer || t.type == Tok::Decimal || t.type == Tok::Double)
        fail("literal not allowed as triple pattern subject");
      fail("expected subject IRI or variable" + found());
    }
    auto lit = literal_term();
    if (!lit) fail("expected object term or variable" + found());
    return *lit;
  }

  std::optional<rdf::Term> literal_term() {
    const Token& t = cur();
    switch (t.type) {
      case Tok::String: {
        std::string body = t.text;
        next();
        if (cur().type == Tok::LangTag) {
          auto lang = cur().text;
          next();
          return rdf::Term::lang_literal(body, lang);
        }
        if (is_punct("^^")) {
          next();
          if (cur().type == Tok::Iri) {
            auto dt = cur().text;
            next();
            return rdf::Term::literal(body, dt);
          }
          if (cur().type == Tok::PName) {
            auto dt = expand(cur());
            next();
            return rdf::Term::literal(body, dt);
          }
          fail("expected datatype IRI after '^^'");
        }
        return rdf::Term::literal(body);
      }
      case Tok::Integer: next(); return rdf::Term::literal(t.text, rdf::ns::xsd_integer());
      case Tok::Decimal: next(); return rdf::Term::literal(t.text, rdf::ns::xsd_decimal());
      case Tok::Double: next(); return rdf::Term::literal(t.text, rdf::ns::xsd_double());
      case Tok::Word:
        if (is_word("TRUE")) {
          next();
          return rdf::Term::literal("true", rdf::ns::xsd_boolean());
        }
        if (is_word("FALSE")) {
          next();
          return rdf::Term::literal("false", rdf::ns::xsd_boolean());
        }
        return std::nullopt;
      case Tok::Punct:
        if (t.text == "-" || t.text == "+") {
          const Token& n = toks_[i_ + 1];
          if (n.type == Tok::Integer || n.type == Tok::Decimal || n.type == Tok::Double) {
            std::string sign = t.text == "-" ? "-" : "";
            next();
            auto lit = literal_term();
            return rdf::Term::literal(sign + lit->value(), lit->datatype());
          }
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  Expr expression() {
    Expr lhs = relational();
    while (is_punct("&&")) {
      next();
      lhs = Expr::logical_and(std::move(lhs), relational());
    }
    if (is_punct("||")) fail("'||' is not supported");
    return lhs;
  }

  Expr relational() {
    Expr lhs = primary();
    static const std::pair<const char*, CompareOp> ops[] = {{"=", CompareOp::Eq},  {"!=", CompareOp::Ne},
                                                            {"<", CompareOp::Lt},  {">", CompareOp::Gt},
                                                            {"<=", CompareOp::Le}, {">=", CompareOp::Ge}};
    for (const auto& [text, op] : ops) {
      if (is_punct(text)) {
        next();
        return Expr::compare(op, std::move(lhs), primary());
      }
    }
    if (is_punct("*") || is_punct("/") || is_punct("+") || is_punct("-")) fail("arithmetic is not supported");
    if (is_word("IN") || is_word("NOT")) fail("IN / NOT IN are not supported");
    return lhs;
  }

  Expr primary() {
    const Token& t = cur();
    if (is_punct("(")) {
      next();
      Expr e = expression();
      expect_punct(")");
      return e;
    }
    if (is_punct("!")) fail("'!' is not supported");
    if (t.type == Tok::Var) {
      next();
      return Expr::variable(t.text);
    }
    if (t.type == Tok::Iri) {
      next();
      return Expr::constant_term(rdf::Term::iri(t.text));
    }
    if (t.type == Tok::PName) {
      auto iri = expand(t);
      next();
      if (is_punct("(")) fail("function calls by IRI are not supported");
      return Expr::constant_term(rdf::Term::iri(iri));
    }
    if (t.type == Tok::Word && !is_word("TRUE") && !is_word("FALSE")) return builtin_call();
    auto lit = literal_term();
    if (!lit) fail("expected expression" + found());
    return Expr::constant_term(*lit);
  }

  Expr builtin_call() {
    std::string name = upper(cur().text);
    if (name == "STRBEFORE") {
      next();
      expect_punct("(");
      Expr a = expression();
      expect_punct(",");
      Expr b = expression();
      expect_punct(")");
      return Expr::str_before(std::move(a), std::move(b));
    }
    if (name == "STR") {
      next();
      expect_punct("(");
      Expr a = expression();
      expect_punct(")");
      return Expr::str(std::move(a));
    }
    fail("unsupported function or keyword " + name);
  }

  void validate() const {
    std::set<std::string> bound;
    for (const auto& v : pattern_variables(q_)) bound.insert(v);
    for (const auto& b : q_.binds) {
      if (!bound.insert(b.target).second) throw BindRebinding(b.target);
    }
    for (const auto& v : q_.projection)
      if (!bound.count(v)) throw ProjectionOfUnboundVariable(v);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Query q_;
};

}  // namespace detail

/// Parses query text. Throws SyntaxError, UnboundPrefix,
/// ProjectionOfUnboundVariable or BindRebinding.
inline Query parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace elkg::sparql
