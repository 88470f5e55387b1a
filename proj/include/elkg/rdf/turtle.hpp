#pragma once

// Turtle / N-Triples reader and writer for the subset used by the knowledge
// graph fixtures: prefix directives, IRIs, prefixed names, plain / typed /
// language-tagged literals, numeric and boolean shorthands, the `a` keyword,
// predicate-object lists, object lists and blank-node labels.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elkg/rdf/store.hpp"

namespace elkg::rdf {

class TurtleParseError : public PositionedError {
public:
  TurtleParseError(std::size_t line, std::size_t column, std::string token, const std::string& expectation)
      : PositionedError("Turtle parse error", line, column,
                        expectation + (token.empty() ? std::string() : " (found '" + token + "')")),
        token_(std::move(token)) {}

  [[nodiscard]] const std::string& token() const noexcept { return token_; }

private:
  std::string token_;
};

/// A syntactically recognised Turtle construct outside the supported subset.
class UnsupportedFeature : public PositionedError {
public:
  UnsupportedFeature(std::size_t line, std::size_t column, const std::string& feature)
      : PositionedError("Unsupported Turtle feature", line, column, feature) {}
};

namespace detail {

class TurtleReader {
public:
  TurtleReader(std::string_view text, std::string blank_suffix)
      : text_(text), blank_suffix_(std::move(blank_suffix)) {}

  std::vector<Triple> parse() {
    std::vector<Triple> out;
    for (;;) {
      skip_ws();
      if (eof()) break;
      if (peek() == '@') {
        directive_at();
        continue;
      }
      if (keyword_ahead("PREFIX")) {
        sparql_prefix();
        continue;
      }
      if (keyword_ahead("BASE")) unsupported("BASE directive");
      statement(out);
    }
    return out;
  }

private:
  // -- character level --------------------------------------------------

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
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

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else {
        break;
      }
    }
  }

  std::string token_here() const {
    std::size_t end = pos_;
    while (end < text_.size() && end - pos_ < 24 && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
    return std::string(text_.substr(pos_, end - pos_));
  }

  [[noreturn]] void fail(const std::string& expectation) const {
    throw TurtleParseError(line_, col_, eof() ? "<end of input>" : token_here(), expectation);
  }
  [[noreturn]] void unsupported(const std::string& what) const { throw UnsupportedFeature(line_, col_, what); }

  void expect(char c, const char* what) {
    skip_ws();
    if (eof() || peek() != c) fail(std::string("expected ") + what);
    get();
  }

  bool keyword_ahead(std::string_view kw) const {
    if (pos_ + kw.size() > text_.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    char after = peek(kw.size());
    return after == ' ' || after == '\t' || after == '\n' || after == '\r';
  }

  static bool is_pn_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || u >= 0x80;
  }

  // -- directives -------------------------------------------------------

  void directive_at() {
    get();  // '@'
    std::string word;
    while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) word += get();
    if (word == "prefix") {
      prefix_body();
      expect('.', "'.' after @prefix directive");
    } else if (word == "base") {
      unsupported("@base directive");
    } else {
      fail("expected @prefix");
    }
  }

  void sparql_prefix() {
    for (int i = 0; i < 6; ++i) get();
    prefix_body();
  }

  void prefix_body() {
    skip_ws();
    std::string label;
    while (!eof() && peek() != ':') {
      if (!is_pn_char(peek()) && peek() != '.') fail("expected prefix label followed by ':'");
      label += get();
    }
    if (eof()) fail("expected ':' in prefix declaration");
    get();
    skip_ws();
    if (peek() != '<') fail("expected IRI in prefix declaration");
    prefixes_[label] = iriref();
  }

  // -- statements -------------------------------------------------------

  void statement(std::vector<Triple>& out) {
    Term subject = subject_term();
    predicate_object_list(subject, out);
    expect('.', "'.' at end of statement");
  }

  void predicate_object_list(const Term& subject, std::vector<Triple>& out) {
    for (;;) {
      skip_ws();
      Term predicate = predicate_term();
      for (;;) {
        skip_ws();
        out.emplace_back(subject, predicate, object_term());
        skip_ws();
        if (peek() == ',') {
          get();
          continue;
        }
        break;
      }
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        get();
        skip_ws();
      }
      if (peek() == '.' || peek() == ']') return;
    }
  }

  void reject_structural() {
    if (peek() == '[') unsupported("blank node property list / anonymous blank node");
    if (peek() == '(') unsupported("collection");
    if (peek() == '<' && peek(1) == '<') unsupported("quoted triple");
  }

  Term subject_term() {
    skip_ws();
    reject_structural();
    if (peek() == '<') return Term::iri(iriref());
    if (peek() == '_' && peek(1) == ':') return blank_node();
    if (peek() == '"' || peek() == '\'') fail("literal not allowed as subject");
    return prefixed_name();
  }

  Term predicate_term() {
    skip_ws();
    if (peek() == 'a' && !is_pn_char(peek(1)) && peek(1) != ':') {
      get();
      return Term::iri(ns::rdf_type());
    }
    if (peek() == '<' && peek(1) != '<') return Term::iri(iriref());
    if (peek() == '_' && peek(1) == ':') fail("blank node not allowed as predicate");
    if (peek() == '"' || peek() == '\'') fail("literal not allowed as predicate");
    if (peek() == '[' || peek() == '(') fail("expected predicate IRI");
    return prefixed_name();
  }

  Term object_term() {
    skip_ws();
    reject_structural();
    char c = peek();
    if (c == '<') return Term::iri(iriref());
    if (c == '_' && peek(1) == ':') return blank_node();
    if (c == '"' || c == '\'') return literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return numeric();
    if (starts_with_word("true")) {
      pos_ += 4;
      col_ += 4;
      return Term::literal("true", ns::xsd_boolean());
    }
    if (starts_with_word("false")) {
      pos_ += 5;
      col_ += 5;
      return Term::literal("false", ns::xsd_boolean());
    }
    return prefixed_name();
  }

  bool starts_with_word(std::string_view w) const {
    return text_.substr(pos_, w.size()) == w && !is_pn_char(peek(w.size())) && peek(w.size()) != ':';
  }

  // -- terms ------------------------------------------------------------

  std::string iriref() {
    std::size_t l = line_, c = col_;
    get();  // '<'
    std::string out;
    for (;;) {
      if (eof()) throw TurtleParseError(l, c, "<", "unterminated IRI");
      char ch = get();
      if (ch == '>') break;
      if (ch == '\\') {
        out += unicode_escape();
        continue;
      }
      if (static_cast<unsigned char>(ch) <= 0x20 || ch == '<' || ch == '"' || ch == '{' || ch == '}' ||
          ch == '|' || ch == '^' || ch == '`')
        throw TurtleParseError(line_, col_, std::string(1, ch), "invalid character in IRI");
      out += ch;
    }
    if (out.find(':') == std::string::npos) throw UnsupportedFeature(l, c, "relative IRI <" + out + "> (no @base support)");
    return out;
  }

  std::string unicode_escape() {
    if (eof()) fail("expected escape sequence");
    char kind = get();
    int digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0) fail("expected \\u or \\U escape");
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      if (eof() || !std::isxdigit(static_cast<unsigned char>(peek()))) fail("expected hex digit");
      char h = get();
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                          : std::tolower(h) - 'a' + 10);
    }
    return encode_utf8(cp);
  }

  static std::string encode_utf8(std::uint32_t cp) {
    std::string out;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
  }

  Term blank_node() {
    get();
    get();  // "_:"
    std::string label;
    while (!eof() && (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1))))) label += get();
    if (label.empty()) fail("expected blank node label");
    return Term::blank(label + blank_suffix_);
  }

  Term prefixed_name() {
    std::size_t l = line_, c = col_;
    std::string label;
    while (!eof() && peek() != ':' && (is_pn_char(peek()) || peek() == '.')) label += get();
    if (eof() || peek() != ':') {
      pos_ -= label.size();
      col_ -= label.size();
      fail("expected IRI, prefixed name, blank node or literal");
    }
    get();
    std::string local;
    while (!eof()) {
      char ch = peek();
      if (is_pn_char(ch) || ch == ':' || ch == '%') {
        local += get();
      } else if (ch == '\\') {
        get();
        if (eof()) fail("expected escaped character");
        local += get();
      } else if (ch == '.' && (is_pn_char(peek(1)) || peek(1) == ':' || peek(1) == '%')) {
        local += get();
      } else {
        break;
      }
    }
    auto it = prefixes_.find(label);
    if (it == prefixes_.end()) throw TurtleParseError(l, c, label + ":", "undeclared prefix '" + label + "'");
    return Term::iri(it->second + local);
  }

  Term literal() {
    std::size_t l = line_, c = col_;
    char quote = get();
    bool is_long = peek() == quote && peek(1) == quote;
    if (is_long) {
      get();
      get();
    }
    std::string lexical;
    for (;;) {
      if (eof()) throw TurtleParseError(l, c, std::string(1, quote), "unterminated string literal");
      char ch = get();
      if (ch == quote) {
        if (!is_long) break;
        if (peek() == quote && peek(1) == quote) {
          get();
          get();
          break;
        }
        lexical += ch;
        continue;
      }
      if (!is_long && (ch == '\n' || ch == '\r'))
        throw TurtleParseError(line_, col_, "", "newline in short string literal");
      if (ch == '\\') {
        if (eof()) fail("expected escape");
        char e = peek();
        switch (e) {
          case 't': get(); lexical += '\t'; break;
          case 'n': get(); lexical += '\n'; break;
          case 'r': get(); lexical += '\r'; break;
          case 'b': get(); lexical += '\b'; break;
          case 'f': get(); lexical += '\f'; break;
          case '"': get(); lexical += '"'; break;
          case '\'': get(); lexical += '\''; break;
          case '\\': get(); lexical += '\\'; break;
          case 'u':
          case 'U': lexical += unicode_escape(); break;
          default: fail("invalid escape sequence");
        }
        continue;
      }
      lexical += ch;
    }
    if (peek() == '@') {
      get();
      std::string lang;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) lang += get();
      if (lang.empty()) fail("expected language tag");
      return Term::lang_literal(std::move(lexical), std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      get();
      get();
      std::string datatype = peek() == '<' ? iriref() : prefixed_name().value();
      return Term::literal(std::move(lexical), std::move(datatype));
    }
    return Term::literal(std::move(lexical));
  }

  Term numeric() {
    std::string lex;
    if (peek() == '+' || peek() == '-') lex += get();
    bool dot = false, exp = false;
    while (!eof()) {
      char ch = peek();
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        lex += get();
      } else if (ch == '.' && !dot && !exp && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        dot = true;
        lex += get();
      } else if ((ch == 'e' || ch == 'E') && !exp) {
        exp = true;
        lex += get();
        if (peek() == '+' || peek() == '-') lex += get();
      } else {
        break;
      }
    }
    if (lex.empty() || lex == "+" || lex == "-") fail("expected number");
    if (exp) return Term::literal(lex, ns::xsd_double());
    if (dot) return Term::literal(lex, ns::xsd_decimal());
    return Term::literal(lex, ns::xsd_integer());
  }

  std::string_view text_;
  std::string blank_suffix_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace detail

/// Parses a Turtle (or N-Triples) document without touching any store.
/// Blank-node labels get `blank_suffix` appended.
inline std::vector<Triple> parse_turtle(std::string_view document, const std::string& blank_suffix = "") {
  return detail::TurtleReader(document, blank_suffix).parse();
}

/// Loads a document into the store, all-or-nothing. Returns the number of
/// distinct triples added. Blank-node labels are scoped to the document by a
/// "-d<N>" suffix, N being the store's document counter.
inline std::size_t load_turtle(Store& store, std::string_view document) {
  auto doc_id = store.next_document_id();
  auto triples = parse_turtle(document, "-d" + std::to_string(doc_id));
  return store.insert_all(triples);
}

/// Sorted N-Triples serialization, one statement per line.
inline std::string write_ntriples(std::vector<Triple> triples) {
  std::sort(triples.begin(), triples.end());
  std::string out;
  for (const auto& t : triples) {
    out += t.to_ntriples();
    out += '\n';
  }
  return out;
}

/// Default prefix table used when writing the knowledge graph.
inline std::vector<std::pair<std::string, std::string>> default_prefixes() {
  return {{"rdf", std::string(ns::rdf)},       {"xsd", std::string(ns::xsd)},
          {"schema", std::string(ns::schema)}, {"saref", std::string(ns::saref)},
          {"voc", std::string(ns::voc)},       {"res", std::string(ns::resource)}};
}

namespace detail {

inline std::string compact(const std::string& iri, const std::vector<std::pair<std::string, std::string>>& prefixes) {
  for (const auto& [label, base] : prefixes) {
    if (iri.size() <= base.size() || iri.compare(0, base.size(), base) != 0) continue;
    std::string_view local(iri.data() + base.size(), iri.size() - base.size());
    bool safe = std::isalnum(static_cast<unsigned char>(local.front())) || local.front() == '_';
    for (char c : local) safe = safe && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-');
    if (safe) return label + ":" + std::string(local);
  }
  return "<" + iri + ">";
}

inline std::string turtle_term(const Term& t, const std::vector<std::pair<std::string, std::string>>& prefixes) {
  if (t.is_iri()) return compact(t.value(), prefixes);
  if (t.is_blank()) return "_:" + t.value();
  std::string out = "\"" + Term::escape_string(t.value()) + "\"";
  if (t.has_lang()) return out + "@" + t.lang();
  if (t.datatype() == ns::xsd_string()) return out;
  return out + "^^" + compact(t.datatype(), prefixes);
}

}  // namespace detail

/// Turtle serialization grouped by subject, deterministic for equal triple sets.
inline std::string write_turtle(std::vector<Triple> triples,
                                const std::vector<std::pair<std::string, std::string>>& prefixes = default_prefixes()) {
  std::sort(triples.begin(), triples.end());
  std::string out;
  for (const auto& [label, base] : prefixes) out += "@prefix " + label + ": <" + base + "> .\n";
  if (!prefixes.empty() && !triples.empty()) out += '\n';
  const Term* subject = nullptr;
  const Term* predicate = nullptr;
  for (const auto& t : triples) {
    if (subject && *subject == t.subject) {
      if (*predicate == t.predicate) {
        out += ", ";
      } else {
        out += " ;\n    " + detail::turtle_term(t.predicate, prefixes) + " ";
      }
    } else {
      if (subject) out += " .\n";
      out += detail::turtle_term(t.subject, prefixes) + "\n    " + detail::turtle_term(t.predicate, prefixes) + " ";
    }
    out += detail::turtle_term(t.object, prefixes);
    subject = &t.subject;
    predicate = &t.predicate;
  }
  if (subject) out += " .\n";
  return out;
}

inline std::string write_turtle(const Store& store,
                                const std::vector<std::pair<std::string, std::string>>& prefixes = default_prefixes()) {
  return write_turtle(store.triples(), prefixes);
}

}  // namespace elkg::rdf
