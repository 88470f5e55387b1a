#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "elkg/error.hpp"

namespace elkg::rdf {

/// Namespace IRIs used throughout the knowledge graph.
namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view schema = "https://schema.org/";
inline constexpr std::string_view saref = "https://saref.etsi.org/core/";
inline constexpr std::string_view voc = "https://elkg.ijs.si/ontology/";
inline constexpr std::string_view resource = "https://elkg.ijs.si/resource/";

inline std::string rdf_type() { return std::string(rdf) + "type"; }
inline std::string rdf_lang_string() { return std::string(rdf) + "langString"; }
inline std::string xsd_string() { return std::string(xsd) + "string"; }
inline std::string xsd_integer() { return std::string(xsd) + "integer"; }
inline std::string xsd_decimal() { return std::string(xsd) + "decimal"; }
inline std::string xsd_double() { return std::string(xsd) + "double"; }
inline std::string xsd_float() { return std::string(xsd) + "float"; }
inline std::string xsd_boolean() { return std::string(xsd) + "boolean"; }
inline std::string xsd_date() { return std::string(xsd) + "date"; }
inline std::string xsd_date_time() { return std::string(xsd) + "dateTime"; }
}  // namespace ns

enum class TermKind : std::uint8_t { Iri = 0, Literal = 1, Blank = 2 };

class InvalidTerm : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// An RDF term: IRI, literal, or blank node.
///
/// Equality is term equality. Two literals are equal iff lexical form,
/// datatype IRI and language tag all match; value comparison belongs to
/// FILTER evaluation, not to the store.
class Term {
public:
  Term() = default;

  static Term iri(std::string value) {
    if (value.empty()) throw InvalidTerm("IRI must not be empty");
    if (std::any_of(value.begin(), value.end(), [](unsigned char c) { return c <= 0x20; }))
      throw InvalidTerm("IRI contains whitespace: " + value);
    return Term(TermKind::Iri, std::move(value), {}, {});
  }

  static Term literal(std::string lexical, std::string datatype = ns::xsd_string()) {
    if (datatype.empty()) datatype = ns::xsd_string();
    if (datatype == ns::rdf_lang_string())
      throw InvalidTerm("rdf:langString literal requires a language tag");
    return Term(TermKind::Literal, std::move(lexical), std::move(datatype), {});
  }

  static Term lang_literal(std::string lexical, std::string lang) {
    if (lang.empty()) throw InvalidTerm("language tag must not be empty");
    std::transform(lang.begin(), lang.end(), lang.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return Term(TermKind::Literal, std::move(lexical), ns::rdf_lang_string(), std::move(lang));
  }

  static Term blank(std::string label) {
    if (label.empty()) throw InvalidTerm("blank node label must not be empty");
    return Term(TermKind::Blank, std::move(label), {}, {});
  }

  static Term integer(std::int64_t v) { return literal(std::to_string(v), ns::xsd_integer()); }

  /// xsd:decimal in plain fixed notation (shortest round-trip form, always with a '.').
  static Term decimal(double v) { return literal(format_decimal(v), ns::xsd_decimal()); }

  static std::string format_decimal(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    std::string out(buf, res.ptr);
    if (out.find('.') == std::string::npos) out += ".0";
    return out;
  }

  [[nodiscard]] TermKind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
  [[nodiscard]] bool is_literal() const noexcept { return kind_ == TermKind::Literal; }
  [[nodiscard]] bool is_blank() const noexcept { return kind_ == TermKind::Blank; }

  /// IRI string, literal lexical form, or blank label.
  [[nodiscard]] const std::string& value() const noexcept { return value_; }
  [[nodiscard]] const std::string& datatype() const noexcept { return datatype_; }
  [[nodiscard]] const std::string& lang() const noexcept { return lang_; }
  [[nodiscard]] bool has_lang() const noexcept { return !lang_.empty(); }

  /// True for simple literals (xsd:string) and language-tagged strings.
  [[nodiscard]] bool is_string_literal() const noexcept {
    return is_literal() && (datatype_ == ns::xsd_string() || !lang_.empty());
  }

  [[nodiscard]] std::string to_ntriples() const {
    switch (kind_) {
      case TermKind::Iri:
        return "<" + value_ + ">";
      case TermKind::Blank:
        return "_:" + value_;
      case TermKind::Literal: {
        std::string out = "\"" + escape_string(value_) + "\"";
        if (!lang_.empty()) return out + "@" + lang_;
        if (datatype_ == ns::xsd_string()) return out;
        return out + "^^<" + datatype_ + ">";
      }
    }
    return {};
  }

  static std::string escape_string(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    return out;
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

private:
  Term(TermKind kind, std::string value, std::string datatype, std::string lang)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)), lang_(std::move(lang)) {}

  TermKind kind_ = TermKind::Iri;
  std::string value_;
  std::string datatype_;
  std::string lang_;
};

/// One RDF statement. Subject is an IRI or blank node, predicate an IRI.
struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple() = default;
  Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {}

  void validate() const {
    if (subject.is_literal()) throw InvalidTerm("triple subject must be an IRI or blank node");
    if (!predicate.is_iri()) throw InvalidTerm("triple predicate must be an IRI");
    if (subject.value().empty() || predicate.value().empty())
      throw InvalidTerm("triple contains an empty term");
  }

  [[nodiscard]] std::string to_ntriples() const {
    return subject.to_ntriples() + " " + predicate.to_ntriples() + " " + object.to_ntriples() + " .";
  }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline Term iri(std::string_view base, std::string_view local) {
  return Term::iri(std::string(base) + std::string(local));
}

}  // namespace elkg::rdf

template <>
struct std::hash<elkg::rdf::Term> {
  std::size_t operator()(const elkg::rdf::Term& t) const noexcept {
    std::size_t h = std::hash<std::string>{}(t.value());
    h ^= std::hash<std::string>{}(t.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::string>{}(t.lang()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h ^ static_cast<std::size_t>(t.kind());
  }
};
