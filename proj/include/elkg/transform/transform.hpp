#pragma once

// Question to SPARQL via an ordered intent catalog. Each intent has keyword
// groups (every group must match, any keyword in a group suffices), slot
// extractors and a query template with ${slot} placeholders. The first intent
// whose keyword groups all match wins.
//
// Extractor kinds and the slots they fill:
//   countryName     name                 canonical country (alias table applied)
//   moneyAmount     name, nameOp         amount and comparison (">" or "<")
//   priceAmount     name, nameOp         as moneyAmount, decimals kept
//   continentName   name, nameOp         continent and "=" or "!=" ("not in", "outside")
//   educationLevel  name                 one of the catalog's education levels
//   houseRef        name                 household name, "house 1 in the REFIT dataset" -> REFIT_1

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "elkg/error.hpp"
#include "elkg/kg/builder.hpp"
#include "elkg/kg/fixture.hpp"
#include "elkg/sparql/parser.hpp"
#include "elkg/transform/catalog_data.hpp"

namespace elkg::transform {

class NoAmountFound : public Error {
public:
  explicit NoAmountFound(const std::string& text) : Error("no amount found in: " + text) {}
};

class CatalogError : public Error {
public:
  using Error::Error;
};

enum class ExtractorKind { CountryName, MoneyAmount, PriceAmount, ContinentName, EducationLevel, HouseRef };

inline ExtractorKind parse_extractor_kind(const std::string& s) {
  static const std::map<std::string, ExtractorKind> kinds{
      {"countryName", ExtractorKind::CountryName},       {"moneyAmount", ExtractorKind::MoneyAmount},
      {"priceAmount", ExtractorKind::PriceAmount},       {"continentName", ExtractorKind::ContinentName},
      {"educationLevel", ExtractorKind::EducationLevel}, {"houseRef", ExtractorKind::HouseRef}};
  auto it = kinds.find(s);
  if (it == kinds.end()) throw CatalogError("unknown slot extractor kind: " + s);
  return it->second;
}

inline bool has_companion_op(ExtractorKind k) {
  return k == ExtractorKind::MoneyAmount || k == ExtractorKind::PriceAmount || k == ExtractorKind::ContinentName;
}

struct SlotSpec {
  std::string name;
  ExtractorKind kind;
};

struct IntentTemplate {
  std::string id;
  std::vector<std::vector<std::string>> keyword_groups;
  std::vector<SlotSpec> slots;
  std::string query_template;

  /// Slot names this template's extractors fill, companions included.
  [[nodiscard]] std::set<std::string> produced_slots() const {
    std::set<std::string> out;
    for (const auto& s : slots) {
      out.insert(s.name);
      if (has_companion_op(s.kind)) out.insert(s.name + "Op");
    }
    return out;
  }
};

/// Placeholder names in order of first appearance.
inline std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (auto pos = text.find("${"); pos != std::string_view::npos; pos = text.find("${", pos + 2)) {
    auto end = text.find('}', pos);
    if (end == std::string_view::npos) throw CatalogError("unterminated placeholder in template");
    std::string name(text.substr(pos + 2, end - pos - 2));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

/// Escapes a value for use inside a double-quoted SPARQL string literal.
inline std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string instantiate(std::string_view tmpl, const std::map<std::string, std::string>& slots) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    auto pos = tmpl.find("${", i);
    if (pos == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    out.append(tmpl.substr(i, pos - i));
    auto end = tmpl.find('}', pos);
    if (end == std::string_view::npos) throw CatalogError("unterminated placeholder in template");
    std::string name(tmpl.substr(pos + 2, end - pos - 2));
    auto it = slots.find(name);
    if (it == slots.end()) throw CatalogError("no value for placeholder ${" + name + "}");
    out += escape_literal(it->second);
    i = end + 1;
  }
  return out;
}

struct Catalog {
  int version = 0;
  std::map<std::string, std::string> country_aliases;  // lower-case alias -> canonical name
  std::vector<std::string> countries;
  std::vector<std::string> continents;
  std::vector<std::string> education_levels;
  std::vector<IntentTemplate> intents;  // priority order

  static Catalog from_json(const nlohmann::json& j) {
    Catalog c;
    try {
      c.version = j.at("version").get<int>();
      const auto aliases = j.value("countryAliases", nlohmann::json::object());
      for (const auto& [alias, name] : aliases.items()) {
        std::string key = alias;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
        c.country_aliases[key] = name.get<std::string>();
      }
      c.countries = j.value("countries", std::vector<std::string>{});
      c.continents = j.value("continents", std::vector<std::string>{});
      c.education_levels = j.value("educationLevels", std::vector<std::string>{});
      for (const auto& ij : j.at("intents")) {
        IntentTemplate t;
        t.id = ij.at("id").get<std::string>();
        t.keyword_groups = ij.at("keywords").get<std::vector<std::vector<std::string>>>();
        const auto slots = ij.value("slots", nlohmann::json::array());
        for (const auto& s : slots)
          t.slots.push_back({s.at("name").get<std::string>(), parse_extractor_kind(s.at("kind").get<std::string>())});
        const auto& q = ij.at("query");
        if (q.is_string()) {
          t.query_template = q.get<std::string>();
        } else {
          for (const auto& line : q) t.query_template += line.get<std::string>() + "\n";
        }
        c.intents.push_back(std::move(t));
      }
    } catch (const nlohmann::json::exception& e) {
      throw CatalogError(std::string("malformed intent catalog: ") + e.what());
    }
    c.validate();
    return c;
  }

  static Catalog from_text(std::string_view text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw CatalogError(std::string("intent catalog is not JSON: ") + e.what());
    }
    return from_json(j);
  }

  static Catalog from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogError("cannot read intent catalog: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
  }

  /// Ids unique, groups non-empty, every placeholder filled by an extractor.
  void validate() const {
    std::set<std::string> ids;
    for (const auto& t : intents) {
      if (!ids.insert(t.id).second) throw CatalogError("duplicate intent id: " + t.id);
      if (t.keyword_groups.empty()) throw CatalogError(t.id + ": no keyword groups");
      for (const auto& g : t.keyword_groups)
        if (g.empty()) throw CatalogError(t.id + ": empty keyword group");
      auto produced = t.produced_slots();
      for (const auto& p : placeholders(t.query_template))
        if (!produced.count(p)) throw CatalogError(t.id + ": placeholder ${" + p + "} has no slot extractor");
    }
  }

  [[nodiscard]] const IntentTemplate* find(std::string_view id) const {
    for (const auto& t : intents)
      if (t.id == id) return &t;
    return nullptr;
  }
};

inline const Catalog& default_catalog() {
  static const Catalog c = Catalog::from_text(kDefaultCatalogJson);
  return c;
}

// -- text matching -----------------------------------------------------------

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// Position of needle in haystack (both lower-case) with no word character on
/// either side, starting at from; npos when absent.
inline std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from = 0) {
  if (needle.empty()) return std::string_view::npos;
  for (auto pos = haystack.find(needle, from); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) {
    bool left = pos == 0 || !is_word_char(haystack[pos - 1]) || !is_word_char(needle.front());
    auto end = pos + needle.size();
    bool right = end == haystack.size() || !is_word_char(haystack[end]) || !is_word_char(needle.back());
    if (left && right) return pos;
  }
  return std::string_view::npos;
}

inline bool keywords_match(const std::string& question_lower, const IntentTemplate& t) {
  return std::all_of(t.keyword_groups.begin(), t.keyword_groups.end(), [&](const auto& group) {
    return std::any_of(group.begin(), group.end(), [&](const std::string& kw) {
      return find_word(question_lower, lower(kw)) != std::string::npos;
    });
  });
}

/// Earliest whole-word occurrence among candidates (longest wins at a tie).
/// Returns (position, index into candidates).
inline std::optional<std::pair<std::size_t, std::size_t>> earliest(const std::string& question_lower,
                                                                   const std::vector<std::string>& candidates) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto pos = find_word(question_lower, lower(candidates[i]));
    if (pos == std::string::npos) continue;
    if (!best || pos < best->first || (pos == best->first && candidates[i].size() > candidates[best->second].size()))
      best = {pos, i};
  }
  return best;
}

// -- amounts -----------------------------------------------------------------

struct Amount {
  double value = 0;
  std::size_t position = 0;  // byte offset of the first digit
};

/// First currency-marked number in the text, else the first number at all.
/// Accepts "$50000", "50,000", "USD 50000", "0.25€/kWh" and "£0.30".
inline Amount find_amount(std::string_view text) {
  std::optional<Amount> first;
  std::optional<Amount> marked;
  auto digit = [&](std::size_t k) { return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])); };
  auto thousands_group = [&](std::size_t comma) {
    return digit(comma + 1) && digit(comma + 2) && digit(comma + 3) && !digit(comma + 4);
  };
  std::size_t i = 0;
  while (i < text.size() && !marked) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])) || (i > 0 && is_word_char(text[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::string digits;
    while (i < text.size()) {
      char c = text[i];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        ++i;
      } else if (c == ',' && thousands_group(i)) {
        ++i;  // thousands separator
      } else if (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
                 digits.find('.') == std::string::npos) {
        digits += c;
        ++i;
      } else {
        break;
      }
    }
    if (i < text.size() && is_word_char(text[i])) continue;
    Amount a{std::stod(digits), start};
    auto before = lower(text.substr(start >= 4 ? start - 4 : 0, start >= 4 ? 4 : start));
    auto after = lower(text.substr(i, 5));
    bool currency = before.ends_with("$") || before.ends_with("\xE2\x82\xAC") || before.ends_with("\xC2\xA3") ||
                    before.ends_with("usd ") || before.ends_with("eur ") || after.starts_with("\xE2\x82\xAC") ||
                    after.starts_with("$") || after.starts_with(" usd") || after.starts_with(" eur") ||
                    after.starts_with("/kwh") || after.starts_with(" \xE2\x82\xAC");
    if (!first) first = a;
    if (currency) marked = a;
  }
  if (marked) return *marked;
  if (first) return *first;
  throw NoAmountFound(std::string(text));
}

inline double extract_money(std::string_view text) { return find_amount(text).value; }

/// Comparison implied by the phrase nearest before position: ">" by default.
inline std::string comparison_before(const std::string& question_lower, std::size_t position) {
  static const std::vector<std::pair<std::string, std::string>> phrases{
      {"higher than", ">"}, {"greater than", ">"}, {"more than", ">"},   {"larger than", ">"},
      {"above", ">"},       {"over", ">"},         {"exceeding", ">"},   {"lower than", "<"},
      {"less than", "<"},   {"smaller than", "<"}, {"below", "<"},       {"under", "<"},
      {"cheaper than", "<"}};
  std::string op = ">";
  std::size_t best = std::string::npos;
  auto head = question_lower.substr(0, position);
  for (const auto& [phrase, o] : phrases) {
    for (auto pos = find_word(head, phrase); pos != std::string::npos; pos = find_word(head, phrase, pos + 1)) {
      if (best == std::string::npos || pos > best) {
        best = pos;
        op = o;
      }
    }
  }
  return op;
}

// -- slot extractors ---------------------------------------------------------

using Slots = std::map<std::string, std::string>;

inline std::optional<std::string> extract_country(const std::string& question_lower, const Catalog& c) {
  std::vector<std::string> names;
  std::vector<std::string> canonical;
  for (const auto& [alias, name] : c.country_aliases) {
    names.push_back(alias);
    canonical.push_back(name);
  }
  for (const auto& name : c.countries) {
    names.push_back(name);
    canonical.push_back(name);
  }
  auto hit = earliest(question_lower, names);
  if (!hit) return std::nullopt;
  return canonical[hit->second];
}

inline std::optional<std::pair<std::string, std::string>> extract_continent(const std::string& question,
                                                                            const std::string& question_lower,
                                                                            const Catalog& c) {
  auto hit = earliest(question_lower, c.continents);
  if (!hit) return std::nullopt;
  static const std::regex negated(R"((not\s+(located\s+|based\s+|situated\s+)?(in|from)|outside(\s+of)?)\s+(the\s+)?$)",
                                  std::regex::icase);
  auto head = question.substr(0, hit->first);
  std::string op = std::regex_search(head, negated) ? "!=" : "=";
  return std::pair{c.continents[hit->second], op};
}

inline std::optional<std::string> extract_education(const std::string& question_lower, const Catalog& c) {
  auto anchor = find_word(question_lower, "education");
  if (anchor == std::string::npos) anchor = find_word(question_lower, "educated");
  std::optional<std::string> best;
  std::size_t best_distance = std::string::npos;
  for (const auto& level : c.education_levels) {
    auto l = lower(level);
    for (auto pos = find_word(question_lower, l); pos != std::string::npos; pos = find_word(question_lower, l, pos + 1)) {
      std::size_t d = anchor == std::string::npos ? pos : (pos > anchor ? pos - anchor : anchor - pos);
      if (d < best_distance) {
        best_distance = d;
        best = level;
      }
    }
  }
  return best;
}

inline std::optional<std::string> extract_house(const std::string& question) {
  static const std::regex spelled(
      R"(\bhouse(?:hold)?\s+(?:no\.?\s*|number\s+|#)?(\d+)\s+(?:in|of|from)\s+(?:the\s+)?([A-Za-z0-9][A-Za-z0-9-]*))",
      std::regex::icase);
  static const std::regex named(R"(\b([A-Za-z][A-Za-z0-9]*)_(\d+)\b)");
  std::smatch m;
  std::string prefix;
  std::string number;
  if (std::regex_search(question, m, spelled)) {
    number = m[1];
    prefix = m[2];
  } else if (std::regex_search(question, m, named)) {
    prefix = m[1];
    number = m[2];
  } else {
    return std::nullopt;
  }
  std::string norm;
  for (char ch : prefix)
    if (ch != '-') norm += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return norm + "_" + std::to_string(std::stoul(number));
}

// -- transform ---------------------------------------------------------------

struct TransformOutcome {
  std::string intent_id;  // empty when no intent's keywords matched
  Slots slots;
  std::string query_text;
  bool matched = false;
  std::string diagnostic;
};

inline constexpr const char* kNoIntentMatched = "NoIntentMatched";

/// Fills every slot of t from the question; the error names the first slot
/// that could not be extracted.
inline std::variant<Slots, std::string> extract_slots(const std::string& question, const IntentTemplate& t,
                                                      const Catalog& c) {
  const auto ql = lower(question);
  Slots out;
  for (const auto& s : t.slots) {
    switch (s.kind) {
      case ExtractorKind::CountryName: {
        auto v = extract_country(ql, c);
        if (!v) return "no country name found for slot '" + s.name + "'";
        out[s.name] = *v;
        break;
      }
      case ExtractorKind::MoneyAmount:
      case ExtractorKind::PriceAmount: {
        try {
          auto a = find_amount(question);
          out[s.name] = kg::num(a.value);
          out[s.name + "Op"] = comparison_before(ql, a.position);
        } catch (const NoAmountFound&) {
          return "no amount found for slot '" + s.name + "'";
        }
        break;
      }
      case ExtractorKind::ContinentName: {
        auto v = extract_continent(question, ql, c);
        if (!v) return "no continent found for slot '" + s.name + "'";
        out[s.name] = v->first;
        out[s.name + "Op"] = v->second;
        break;
      }
      case ExtractorKind::EducationLevel: {
        auto v = extract_education(ql, c);
        if (!v) return "no education level found for slot '" + s.name + "'";
        out[s.name] = *v;
        break;
      }
      case ExtractorKind::HouseRef: {
        auto v = extract_house(question);
        if (!v) return "no house reference found for slot '" + s.name + "'";
        out[s.name] = *v;
        break;
      }
    }
  }
  return out;
}

inline TransformOutcome transform(const std::string& question, const Catalog& catalog = default_catalog()) {
  TransformOutcome o;
  const auto ql = lower(question);
  const IntentTemplate* chosen = nullptr;
  for (const auto& t : catalog.intents) {
    if (keywords_match(ql, t)) {
      chosen = &t;
      break;
    }
  }
  if (!chosen) {
    o.diagnostic = std::string(kNoIntentMatched) + ": no intent's keywords match the question";
    return o;
  }
  o.intent_id = chosen->id;
  auto slots = extract_slots(question, *chosen, catalog);
  if (auto* err = std::get_if<std::string>(&slots)) {
    o.diagnostic = std::string(kNoIntentMatched) + ": " + chosen->id + ": " + *err;
    return o;
  }
  o.slots = std::get<Slots>(std::move(slots));
  o.query_text = instantiate(chosen->query_template, o.slots);
  try {
    (void)sparql::parse(o.query_text);
  } catch (const Error& e) {
    o.diagnostic = chosen->id + ": instantiated query does not parse: " + e.what();
    return o;
  }
  o.matched = true;
  return o;
}

}  // namespace elkg::transform
