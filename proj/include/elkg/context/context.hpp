#pragma once

// Enhanced Context: query results as a TAB-separated text block.
//
//   prefix<TAB>countryName
//   IDEAL<TAB>United Kingdom
//   ... (N more rows omitted)

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "elkg/rdf/store.hpp"
#include "elkg/sparql/eval.hpp"
#include "elkg/sparql/parser.hpp"

namespace elkg::context {

inline constexpr std::size_t kDefaultMaxRows = 50;
inline constexpr std::size_t kDefaultMaxChars = 8000;

struct ContextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool truncated = false;
  std::size_t total_rows = 0;

  friend bool operator==(const ContextTable&, const ContextTable&) = default;
};

class ContextParseError : public Error {
public:
  using Error::Error;
};

/// TAB and newline characters inside a cell become a single space.
inline std::string clean_cell(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\t' || c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

inline ContextTable to_context(const sparql::ResultTable& result, std::size_t max_rows = kDefaultMaxRows) {
  ContextTable t;
  t.header = result.header;
  for (const auto& r : result.rows) {
    std::vector<std::string> cells;
    cells.reserve(r.size());
    for (const auto& c : r) cells.push_back(c ? clean_cell(c->value()) : std::string());
    t.rows.push_back(std::move(cells));
  }
  std::sort(t.rows.begin(), t.rows.end());
  t.total_rows = t.rows.size();
  if (t.rows.size() > max_rows) t.rows.resize(max_rows);
  t.truncated = t.rows.size() < t.total_rows;
  return t;
}

/// Runs the query and returns its rows sorted lexicographically by cells,
/// capped at max_rows.
inline ContextTable retrieve(const rdf::Store& store, std::string_view query_text,
                             std::size_t max_rows = kDefaultMaxRows) {
  return to_context(sparql::evaluate(store, sparql::parse(query_text)), max_rows);
}

inline std::string join_cells(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += '\t';
    out += cells[i];
  }
  return out;
}

inline std::string omission_line(std::size_t omitted) {
  return "... (" + std::to_string(omitted) + " more rows omitted)";
}

/// Header line, then one line per row; a final omission line when rows are
/// left out. Never longer than max_chars and never ends with a newline.
inline std::string serialize(const ContextTable& table, std::size_t max_rows = kDefaultMaxRows,
                             std::size_t max_chars = kDefaultMaxChars) {
  const std::size_t total = std::max(table.total_rows, table.rows.size());
  std::vector<std::string> lines;
  lines.push_back(join_cells(table.header));
  std::size_t size = lines[0].size();
  std::size_t shown = 0;
  for (const auto& row : table.rows) {
    if (shown == std::max<std::size_t>(max_rows, 1)) break;
    lines.push_back(join_cells(row));
    size += 1 + lines.back().size();
    ++shown;
  }
  auto fits = [&] {
    std::size_t n = size;
    if (shown < total) n += 1 + omission_line(total - shown).size();
    return n <= max_chars;
  };
  while (shown > 0 && !fits()) {
    size -= 1 + lines.back().size();
    lines.pop_back();
    --shown;
  }
  std::string out = lines[0];
  for (std::size_t i = 1; i < lines.size(); ++i) out += "\n" + lines[i];
  if (shown < total) {
    auto tail = "\n" + omission_line(total - shown);
    if (out.size() + tail.size() <= max_chars) out += tail;
  }
  if (out.size() > max_chars) out.resize(max_chars);
  return out;
}

/// Inverse of serialize for tables whose cells hold no TAB or newline.
inline ContextTable parse_serialized(std::string_view text) {
  ContextTable t;
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (lines.empty() || lines[0].empty()) throw ContextParseError("context block has no header line");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::size_t s = 0;
    for (;;) {
      auto tab = line.find('\t', s);
      cells.push_back(line.substr(s, tab == std::string::npos ? std::string::npos : tab - s));
      if (tab == std::string::npos) break;
      s = tab + 1;
    }
    return cells;
  };
  t.header = split(lines[0]);
  std::size_t omitted = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (i + 1 == lines.size() && line.rfind("... (", 0) == 0 && line.ends_with(" more rows omitted)")) {
      try {
        omitted = std::stoul(line.substr(5));
      } catch (const std::exception&) {
        throw ContextParseError("malformed omission line: " + line);
      }
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ContextParseError("context row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                              " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  t.total_rows = t.rows.size() + omitted;
  t.truncated = omitted > 0;
  return t;
}

}  // namespace elkg::context
