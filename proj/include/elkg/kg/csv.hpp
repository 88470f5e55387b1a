#pragma once

// Minimal RFC 4180 CSV reader/writer. Lines starting with '#' are comments.

#include <string>
#include <string_view>
#include <vector>

#include "elkg/error.hpp"

namespace elkg::kg {

class CsvError : public Error {
public:
  using Error::Error;
};

using CsvRow = std::vector<std::string>;

inline std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool at_line_start = true;
  bool field_started = false;
  std::size_t line = 1;

  auto end_row = [&] {
    if (field_started || !row.empty()) {
      row.push_back(std::move(field));
      rows.push_back(std::move(row));
    }
    row.clear();
    field.clear();
    field_started = false;
    at_line_start = true;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (at_line_start && c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      ++line;
      continue;
    }
    at_line_start = false;
    switch (c) {
      case '"':
        if (!field.empty()) throw CsvError("stray quote in CSV field at line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted CSV field");
  end_row();
  return rows;
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string write_csv(const std::vector<CsvRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

/// Header-addressed view of parsed CSV rows.
class CsvTable {
public:
  CsvTable(std::vector<CsvRow> rows, std::vector<std::string> required, std::string name)
      : name_(std::move(name)) {
    if (rows.empty()) throw CsvError(name_ + ": missing header row");
    header_ = std::move(rows.front());
    rows.erase(rows.begin());
    rows_ = std::move(rows);
    for (const auto& r : required) index_of(r);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i].size() != header_.size())
        throw CsvError(name_ + ": row " + std::to_string(i + 1) + " has " + std::to_string(rows_[i].size()) +
                       " fields, expected " + std::to_string(header_.size()));
  }

  [[nodiscard]] std::size_t size() const { return rows_.size(); }

  [[nodiscard]] const std::string& get(std::size_t row, const std::string& column) const {
    return rows_.at(row).at(index_of(column));
  }

  [[nodiscard]] bool has_column(const std::string& column) const {
    for (const auto& h : header_)
      if (h == column) return true;
    return false;
  }

  [[nodiscard]] double number(std::size_t row, const std::string& column) const {
    const auto& s = get(row, column);
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw CsvError(name_ + ": column '" + column + "' row " + std::to_string(row + 1) + ": not a number: '" + s + "'");
    }
  }

  [[nodiscard]] long long integer(std::size_t row, const std::string& column) const {
    const auto& s = get(row, column);
    try {
      std::size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw CsvError(name_ + ": column '" + column + "' row " + std::to_string(row + 1) + ": not an integer: '" + s +
                     "'");
    }
  }

private:
  std::size_t index_of(const std::string& column) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == column) return i;
    throw CsvError(name_ + ": missing column '" + column + "'");
  }

  std::string name_;
  std::vector<std::string> header_;
  std::vector<CsvRow> rows_;
};

}  // namespace elkg::kg
