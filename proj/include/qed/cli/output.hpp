#pragma once

// Rendering of command results as aligned text, CSV or JSON.

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qed::cli {

enum class Format { table, csv, json };

Format parse_format(std::string_view name);

struct OutputSpec {
  Format format = Format::table;
  /// Empty or "-" writes to the command's output stream.
  std::string path;
  int precision = 6;

  void validate() const;
};

/// A number with an optional per-cell digit count (-1: use the spec precision).
struct Num {
  double value;
  int digits = -1;
  bool scientific = false;
};

using Cell = std::variant<std::monostate, std::string, long long, Num>;

inline Cell num(double v) { return Num{v}; }
inline Cell fixed(double v, int digits) { return Num{v, digits}; }
inline Cell sci(double v) { return Num{v, 3, true}; }

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Document {
  std::string command;
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<Table> tables;
};

/// Text of a cell as it appears in table and CSV output.
std::string format_cell(const Cell& cell, int precision);

/// RFC 4180 quoting when the field contains a comma, quote or line break.
std::string csv_field(std::string_view text);

std::string render(const Document& doc, const OutputSpec& spec);

/// Writes to spec.path, or to `out` when no path is set.
void emit(const Document& doc, const OutputSpec& spec, std::ostream& out);

}  // namespace qed::cli
