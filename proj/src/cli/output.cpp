#include "qed/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qed/errors.hpp"

namespace qed::cli {

namespace {

std::string format_number(const Num& n, int precision) {
  if (std::isnan(n.value)) return "nan";
  if (std::isinf(n.value)) return n.value > 0 ? "inf" : "-inf";
  const int digits = n.digits >= 0 ? n.digits : precision;
  char buf[64];
  std::snprintf(buf, sizeof buf, n.scientific ? "%.*e" : "%.*f", digits, n.value);
  std::string text(buf);
  // "-0.000000" for tiny negative values reads as plain zero.
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
  return text;
}

nlohmann::ordered_json to_json(const Cell& cell, int precision) {
  return std::visit(
      [precision](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, long long>) {
          return v;
        } else {
          if (!std::isfinite(v.value)) return nullptr;
          // The JSON number is the printed value, so every format agrees.
          return std::stod(format_number(v, precision));
        }
      },
      cell);
}

std::string render_table(const Document& doc, int precision) {
  std::ostringstream os;
  for (const auto& [key, value] : doc.meta) {
    os << "# " << key << ": " << format_cell(value, precision) << '\n';
  }
  for (std::size_t t = 0; t < doc.tables.size(); ++t) {
    const Table& table = doc.tables[t];
    if (t > 0 || !doc.meta.empty()) os << '\n';
    if (doc.tables.size() > 1) os << "[" << table.name << "]\n";
    std::vector<std::vector<std::string>> text;
    std::vector<std::size_t> width(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) width[c] = table.columns[c].size();
    for (const auto& row : table.rows) {
      auto& line = text.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        line.push_back(format_cell(row[c], precision));
        width[c] = std::max(width[c], line.back().size());
      }
    }
    const auto put = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) os << "  ";
        const std::size_t pad = width[c] - cells[c].size();
        if (c == 0) {
          os << cells[c] << std::string(pad, ' ');
        } else {
          os << std::string(pad, ' ') << cells[c];
        }
      }
      os << '\n';
    };
    put(table.columns);
    for (const auto& line : text) put(line);
  }
  return os.str();
}

std::string render_csv(const Document& doc, int precision) {
  std::ostringstream os;
  for (const auto& [key, value] : doc.meta) {
    os << "# " << key << "=" << format_cell(value, precision) << '\n';
  }
  for (std::size_t t = 0; t < doc.tables.size(); ++t) {
    const Table& table = doc.tables[t];
    if (doc.tables.size() > 1) {
      if (t > 0) os << '\n';
      os << "# table=" << table.name << '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      os << (c ? "," : "") << csv_field(table.columns[c]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        os << (c ? "," : "") << csv_field(format_cell(row[c], precision));
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string render_json(const Document& doc, int precision) {
  nlohmann::ordered_json root;
  root["command"] = doc.command;
  auto& meta = root["meta"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : doc.meta) meta[key] = to_json(value, precision);
  for (const Table& table : doc.tables) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = to_json(row[c], precision);
      rows.push_back(std::move(obj));
    }
    root[table.name] = std::move(rows);
  }
  return root.dump(2) + "\n";
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "table") return Format::table;
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError("--format: expected table, csv or json, got '" + std::string(name) + "'");
}

void OutputSpec::validate() const {
  if (precision < 1 || precision > 15) throw ConfigError("--precision: must lie in [1, 15]");
}

std::string format_cell(const Cell& cell, int precision) {
  return std::visit(
      [precision](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else {
          return format_number(v, precision);
        }
      },
      cell);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string render(const Document& doc, const OutputSpec& spec) {
  spec.validate();
  switch (spec.format) {
    case Format::table: return render_table(doc, spec.precision);
    case Format::csv: return render_csv(doc, spec.precision);
    case Format::json: return render_json(doc, spec.precision);
  }
  return {};
}

void emit(const Document& doc, const OutputSpec& spec, std::ostream& out) {
  const std::string text = render(doc, spec);
  if (spec.path.empty() || spec.path == "-") {
    out << text;
    return;
  }
  std::ofstream file(spec.path, std::ios::binary);
  if (!file) throw ConfigError("--out: cannot open '" + spec.path + "' for writing");
  file << text;
}

}  // namespace qed::cli
