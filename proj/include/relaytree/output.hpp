#pragma once

// Machine-readable command output: one header-plus-rows CSV table, or one
// JSON object {schema_version, command, inputs, rows | result}.
//
// Doubles print with 17 significant digits so text round-trips exactly.
// Infinities print as "-inf" / "inf" in both formats (JSON has no literal).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace relaytree {

using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double,
                          std::string>;

enum class Format { Csv, Json };

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
Cell optional_cell(const std::optional<T>& v) {
  if (!v) return std::monostate{};
  return static_cast<std::int64_t>(*v);
}

struct OutputRecord {
  std::string command;
  std::vector<std::pair<std::string, Cell>> inputs;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool single_result = false;  // JSON "result" object instead of "rows"
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvCell {
  std::string operator()(std::monostate) const { return ""; }
  std::string operator()(bool b) const { return b ? "true" : "false"; }
  std::string operator()(std::int64_t i) const { return std::to_string(i); }
  std::string operator()(std::uint64_t i) const { return std::to_string(i); }
  std::string operator()(double d) const { return format_number(d); }
  std::string operator()(const std::string& s) const { return csv_escape(s); }
};

struct JsonCell {
  nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
  nlohmann::ordered_json operator()(bool b) const { return b; }
  nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
  nlohmann::ordered_json operator()(std::uint64_t i) const { return i; }
  nlohmann::ordered_json operator()(double d) const {
    if (!std::isfinite(d)) return format_number(d);
    return d;
  }
  nlohmann::ordered_json operator()(const std::string& s) const { return s; }
};

}  // namespace detail

inline std::string render_csv(const OutputRecord& rec) {
  std::string out;
  for (std::size_t i = 0; i < rec.columns.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_escape(rec.columns[i]);
  }
  out += '\n';
  for (const auto& row : rec.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += std::visit(detail::CsvCell{}, row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const OutputRecord& rec) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["command"] = rec.command;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [key, value] : rec.inputs) {
    inputs[key] = std::visit(detail::JsonCell{}, value);
  }
  doc["inputs"] = inputs;
  auto row_object = [&](const std::vector<Cell>& row) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[rec.columns[i]] = std::visit(detail::JsonCell{}, row[i]);
    }
    return obj;
  };
  if (rec.single_result && rec.rows.size() == 1) {
    doc["result"] = row_object(rec.rows.front());
  } else {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : rec.rows) rows.push_back(row_object(row));
    doc["rows"] = rows;
  }
  return doc.dump(2) + "\n";
}

inline std::string render(const OutputRecord& rec, Format format) {
  return format == Format::Csv ? render_csv(rec) : render_json(rec);
}

}  // namespace relaytree
