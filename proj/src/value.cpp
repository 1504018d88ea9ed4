#include "dualtable/value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "dualtable/bytes.hpp"
#include "dualtable/error.hpp"

namespace dualtable {

ParseError::ParseError(std::size_t line, std::size_t column, std::string message,
                       std::vector<std::string> expected)
    : UserError([&] {
        std::string what = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        if (!expected.empty()) {
          what += " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) what += i + 1 == expected.size() ? " or " : ", ";
            what += expected[i];
          }
          what += ")";
        }
        return what;
      }()),
      line_(line),
      column_(column),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::kInt64:
      return "int64";
    case ColumnType::kFloat64:
      return "float64";
    case ColumnType::kUtf8:
      return "string";
    case ColumnType::kBool:
      return "bool";
  }
  return "?";
}

std::optional<ColumnType> parse_column_type(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "int64" || lower == "bigint" || lower == "int" || lower == "integer") {
    return ColumnType::kInt64;
  }
  if (lower == "float64" || lower == "double" || lower == "float" || lower == "real") {
    return ColumnType::kFloat64;
  }
  if (lower == "string" || lower == "utf8" || lower == "varchar" || lower == "text") {
    return ColumnType::kUtf8;
  }
  if (lower == "bool" || lower == "boolean") {
    return ColumnType::kBool;
  }
  return std::nullopt;
}

bool value_matches(const Value& v, ColumnType type) {
  switch (v.index()) {
    case 0:
      return true;
    case 1:
      return type == ColumnType::kInt64;
    case 2:
      return type == ColumnType::kFloat64;
    case 3:
      return type == ColumnType::kUtf8;
    case 4:
      return type == ColumnType::kBool;
  }
  return false;
}

std::size_t payload_size(const Value& v) {
  switch (v.index()) {
    case 1:
    case 2:
      return 8;
    case 3:
      return std::get<std::string>(v).size();
    case 4:
      return 1;
    default:
      return 0;
  }
}

std::string format_value(const Value& v) {
  switch (v.index()) {
    case 1:
      return std::to_string(std::get<std::int64_t>(v));
    case 2: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), std::get<double>(v));
      std::string out(buf, res.ptr);
      if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
      return out;
    }
    case 3:
      return std::get<std::string>(v);
    case 4:
      return std::get<bool>(v) ? "true" : "false";
    default:
      return "NULL";
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::uint64_t Schema::digest() const {
  std::uint64_t h = fnv1a64("dualtable-schema");
  for (const auto& c : columns) {
    h = fnv1a64(c.name, h);
    h = fnv1a64(":", h);
    h = fnv1a64(to_string(c.type), h);
    h = fnv1a64(";", h);
  }
  return h;
}

void Schema::validate() const {
  if (columns.empty()) {
    throw UserError("schema must have at least one column");
  }
  if (columns.size() > 0xFFFF) {
    throw UserError("schema has too many columns");
  }
  std::set<std::string_view> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c.name).second) {
      throw UserError("duplicate column name '" + c.name + "'");
    }
  }
}

void Schema::check_row(const Row& row) const {
  if (row.size() != columns.size()) {
    throw UserError("row has " + std::to_string(row.size()) + " values, schema has " +
                    std::to_string(columns.size()) + " columns");
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!value_matches(row[i], columns[i].type)) {
      throw UserError("value '" + format_value(row[i]) + "' does not match column '" +
                      columns[i].name + "' of type " + std::string(to_string(columns[i].type)));
    }
  }
}

}  // namespace dualtable
