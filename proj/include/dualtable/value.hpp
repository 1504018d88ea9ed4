#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dualtable {

enum class ColumnType : std::uint8_t { kInt64 = 0, kFloat64 = 1, kUtf8 = 2, kBool = 3 };

std::string_view to_string(ColumnType type);

// Accepts the canonical names (int64, float64, string, bool) and the usual
// SQL aliases, case-insensitively.
std::optional<ColumnType> parse_column_type(std::string_view name);

// A typed scalar cell. std::monostate is NULL.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// NULL matches every column type.
bool value_matches(const Value& v, ColumnType type);

// Encoded payload width: 8 for int64/float64, 1 for bool, byte length for
// strings, 0 for NULL.
std::size_t payload_size(const Value& v);

// Human-readable rendering used by CSV output and error messages.
std::string format_value(const Value& v);

using Row = std::vector<Value>;

struct Column {
  std::string name;
  ColumnType type = ColumnType::kInt64;

  bool operator==(const Column&) const = default;
};

struct Schema {
  std::vector<Column> columns;

  std::size_t size() const { return columns.size(); }
  std::optional<std::size_t> find(std::string_view name) const;

  // Stable 64-bit digest of names and types, stored in segment headers.
  std::uint64_t digest() const;

  // Throws UserError for an empty schema or duplicate column names.
  void validate() const;

  // Throws UserError when arity or any cell type does not match.
  void check_row(const Row& row) const;

  bool operator==(const Schema&) const = default;
};

}  // namespace dualtable
