#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dualtable/value.hpp"

namespace dualtable {

// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
void write_csv_row(std::ostream& out, const Row& row);

struct CsvField {
  std::string text;
  bool quoted = false;
};

// Reads one record; returns false at end of input. Handles quoted fields
// with "" escapes and embedded line breaks.
bool read_csv_record(std::istream& in, std::vector<CsvField>& fields);

// Converts a field to a typed cell. An unquoted empty field is NULL.
Value parse_csv_value(const CsvField& field, ColumnType type);

}  // namespace dualtable
