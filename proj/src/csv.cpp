#include "dualtable/csv.hpp"

#include <charconv>
#include <cmath>

#include "dualtable/error.hpp"

namespace dualtable {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

void write_csv_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    if (is_null(row[i])) continue;
    // Strings are always quoted so an empty string differs from NULL.
    if (row[i].index() == 3) {
      const auto& s = std::get<std::string>(row[i]);
      out << '"';
      for (char c : s) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << format_value(row[i]);
    }
  }
  out << '\n';
}

bool read_csv_record(std::istream& in, std::vector<CsvField>& fields) {
  fields.clear();
  int c = in.get();
  if (c == std::char_traits<char>::eof()) return false;
  CsvField field;
  bool in_quotes = false;
  while (true) {
    if (c == std::char_traits<char>::eof()) {
      if (in_quotes) throw UserError("unterminated quoted CSV field");
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.text += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field.text += ch;
      }
    } else if (ch == '"') {
      if (!field.text.empty() || field.quoted) throw UserError("stray quote in CSV field");
      field.quoted = true;
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field = CsvField{};
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && in.peek() == '\n') in.get();
      fields.push_back(std::move(field));
      return true;
    } else {
      if (field.quoted) throw UserError("text after closing quote in CSV field");
      field.text += ch;
    }
    c = in.get();
  }
}

Value parse_csv_value(const CsvField& field, ColumnType type) {
  if (!field.quoted && field.text.empty()) return std::monostate{};
  const std::string& t = field.text;
  switch (type) {
    case ColumnType::kUtf8:
      return t;
    case ColumnType::kInt64: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || p != t.data() + t.size()) {
        throw UserError("'" + t + "' is not an int64");
      }
      return v;
    }
    case ColumnType::kFloat64: {
      double v = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) {
        throw UserError("'" + t + "' is not a float64");
      }
      return v;
    }
    case ColumnType::kBool:
      if (t == "true" || t == "TRUE" || t == "1") return true;
      if (t == "false" || t == "FALSE" || t == "0") return false;
      throw UserError("'" + t + "' is not a bool");
  }
  return std::monostate{};
}

}  // namespace dualtable
