#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dualtable/cost_model.hpp"
#include "dualtable/error.hpp"
#include "dualtable/value.hpp"

namespace dualtable {

struct SourceSpan {
  std::size_t begin = 0;  // byte offsets into the parsed text
  std::size_t end = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

enum class TokenKind : std::uint8_t {
  kIdentifier,
  kKeyword,
  kInteger,
  kFloat,
  kString,
  kSymbol,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;  // keywords upper-case, identifiers lower-case
  SourceSpan span;
};

// Splits text into tokens; throws ParseError for malformed input.
std::vector<Token> tokenize(std::string_view text);

enum class ArithOp : std::uint8_t { kAdd, kSub, kMul, kDiv };
enum class CompareOp : std::uint8_t { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view to_string(ArithOp op);
std::string_view to_string(CompareOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct ColumnRef {
    std::string name;
  };
  struct Literal {
    Value value;
  };
  struct Negate {
    ExprPtr operand;
  };
  struct Binary {
    ArithOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<ColumnRef, Literal, Negate, Binary> node;

  static ExprPtr column(std::string name);
  static ExprPtr literal(Value value);
  static ExprPtr negate(ExprPtr operand);
  static ExprPtr binary(ArithOp op, ExprPtr lhs, ExprPtr rhs);
};

bool operator==(const Expr& a, const Expr& b);

struct Comparison {
  CompareOp op = CompareOp::kEq;
  ExprPtr lhs;
  ExprPtr rhs;
};

bool operator==(const Comparison& a, const Comparison& b);

// Disjunction of conjunctions.
struct Predicate {
  std::vector<std::vector<Comparison>> disjuncts;

  bool operator==(const Predicate&) const = default;
};

struct Assignment {
  std::string column;
  ExprPtr value;
};

bool operator==(const Assignment& a, const Assignment& b);

struct StatementOptions {
  std::optional<double> ratio;
  std::optional<std::uint32_t> k;
  std::optional<Plan> plan;

  bool empty() const { return !ratio && !k && !plan; }
  bool operator==(const StatementOptions&) const = default;
};

enum class StatementKind : std::uint8_t {
  kSelect,
  kUpdate,
  kDelete,
  kInsert,
  kLoad,
  kCreate,
  kDrop,
  kCompact,
};

std::string_view to_string(StatementKind kind);

struct Statement {
  StatementKind kind = StatementKind::kSelect;
  std::string table;
  Schema schema;                     // CREATE
  std::vector<std::string> columns;  // SELECT; empty means *
  std::vector<Assignment> assignments;
  std::optional<Predicate> where;
  std::vector<Row> tuples;  // INSERT
  std::string path;         // LOAD
  StatementOptions options;
  SourceSpan span;  // not part of equality

  bool operator==(const Statement& other) const;
};

// Parses exactly one statement (an optional trailing ';' is allowed).
Statement parse(std::string_view text);

// Sequential parser over a ';'-separated script. Positions in errors refer
// to the whole script.
namespace detail {
class Parser;
}

class ScriptParser {
 public:
  explicit ScriptParser(std::string_view text);
  ~ScriptParser();
  ScriptParser(const ScriptParser&) = delete;
  ScriptParser& operator=(const ScriptParser&) = delete;

  // Next statement, or nothing at end of input.
  std::optional<Statement> next();

 private:
  std::string text_;
  std::unique_ptr<detail::Parser> parser_;
};

// Canonical text: keywords upper-case, single spaces, nested arithmetic
// parenthesized. parse(to_string(s)) == s.
std::string to_string(const Statement& stmt);
std::string to_string(const Expr& expr);
std::string to_string(const Predicate& pred);

}  // namespace dualtable
