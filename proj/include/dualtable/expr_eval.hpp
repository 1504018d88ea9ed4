#pragma once

#include <functional>
#include <optional>

#include "dualtable/dml_parser.hpp"
#include "dualtable/union_read.hpp"
#include "dualtable/value.hpp"

namespace dualtable {

// Expression semantics over one row:
//  - NULL in arithmetic yields NULL; any comparison with NULL is false.
//  - int64 arithmetic is checked (overflow and division by zero are errors);
//    mixing int64 and float64 promotes to float64.
//  - Comparisons need compatible operands: numeric/numeric, string/string,
//    bool/bool (false < true).
using CompiledExpr = std::function<Value(const Row&)>;

// Static type of an expression; nothing for a bare NULL literal. Throws
// UserError for unknown columns and non-numeric arithmetic.
std::optional<ColumnType> infer_type(const Expr& expr, const Schema& schema);

CompiledExpr compile_expr(const Expr& expr, const Schema& schema);
RowPredicate compile_predicate(const Predicate& pred, const Schema& schema);

// Compiles an assignment target: the result is converted to the column type
// (int64 widens to float64) and type mismatches are rejected up front.
CompiledExpr compile_assignment(const Expr& expr, const Schema& schema, std::size_t column);

// Converts a literal for storage in a column (int64 -> float64 widening).
Value coerce_literal(const Value& v, const Column& column);

}  // namespace dualtable
