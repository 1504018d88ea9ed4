#include "dualtable/expr_eval.hpp"

#include <limits>

#include "dualtable/error.hpp"

namespace dualtable {

namespace {

bool numeric(ColumnType t) { return t == ColumnType::kInt64 || t == ColumnType::kFloat64; }

std::optional<ColumnType> literal_type(const Value& v) {
  switch (v.index()) {
    case 1:
      return ColumnType::kInt64;
    case 2:
      return ColumnType::kFloat64;
    case 3:
      return ColumnType::kUtf8;
    case 4:
      return ColumnType::kBool;
    default:
      return std::nullopt;
  }
}

double as_double(const Value& v) {
  return v.index() == 1 ? static_cast<double>(std::get<std::int64_t>(v)) : std::get<double>(v);
}

Value arith(ArithOp op, const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return std::monostate{};
  if (a.index() == 1 && b.index() == 1) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case ArithOp::kAdd:
        overflow = __builtin_add_overflow(x, y, &r);
        break;
      case ArithOp::kSub:
        overflow = __builtin_sub_overflow(x, y, &r);
        break;
      case ArithOp::kMul:
        overflow = __builtin_mul_overflow(x, y, &r);
        break;
      case ArithOp::kDiv:
        if (y == 0) throw UserError("division by zero");
        if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
          overflow = true;
        } else {
          r = x / y;
        }
        break;
    }
    if (overflow) throw UserError("integer overflow");
    return r;
  }
  const double x = as_double(a);
  const double y = as_double(b);
  switch (op) {
    case ArithOp::kAdd:
      return x + y;
    case ArithOp::kSub:
      return x - y;
    case ArithOp::kMul:
      return x * y;
    case ArithOp::kDiv:
      if (y == 0) throw UserError("division by zero");
      return x / y;
  }
  return std::monostate{};
}

bool compare(CompareOp op, const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return false;
  int c = 0;
  if (a.index() == 1 && b.index() == 1) {
    auto x = std::get<std::int64_t>(a);
    auto y = std::get<std::int64_t>(b);
    c = x < y ? -1 : (x > y ? 1 : 0);
  } else if ((a.index() == 1 || a.index() == 2) && (b.index() == 1 || b.index() == 2)) {
    double x = as_double(a);
    double y = as_double(b);
    c = x < y ? -1 : (x > y ? 1 : 0);
  } else if (a.index() == 3 && b.index() == 3) {
    c = std::get<std::string>(a).compare(std::get<std::string>(b));
    c = c < 0 ? -1 : (c > 0 ? 1 : 0);
  } else if (a.index() == 4 && b.index() == 4) {
    c = static_cast<int>(std::get<bool>(a)) - static_cast<int>(std::get<bool>(b));
  } else {
    throw UserError("cannot compare values of different types");
  }
  switch (op) {
    case CompareOp::kEq:
      return c == 0;
    case CompareOp::kNe:
      return c != 0;
    case CompareOp::kLt:
      return c < 0;
    case CompareOp::kLe:
      return c <= 0;
    case CompareOp::kGt:
      return c > 0;
    case CompareOp::kGe:
      return c >= 0;
  }
  return false;
}

}  // namespace

std::optional<ColumnType> infer_type(const Expr& expr, const Schema& schema) {
  return std::visit(
      [&](const auto& x) -> std::optional<ColumnType> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
          auto idx = schema.find(x.name);
          if (!idx) throw UserError("unknown column '" + x.name + "'");
          return schema.columns[*idx].type;
        } else if constexpr (std::is_same_v<T, Expr::Literal>) {
          return literal_type(x.value);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          auto t = infer_type(*x.operand, schema);
          if (t && !numeric(*t)) throw UserError("cannot negate a non-numeric value");
          return t;
        } else {
          auto l = infer_type(*x.lhs, schema);
          auto r = infer_type(*x.rhs, schema);
          if ((l && !numeric(*l)) || (r && !numeric(*r))) {
            throw UserError("arithmetic '" + std::string(to_string(x.op)) +
                            "' needs numeric operands");
          }
          if (!l) return r;
          if (!r) return l;
          return (*l == ColumnType::kFloat64 || *r == ColumnType::kFloat64) ? ColumnType::kFloat64
                                                                            : ColumnType::kInt64;
        }
      },
      expr.node);
}

CompiledExpr compile_expr(const Expr& expr, const Schema& schema) {
  infer_type(expr, schema);
  return std::visit(
      [&](const auto& x) -> CompiledExpr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
          const std::size_t idx = *schema.find(x.name);
          return [idx](const Row& row) { return row[idx]; };
        } else if constexpr (std::is_same_v<T, Expr::Literal>) {
          return [v = x.value](const Row&) { return v; };
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          auto inner = compile_expr(*x.operand, schema);
          return [inner](const Row& row) -> Value {
            Value v = inner(row);
            if (v.index() == 1) {
              auto i = std::get<std::int64_t>(v);
              if (i == std::numeric_limits<std::int64_t>::min()) {
                throw UserError("integer overflow");
              }
              return -i;
            }
            if (v.index() == 2) return -std::get<double>(v);
            return v;
          };
        } else {
          auto l = compile_expr(*x.lhs, schema);
          auto r = compile_expr(*x.rhs, schema);
          return [op = x.op, l, r](const Row& row) { return arith(op, l(row), r(row)); };
        }
      },
      expr.node);
}

RowPredicate compile_predicate(const Predicate& pred, const Schema& schema) {
  struct Cmp {
    CompareOp op;
    CompiledExpr lhs;
    CompiledExpr rhs;
  };
  std::vector<std::vector<Cmp>> dnf;
  for (const auto& conj : pred.disjuncts) {
    std::vector<Cmp> compiled;
    for (const auto& c : conj) {
      auto lt = infer_type(*c.lhs, schema);
      auto rt = infer_type(*c.rhs, schema);
      if (lt && rt && *lt != *rt && !(numeric(*lt) && numeric(*rt))) {
        throw UserError("cannot compare " + std::string(to_string(*lt)) + " with " +
                        std::string(to_string(*rt)));
      }
      compiled.push_back({c.op, compile_expr(*c.lhs, schema), compile_expr(*c.rhs, schema)});
    }
    dnf.push_back(std::move(compiled));
  }
  return [dnf = std::move(dnf)](const Row& row) {
    for (const auto& conj : dnf) {
      bool all = true;
      for (const auto& c : conj) {
        if (!compare(c.op, c.lhs(row), c.rhs(row))) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  };
}

CompiledExpr compile_assignment(const Expr& expr, const Schema& schema, std::size_t column) {
  const auto& target = schema.columns.at(column);
  auto type = infer_type(expr, schema);
  if (type && *type != target.type &&
      !(*type == ColumnType::kInt64 && target.type == ColumnType::kFloat64)) {
    throw UserError("cannot assign " + std::string(to_string(*type)) + " to column '" +
                    target.name + "' of type " + std::string(to_string(target.type)));
  }
  auto fn = compile_expr(expr, schema);
  if (target.type != ColumnType::kFloat64) return fn;
  return [fn](const Row& row) -> Value {
    Value v = fn(row);
    if (v.index() == 1) return static_cast<double>(std::get<std::int64_t>(v));
    return v;
  };
}

Value coerce_literal(const Value& v, const Column& column) {
  if (v.index() == 1 && column.type == ColumnType::kFloat64) {
    return static_cast<double>(std::get<std::int64_t>(v));
  }
  if (!value_matches(v, column.type)) {
    throw UserError("value '" + format_value(v) + "' does not match column '" + column.name +
                    "' of type " + std::string(to_string(column.type)));
  }
  return v;
}

}  // namespace dualtable
