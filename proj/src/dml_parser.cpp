#include "dualtable/dml_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <bit>

namespace dualtable {

namespace {

constexpr std::size_t kMaxDepth = 200;

const std::set<std::string, std::less<>> kKeywords = {
    "AND",  "COMPACT", "CREATE", "DELETE", "DROP", "FALSE",  "FROM",  "INSERT",
    "INTO", "LOAD",    "NULL",   "OR",     "SELECT", "SET",  "TABLE", "TRUE",
    "UPDATE", "VALUES", "WHERE", "WITH",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string describe_char(unsigned char c) {
  if (c >= 0x20 && c < 0x7f) return std::string("'") + static_cast<char>(c) + "'";
  static const char* hex = "0123456789abcdef";
  return std::string("byte 0x") + hex[c >> 4] + hex[c & 15];
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    }
    if ((c & 0xE0) == 0xC0) {
      n = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      n = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      n = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + n >= s.size()) return false;
    for (std::size_t k = 1; k <= n; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += n + 1;
  }
  return true;
}

}  // namespace

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.span = here();
    if (pos_ >= text_.size()) {
      t.kind = TokenKind::kEnd;
      t.span.end = pos_;
      return t;
    }
    const char c = text_[pos_];
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
      std::string word(text_.substr(start, pos_ - start));
      std::string upper = word;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
      if (kKeywords.count(upper) > 0) {
        t.kind = TokenKind::kKeyword;
        t.text = upper;
      } else {
        t.kind = TokenKind::kIdentifier;
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        t.text = word;
      }
    } else if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
      lex_number(t);
    } else if (c == '\'') {
      lex_string(t);
    } else {
      lex_symbol(t);
    }
    t.span.end = pos_;
    return t;
  }

 private:
  SourceSpan here() const { return {pos_, pos_, line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  // Whitespace and "--" line comments.
  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
        advance();
      } else if (text_.substr(pos_, 2) == "--") {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const SourceSpan& at, std::string message) const {
    throw ParseError(at.line, at.column, std::move(message));
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    bool is_float = false;
    while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_float = true;
      advance();
      while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      is_float = true;
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
        fail(t.span, "malformed number exponent");
      }
      while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    }
    if (pos_ < text_.size() && is_ident_char(text_[pos_])) {
      fail(t.span, "malformed number");
    }
    t.kind = is_float ? TokenKind::kFloat : TokenKind::kInteger;
    t.text = std::string(text_.substr(start, pos_ - start));
  }

  void lex_string(Token& t) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= text_.size()) fail(t.span, "unterminated string literal");
      char ch = text_[pos_];
      if (ch == '\'') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
          value.push_back('\'');
          advance();
          advance();
          continue;
        }
        advance();
        break;
      }
      value.push_back(ch);
      advance();
    }
    if (!valid_utf8(value)) fail(t.span, "string literal is not valid UTF-8");
    t.kind = TokenKind::kString;
    t.text = std::move(value);
  }

  void lex_symbol(Token& t) {
    const char c = text_[pos_];
    const char n = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    auto two = [&](const char* sym) {
      advance();
      advance();
      t.text = sym;
    };
    t.kind = TokenKind::kSymbol;
    if (c == '!' && n == '=') return two("!=");
    if (c == '<' && n == '>') return two("!=");
    if (c == '<' && n == '=') return two("<=");
    if (c == '>' && n == '=') return two(">=");
    if (std::string_view("(),;=<>+-*/").find(c) != std::string_view::npos) {
      advance();
      t.text = std::string(1, c);
      return;
    }
    fail(t.span, "unexpected character " + describe_char(static_cast<unsigned char>(c)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::kEnd:
      return "end of input";
    case TokenKind::kString:
      return "string literal";
    case TokenKind::kKeyword:
      return t.text;
    default:
      return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  const Token& peek(std::size_t ahead = 0) {
    while (buffer_.size() <= ahead) buffer_.push_back(lexer_.next());
    return buffer_[ahead];
  }

  Token take() {
    peek();
    Token t = std::move(buffer_.front());
    buffer_.pop_front();
    last_end_ = t.span.end;
    return t;
  }

  bool at_end() { return peek().kind == TokenKind::kEnd; }

  bool is_symbol(std::string_view s, std::size_t ahead = 0) {
    const auto& t = peek(ahead);
    return t.kind == TokenKind::kSymbol && t.text == s;
  }
  bool is_keyword(std::string_view s) {
    const auto& t = peek();
    return t.kind == TokenKind::kKeyword && t.text == s;
  }

  [[noreturn]] void fail_expected(std::vector<std::string> expected) {
    const auto& t = peek();
    throw ParseError(t.span.line, t.span.column, "unexpected " + describe(t), std::move(expected));
  }

  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail_expected({"'" + std::string(s) + "'"});
    take();
  }
  void expect_keyword(std::string_view s) {
    if (!is_keyword(s)) fail_expected({std::string(s)});
    take();
  }
  std::string expect_identifier() {
    if (peek().kind != TokenKind::kIdentifier) fail_expected({"identifier"});
    return take().text;
  }

  Statement statement() {
    depth_ = 0;
    const SourceSpan start = peek().span;
    Statement s;
    const auto& t = peek();
    if (t.kind != TokenKind::kKeyword) {
      fail_expected({"CREATE", "DROP", "LOAD", "INSERT", "SELECT", "UPDATE", "DELETE", "COMPACT"});
    }
    if (t.text == "CREATE") {
      create(s);
    } else if (t.text == "DROP") {
      take();
      expect_keyword("TABLE");
      s.kind = StatementKind::kDrop;
      s.table = expect_identifier();
    } else if (t.text == "LOAD") {
      take();
      s.kind = StatementKind::kLoad;
      s.table = expect_identifier();
      expect_keyword("FROM");
      if (peek().kind != TokenKind::kString) fail_expected({"string literal"});
      s.path = take().text;
    } else if (t.text == "INSERT") {
      insert(s);
    } else if (t.text == "SELECT") {
      select(s);
    } else if (t.text == "UPDATE") {
      update(s);
    } else if (t.text == "DELETE") {
      take();
      expect_keyword("FROM");
      s.kind = StatementKind::kDelete;
      s.table = expect_identifier();
      where_and_options(s, true);
    } else if (t.text == "COMPACT") {
      take();
      s.kind = StatementKind::kCompact;
      s.table = expect_identifier();
    } else {
      fail_expected({"CREATE", "DROP", "LOAD", "INSERT", "SELECT", "UPDATE", "DELETE", "COMPACT"});
    }
    s.span = start;
    s.span.end = last_end_;
    return s;
  }

 private:
  void create(Statement& s) {
    take();
    expect_keyword("TABLE");
    s.kind = StatementKind::kCreate;
    s.table = expect_identifier();
    expect_symbol("(");
    while (true) {
      Column col;
      col.name = expect_identifier();
      if (peek().kind != TokenKind::kIdentifier) fail_expected({"column type"});
      const Token type_tok = peek();
      auto type = parse_column_type(type_tok.text);
      if (!type) {
        throw ParseError(type_tok.span.line, type_tok.span.column,
                         "unknown column type '" + type_tok.text + "'",
                         {"int64", "float64", "string", "bool"});
      }
      take();
      col.type = *type;
      s.schema.columns.push_back(std::move(col));
      if (is_symbol(",")) {
        take();
        continue;
      }
      if (is_symbol(")")) {
        take();
        break;
      }
      fail_expected({"','", "')'"});
    }
  }

  void insert(Statement& s) {
    take();
    expect_keyword("INTO");
    s.kind = StatementKind::kInsert;
    s.table = expect_identifier();
    expect_keyword("VALUES");
    while (true) {
      expect_symbol("(");
      Row row;
      while (true) {
        row.push_back(literal_value());
        if (is_symbol(",")) {
          take();
          continue;
        }
        if (is_symbol(")")) {
          take();
          break;
        }
        fail_expected({"','", "')'"});
      }
      s.tuples.push_back(std::move(row));
      if (!is_symbol(",")) break;
      take();
    }
  }

  void select(Statement& s) {
    take();
    s.kind = StatementKind::kSelect;
    if (is_symbol("*")) {
      take();
    } else {
      while (true) {
        if (peek().kind != TokenKind::kIdentifier) fail_expected({"'*'", "identifier"});
        s.columns.push_back(take().text);
        if (!is_symbol(",")) break;
        take();
      }
    }
    expect_keyword("FROM");
    s.table = expect_identifier();
    where_and_options(s, false);
  }

  void update(Statement& s) {
    take();
    s.kind = StatementKind::kUpdate;
    s.table = expect_identifier();
    expect_keyword("SET");
    while (true) {
      Assignment a;
      a.column = expect_identifier();
      expect_symbol("=");
      a.value = expr();
      s.assignments.push_back(std::move(a));
      if (!is_symbol(",")) break;
      take();
    }
    where_and_options(s, true);
  }

  void where_and_options(Statement& s, bool allow_options) {
    if (is_keyword("WHERE")) {
      take();
      s.where = predicate();
    }
    if (allow_options && is_keyword("WITH")) {
      take();
      options(s.options);
    }
  }

  void options(StatementOptions& o) {
    while (true) {
      if (peek().kind != TokenKind::kIdentifier) fail_expected({"RATIO", "K", "PLAN"});
      const Token name = take();
      auto duplicate = [&]() {
        throw ParseError(name.span.line, name.span.column, "duplicate option '" + name.text + "'");
      };
      expect_symbol("=");
      if (name.text == "ratio") {
        if (o.ratio) duplicate();
        const auto& v = peek();
        if (v.kind != TokenKind::kInteger && v.kind != TokenKind::kFloat) {
          fail_expected({"number"});
        }
        o.ratio = parse_double(take());
      } else if (name.text == "k") {
        if (o.k) duplicate();
        if (peek().kind != TokenKind::kInteger) fail_expected({"integer"});
        const Token v = take();
        std::uint32_t k = 0;
        auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), k);
        if (res.ec != std::errc() || res.ptr != v.text.data() + v.text.size()) {
          throw ParseError(v.span.line, v.span.column, "K out of range");
        }
        o.k = k;
      } else if (name.text == "plan") {
        if (o.plan) duplicate();
        if (peek().kind == TokenKind::kIdentifier && peek().text == "edit") {
          take();
          o.plan = Plan::kEdit;
        } else if (peek().kind == TokenKind::kIdentifier && peek().text == "overwrite") {
          take();
          o.plan = Plan::kOverwrite;
        } else {
          fail_expected({"EDIT", "OVERWRITE"});
        }
      } else {
        throw ParseError(name.span.line, name.span.column, "unknown option '" + name.text + "'",
                         {"RATIO", "K", "PLAN"});
      }
      if (!is_symbol(",")) break;
      take();
    }
  }

  Predicate predicate() {
    Predicate p;
    while (true) {
      std::vector<Comparison> conj;
      while (true) {
        conj.push_back(comparison());
        if (!is_keyword("AND")) break;
        take();
      }
      p.disjuncts.push_back(std::move(conj));
      if (!is_keyword("OR")) break;
      take();
    }
    return p;
  }

  Comparison comparison() {
    Comparison c;
    c.lhs = expr();
    const auto& t = peek();
    static const std::pair<std::string_view, CompareOp> kOps[] = {
        {"=", CompareOp::kEq}, {"!=", CompareOp::kNe}, {"<", CompareOp::kLt},
        {"<=", CompareOp::kLe}, {">", CompareOp::kGt}, {">=", CompareOp::kGe}};
    bool found = false;
    if (t.kind == TokenKind::kSymbol) {
      for (const auto& [sym, op] : kOps) {
        if (t.text == sym) {
          c.op = op;
          found = true;
          break;
        }
      }
    }
    if (!found) fail_expected({"'='", "'!='", "'<'", "'<='", "'>'", "'>='"});
    take();
    c.rhs = expr();
    return c;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        const auto& t = p.peek();
        throw ParseError(t.span.line, t.span.column, "expression nested too deeply");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  ExprPtr expr() {
    DepthGuard guard(*this);
    ExprPtr lhs = term();
    while (is_symbol("+") || is_symbol("-")) {
      ArithOp op = take().text == "+" ? ArithOp::kAdd : ArithOp::kSub;
      lhs = Expr::binary(op, lhs, term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (is_symbol("*") || is_symbol("/")) {
      ArithOp op = take().text == "*" ? ArithOp::kMul : ArithOp::kDiv;
      lhs = Expr::binary(op, lhs, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    DepthGuard guard(*this);
    if (is_symbol("-")) {
      const auto kind = peek(1).kind;
      if (kind == TokenKind::kInteger || kind == TokenKind::kFloat) {
        return Expr::literal(literal_value());
      }
      take();
      return Expr::negate(unary());
    }
    return primary();
  }

  ExprPtr primary() {
    const auto& t = peek();
    if (t.kind == TokenKind::kIdentifier) return Expr::column(take().text);
    if (is_symbol("(")) {
      take();
      ExprPtr inner = expr();
      expect_symbol(")");
      return inner;
    }
    if (t.kind == TokenKind::kInteger || t.kind == TokenKind::kFloat ||
        t.kind == TokenKind::kString ||
        (t.kind == TokenKind::kKeyword &&
         (t.text == "NULL" || t.text == "TRUE" || t.text == "FALSE"))) {
      return Expr::literal(literal_value());
    }
    fail_expected({"identifier", "literal", "'('"});
  }

  double parse_double(const Token& t) {
    double v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
      throw ParseError(t.span.line, t.span.column, "number out of range");
    }
    return v;
  }

  // Literal with an optional leading '-' on numbers.
  Value literal_value() {
    bool negative = false;
    if (is_symbol("-")) {
      const auto kind = peek(1).kind;
      if (kind != TokenKind::kInteger && kind != TokenKind::kFloat) fail_expected({"number"});
      take();
      negative = true;
    }
    const Token t = peek();
    switch (t.kind) {
      case TokenKind::kInteger: {
        take();
        std::uint64_t magnitude = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
        constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        if (res.ec != std::errc() || magnitude > kMax + (negative ? 1 : 0)) {
          throw ParseError(t.span.line, t.span.column, "integer literal out of range");
        }
        if (negative) {
          return magnitude == kMax + 1 ? std::numeric_limits<std::int64_t>::min()
                                       : -static_cast<std::int64_t>(magnitude);
        }
        return static_cast<std::int64_t>(magnitude);
      }
      case TokenKind::kFloat: {
        take();
        double v = parse_double(t);
        return negative ? -v : v;
      }
      case TokenKind::kString:
        take();
        return t.text;
      case TokenKind::kKeyword:
        if (t.text == "NULL") {
          take();
          return std::monostate{};
        }
        if (t.text == "TRUE" || t.text == "FALSE") {
          take();
          return t.text == "TRUE";
        }
        break;
      default:
        break;
    }
    fail_expected({"literal"});
  }

  Lexer lexer_;
  std::deque<Token> buffer_;
  std::size_t last_end_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace detail

namespace {

std::string quote_string(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

std::string literal_text(const Value& v) {
  switch (v.index()) {
    case 0:
      return "NULL";
    case 3:
      return quote_string(std::get<std::string>(v));
    case 4:
      return std::get<bool>(v) ? "TRUE" : "FALSE";
    default:
      return format_value(v);
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  detail::Lexer lexer(text);
  std::vector<Token> out;
  while (true) {
    out.push_back(lexer.next());
    if (out.back().kind == TokenKind::kEnd) break;
  }
  return out;
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd:
      return "+";
    case ArithOp::kSub:
      return "-";
    case ArithOp::kMul:
      return "*";
    case ArithOp::kDiv:
      return "/";
  }
  return "?";
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return "=";
    case CompareOp::kNe:
      return "!=";
    case CompareOp::kLt:
      return "<";
    case CompareOp::kLe:
      return "<=";
    case CompareOp::kGt:
      return ">";
    case CompareOp::kGe:
      return ">=";
  }
  return "?";
}

std::string_view to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::kSelect:
      return "SELECT";
    case StatementKind::kUpdate:
      return "UPDATE";
    case StatementKind::kDelete:
      return "DELETE";
    case StatementKind::kInsert:
      return "INSERT";
    case StatementKind::kLoad:
      return "LOAD";
    case StatementKind::kCreate:
      return "CREATE";
    case StatementKind::kDrop:
      return "DROP";
    case StatementKind::kCompact:
      return "COMPACT";
  }
  return "?";
}

ExprPtr Expr::column(std::string name) {
  return std::make_shared<const Expr>(Expr{ColumnRef{std::move(name)}});
}
ExprPtr Expr::literal(Value value) {
  return std::make_shared<const Expr>(Expr{Literal{std::move(value)}});
}
ExprPtr Expr::negate(ExprPtr operand) {
  return std::make_shared<const Expr>(Expr{Negate{std::move(operand)}});
}
ExprPtr Expr::binary(ArithOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

namespace {

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool same_value(const Value& a, const Value& b) {
  // Bitwise for doubles so that printing round trips are checked exactly.
  if (a.index() == 2 && b.index() == 2) {
    return std::bit_cast<std::uint64_t>(std::get<double>(a)) ==
           std::bit_cast<std::uint64_t>(std::get<double>(b));
  }
  return a == b;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Expr::Literal>) {
          return same_value(x.value, y.value);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          return same(x.operand, y.operand);
        } else {
          return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
        }
      },
      a.node);
}

bool operator==(const Comparison& a, const Comparison& b) {
  return a.op == b.op && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

bool operator==(const Assignment& a, const Assignment& b) {
  return a.column == b.column && same(a.value, b.value);
}

bool Statement::operator==(const Statement& o) const {
  if (tuples.size() != o.tuples.size()) return false;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].size() != o.tuples[i].size()) return false;
    for (std::size_t j = 0; j < tuples[i].size(); ++j) {
      if (!same_value(tuples[i][j], o.tuples[i][j])) return false;
    }
  }
  return kind == o.kind && table == o.table && schema == o.schema && columns == o.columns &&
         assignments == o.assignments && where == o.where && path == o.path &&
         options == o.options;
}

Statement parse(std::string_view text) {
  detail::Parser p(text);
  Statement s = p.statement();
  if (p.is_symbol(";")) p.take();
  if (!p.at_end()) p.fail_expected({"';'", "end of input"});
  return s;
}

ScriptParser::ScriptParser(std::string_view text)
    : text_(text), parser_(std::make_unique<detail::Parser>(text_)) {}

ScriptParser::~ScriptParser() = default;

std::optional<Statement> ScriptParser::next() {
  auto& p = *parser_;
  while (p.is_symbol(";")) p.take();
  if (p.at_end()) return std::nullopt;
  Statement s = p.statement();
  if (!p.is_symbol(";") && !p.at_end()) p.fail_expected({"';'", "end of input"});
  return s;
}

std::string to_string(const Expr& expr) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, Expr::Literal>) {
          return literal_text(x.value);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          return "-(" + to_string(*x.operand) + ")";
        } else {
          auto side = [](const ExprPtr& e) {
            auto text = to_string(*e);
            return std::holds_alternative<Expr::Binary>(e->node) ? "(" + text + ")" : text;
          };
          return side(x.lhs) + " " + std::string(to_string(x.op)) + " " + side(x.rhs);
        }
      },
      expr.node);
}

std::string to_string(const Predicate& pred) {
  std::string out;
  for (std::size_t i = 0; i < pred.disjuncts.size(); ++i) {
    if (i > 0) out += " OR ";
    const auto& conj = pred.disjuncts[i];
    for (std::size_t j = 0; j < conj.size(); ++j) {
      if (j > 0) out += " AND ";
      out += to_string(*conj[j].lhs) + " " + std::string(to_string(conj[j].op)) + " " +
             to_string(*conj[j].rhs);
    }
  }
  return out;
}

std::string to_string(const Statement& s) {
  std::string out;
  auto where = [&]() {
    if (s.where) out += " WHERE " + to_string(*s.where);
  };
  auto options = [&]() {
    if (s.options.empty()) return;
    std::vector<std::string> parts;
    if (s.options.ratio) parts.push_back("RATIO = " + format_value(*s.options.ratio));
    if (s.options.k) parts.push_back("K = " + std::to_string(*s.options.k));
    if (s.options.plan) parts.push_back("PLAN = " + std::string(to_string(*s.options.plan)));
    out += " WITH ";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += ", ";
      out += parts[i];
    }
  };
  switch (s.kind) {
    case StatementKind::kCreate:
      out = "CREATE TABLE " + s.table + " (";
      for (std::size_t i = 0; i < s.schema.columns.size(); ++i) {
        if (i > 0) out += ", ";
        out += s.schema.columns[i].name + " " + std::string(to_string(s.schema.columns[i].type));
      }
      out += ")";
      break;
    case StatementKind::kDrop:
      out = "DROP TABLE " + s.table;
      break;
    case StatementKind::kLoad:
      out = "LOAD " + s.table + " FROM " + quote_string(s.path);
      break;
    case StatementKind::kCompact:
      out = "COMPACT " + s.table;
      break;
    case StatementKind::kInsert:
      out = "INSERT INTO " + s.table + " VALUES ";
      for (std::size_t i = 0; i < s.tuples.size(); ++i) {
        if (i > 0) out += ", ";
        out += "(";
        for (std::size_t j = 0; j < s.tuples[i].size(); ++j) {
          if (j > 0) out += ", ";
          out += literal_text(s.tuples[i][j]);
        }
        out += ")";
      }
      break;
    case StatementKind::kSelect:
      out = "SELECT ";
      if (s.columns.empty()) {
        out += "*";
      } else {
        for (std::size_t i = 0; i < s.columns.size(); ++i) {
          if (i > 0) out += ", ";
          out += s.columns[i];
        }
      }
      out += " FROM " + s.table;
      where();
      break;
    case StatementKind::kUpdate:
      out = "UPDATE " + s.table + " SET ";
      for (std::size_t i = 0; i < s.assignments.size(); ++i) {
        if (i > 0) out += ", ";
        out += s.assignments[i].column + " = " + to_string(*s.assignments[i].value);
      }
      where();
      options();
      break;
    case StatementKind::kDelete:
      out = "DELETE FROM " + s.table;
      where();
      options();
      break;
  }
  return out;
}

}  // namespace dualtable
