#include "fleetlog/sql.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "fleetlog/text.hpp"

namespace fleetlog::sql {

const char* column_type_name(ColumnType type) {
  switch (type) {
    case ColumnType::kText: return "text";
    case ColumnType::kInteger: return "integer";
    case ColumnType::kReal: return "real";
    case ColumnType::kDate: return "date";
  }
  return "text";
}

std::string SqlError::to_string() const {
  if (position) {
    return message + " (at position " + std::to_string(*position) + ")";
  }
  return message;
}

int compare_values(const Value& a, const Value& b) {
  auto rank = [](const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return 0;
    if (std::holds_alternative<std::string>(v)) return 2;
    return 1;  // numeric
  };
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return 0;
  if (ra == 2) {
    const auto& sa = std::get<std::string>(a);
    const auto& sb = std::get<std::string>(b);
    return sa == sb ? 0 : (sa < sb ? -1 : 1);
  }
  auto num = [](const Value& v) {
    return std::holds_alternative<long long>(v)
               ? static_cast<double>(std::get<long long>(v))
               : std::get<double>(v);
  };
  if (std::holds_alternative<long long>(a) &&
      std::holds_alternative<long long>(b)) {
    long long la = std::get<long long>(a), lb = std::get<long long>(b);
    return la == lb ? 0 : (la < lb ? -1 : 1);
  }
  double da = num(a), db = num(b);
  return da == db ? 0 : (da < db ? -1 : 1);
}

bool values_equal(const Value& a, const Value& b) {
  if (std::holds_alternative<std::monostate>(a) ||
      std::holds_alternative<std::monostate>(b)) {
    return false;  // NULL never equals anything
  }
  bool a_text = std::holds_alternative<std::string>(a);
  bool b_text = std::holds_alternative<std::string>(b);
  if (a_text != b_text) return false;
  return compare_values(a, b) == 0;
}

bool like_match(const std::string& value, const std::string& pattern) {
  auto lower = [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  };
  std::size_t v = 0, p = 0;
  std::size_t star_p = std::string::npos, star_v = 0;
  while (v < value.size()) {
    if (p < pattern.size() &&
        (pattern[p] == '_' || lower(pattern[p]) == lower(value[v]))) {
      ++p;
      ++v;
    } else if (p < pattern.size() && pattern[p] == '%') {
      star_p = p++;
      star_v = v;
    } else if (star_p != std::string::npos) {
      p = star_p + 1;
      v = ++star_v;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

std::string value_to_display(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "NULL"; }
    std::string operator()(long long x) const { return std::to_string(x); }
    std::string operator()(double x) const {
      std::ostringstream os;
      os << x;
      return os.str();
    }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

namespace {

// ---------------------------------------------------------------------------
// Tokenizer

enum class TokenKind {
  kIdent,
  kString,
  kNumber,
  kComma,
  kDot,
  kLParen,
  kRParen,
  kStar,
  kOp,        // = != <> < <= > >=
  kSemicolon,
  kEnd,
};

struct Token {
  TokenKind kind;
  std::string text;  // raw text (idents upper-cased separately when needed)
  std::size_t pos = 0;
};

struct SqlThrow {
  SqlError error;
};

[[noreturn]] void fail(std::string message,
                       std::optional<std::size_t> pos = std::nullopt) {
  throw SqlThrow{SqlError{std::move(message), pos}};
}

std::vector<Token> tokenize(const std::string& query) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto is_ident_start = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  };
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < query.size()) {
    char c = query[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (is_ident_start(c)) {
      std::string ident;
      while (i < query.size() && is_ident(query[i])) ident += query[i++];
      tokens.push_back({TokenKind::kIdent, ident, start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      bool has_dot = false;
      while (i < query.size() &&
             (std::isdigit(static_cast<unsigned char>(query[i])) ||
              (!has_dot && query[i] == '.' && i + 1 < query.size() &&
               std::isdigit(static_cast<unsigned char>(query[i + 1]))))) {
        if (query[i] == '.') has_dot = true;
        num += query[i++];
      }
      tokens.push_back({TokenKind::kNumber, num, start});
      continue;
    }
    switch (c) {
      case '\'': {
        std::string text;
        ++i;
        bool closed = false;
        while (i < query.size()) {
          if (query[i] == '\'') {
            if (i + 1 < query.size() && query[i + 1] == '\'') {
              text += '\'';
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            text += query[i++];
          }
        }
        if (!closed) fail("unterminated string literal", start);
        tokens.push_back({TokenKind::kString, text, start});
        break;
      }
      case '"': {
        // Quoted identifier.
        std::string text;
        ++i;
        bool closed = false;
        while (i < query.size()) {
          if (query[i] == '"') {
            ++i;
            closed = true;
            break;
          }
          text += query[i++];
        }
        if (!closed) fail("unterminated quoted identifier", start);
        tokens.push_back({TokenKind::kIdent, text, start});
        break;
      }
      case ',':
        tokens.push_back({TokenKind::kComma, ",", start});
        ++i;
        break;
      case '.':
        tokens.push_back({TokenKind::kDot, ".", start});
        ++i;
        break;
      case '(':
        tokens.push_back({TokenKind::kLParen, "(", start});
        ++i;
        break;
      case ')':
        tokens.push_back({TokenKind::kRParen, ")", start});
        ++i;
        break;
      case '*':
        tokens.push_back({TokenKind::kStar, "*", start});
        ++i;
        break;
      case ';':
        tokens.push_back({TokenKind::kSemicolon, ";", start});
        ++i;
        break;
      case '=':
        tokens.push_back({TokenKind::kOp, "=", start});
        ++i;
        break;
      case '!':
        if (i + 1 < query.size() && query[i + 1] == '=') {
          tokens.push_back({TokenKind::kOp, "!=", start});
          i += 2;
        } else {
          fail("unexpected character '!'", start);
        }
        break;
      case '<':
        if (i + 1 < query.size() && (query[i + 1] == '=' || query[i + 1] == '>')) {
          tokens.push_back(
              {TokenKind::kOp, query[i + 1] == '=' ? "<=" : "!=", start});
          i += 2;
        } else {
          tokens.push_back({TokenKind::kOp, "<", start});
          ++i;
        }
        break;
      case '>':
        if (i + 1 < query.size() && query[i + 1] == '=') {
          tokens.push_back({TokenKind::kOp, ">=", start});
          i += 2;
        } else {
          tokens.push_back({TokenKind::kOp, ">", start});
          ++i;
        }
        break;
      case '-':
        tokens.push_back({TokenKind::kOp, "-", start});
        ++i;
        break;
      default:
        fail(std::string("unexpected character '") + c + "'", start);
    }
  }
  tokens.push_back({TokenKind::kEnd, "", query.size()});
  return tokens;
}

// ---------------------------------------------------------------------------
// AST

struct ColumnRef {
  std::string qualifier;  // table name or alias; may be empty
  std::string column;
  std::size_t pos = 0;

  std::string display() const {
    return qualifier.empty() ? column : qualifier + "." + column;
  }
};

struct Literal {
  Value value;
};

using Operand = std::variant<ColumnRef, Literal>;

enum class AggregateFn { kCount, kMin, kMax, kSum, kAvg };

struct Aggregate {
  AggregateFn fn;
  bool star = false;  // COUNT(*)
  ColumnRef arg;
  std::string display;
};

struct SelectItem {
  std::variant<ColumnRef, Aggregate> expr;
  std::string alias;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { kAnd, kOr, kNot, kCompare, kLike, kIn } kind;
  // kAnd/kOr/kNot
  std::vector<ExprPtr> children;
  // kCompare
  Operand lhs;
  std::string op;
  Operand rhs;
  // kLike / kIn
  std::string pattern;
  std::vector<Value> in_list;
  bool negated = false;
};

struct JoinClause {
  std::string table;
  std::string alias;
  std::vector<std::pair<ColumnRef, ColumnRef>> equalities;
  std::size_t pos = 0;
};

struct OrderItem {
  ColumnRef ref;
  bool descending = false;
};

struct SelectStatement {
  bool select_all = false;
  std::vector<SelectItem> items;
  std::string from_table;
  std::string from_alias;
  std::size_t from_pos = 0;
  std::vector<JoinClause> joins;
  ExprPtr where;
  std::vector<ColumnRef> group_by;
  std::vector<OrderItem> order_by;
  std::optional<long long> limit;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  SelectStatement parse() {
    if (!accept_keyword("SELECT")) {
      fail(
          "read-only violation: only SELECT statements are allowed over the "
          "reference tables",
          peek().pos);
    }
    SelectStatement stmt;
    parse_select_list(stmt);
    expect_keyword("FROM");
    stmt.from_pos = peek().pos;
    stmt.from_table = expect_ident("table name");
    if (peek_is_alias()) stmt.from_alias = expect_ident("table alias");

    while (true) {
      if (accept_keyword("INNER")) {
        expect_keyword("JOIN");
        parse_join(stmt);
      } else if (accept_keyword("JOIN")) {
        parse_join(stmt);
      } else {
        break;
      }
    }

    if (accept_keyword("WHERE")) stmt.where = parse_expr();
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        stmt.group_by.push_back(parse_column_ref());
      } while (accept(TokenKind::kComma));
    }
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderItem item;
        item.ref = parse_column_ref();
        if (accept_keyword("DESC")) {
          item.descending = true;
        } else {
          accept_keyword("ASC");
        }
        stmt.order_by.push_back(std::move(item));
      } while (accept(TokenKind::kComma));
    }
    if (accept_keyword("LIMIT")) {
      Token t = peek();
      if (t.kind != TokenKind::kNumber ||
          t.text.find('.') != std::string::npos) {
        fail("LIMIT expects an integer", t.pos);
      }
      advance();
      try {
        stmt.limit = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        fail("LIMIT value out of range", t.pos);
      }
    }
    accept(TokenKind::kSemicolon);
    if (peek().kind != TokenKind::kEnd) {
      fail("unexpected trailing input: '" + peek().text + "'", peek().pos);
    }
    return stmt;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t idx = std::min(index_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }
  void advance() {
    if (index_ + 1 < tokens_.size()) ++index_;
  }
  bool accept(TokenKind kind) {
    if (peek().kind == kind) {
      advance();
      return true;
    }
    return false;
  }
  bool peek_keyword(const char* kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kIdent && text::iequals(t.text, kw);
  }
  bool accept_keyword(const char* kw) {
    if (peek_keyword(kw)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_keyword(const char* kw) {
    if (!accept_keyword(kw)) {
      fail(std::string("expected ") + kw + ", got '" + peek().text + "'",
           peek().pos);
    }
  }
  std::string expect_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != TokenKind::kIdent) {
      fail(std::string("expected ") + what + ", got '" + t.text + "'", t.pos);
    }
    std::string out = t.text;
    advance();
    return out;
  }

  static bool is_reserved(const std::string& word) {
    static const char* kReserved[] = {
        "SELECT", "FROM",  "WHERE", "AND",   "OR",   "NOT",  "LIKE",
        "IN",     "ORDER", "GROUP", "BY",    "LIMIT", "JOIN", "INNER",
        "ON",     "AS",    "ASC",   "DESC"};
    for (const char* kw : kReserved) {
      if (text::iequals(word, kw)) return true;
    }
    return false;
  }

  bool peek_is_alias() const {
    const Token& t = peek();
    if (t.kind != TokenKind::kIdent) return false;
    if (is_reserved(t.text)) return text::iequals(t.text, "AS");
    return true;
  }

  std::string parse_alias_opt() {
    if (accept_keyword("AS")) return expect_ident("alias");
    const Token& t = peek();
    if (t.kind == TokenKind::kIdent && !is_reserved(t.text)) {
      std::string alias = t.text;
      advance();
      return alias;
    }
    return "";
  }

  static std::optional<AggregateFn> aggregate_fn(const std::string& name) {
    if (text::iequals(name, "COUNT")) return AggregateFn::kCount;
    if (text::iequals(name, "MIN")) return AggregateFn::kMin;
    if (text::iequals(name, "MAX")) return AggregateFn::kMax;
    if (text::iequals(name, "SUM")) return AggregateFn::kSum;
    if (text::iequals(name, "AVG")) return AggregateFn::kAvg;
    return std::nullopt;
  }

  ColumnRef parse_column_ref() {
    ColumnRef ref;
    ref.pos = peek().pos;
    ref.column = expect_ident("column name");
    if (peek().kind == TokenKind::kDot) {
      advance();
      ref.qualifier = ref.column;
      ref.column = expect_ident("column name");
    }
    return ref;
  }

  void parse_select_list(SelectStatement& stmt) {
    if (peek().kind == TokenKind::kStar) {
      advance();
      stmt.select_all = true;
      return;
    }
    do {
      SelectItem item;
      const Token& t = peek();
      if (t.kind == TokenKind::kIdent && aggregate_fn(t.text) &&
          peek(1).kind == TokenKind::kLParen) {
        Aggregate agg;
        agg.fn = *aggregate_fn(t.text);
        std::string fn_name = t.text;
        advance();
        advance();  // '('
        if (peek().kind == TokenKind::kStar) {
          if (agg.fn != AggregateFn::kCount) {
            fail("'*' is only valid inside COUNT(*)", peek().pos);
          }
          agg.star = true;
          advance();
        } else {
          agg.arg = parse_column_ref();
        }
        if (!accept(TokenKind::kRParen)) {
          fail("expected ')' after aggregate argument", peek().pos);
        }
        std::string upper;
        for (char c : fn_name) {
          upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        agg.display =
            upper + "(" + (agg.star ? std::string("*") : agg.arg.display()) +
            ")";
        item.expr = std::move(agg);
      } else {
        item.expr = parse_column_ref();
      }
      item.alias = parse_alias_opt();
      stmt.items.push_back(std::move(item));
    } while (accept(TokenKind::kComma));
  }

  void parse_join(SelectStatement& stmt) {
    JoinClause join;
    join.pos = peek().pos;
    join.table = expect_ident("table name");
    if (peek_is_alias() && !peek_keyword("ON")) {
      join.alias = expect_ident("table alias");
    }
    expect_keyword("ON");
    do {
      ColumnRef left = parse_column_ref();
      const Token& op = peek();
      if (op.kind != TokenKind::kOp || op.text != "=") {
        fail("JOIN supports equality conditions only", op.pos);
      }
      advance();
      ColumnRef right = parse_column_ref();
      join.equalities.emplace_back(std::move(left), std::move(right));
    } while (accept_keyword("AND"));
    stmt.joins.push_back(std::move(join));
  }

  Operand parse_operand() {
    const Token& t = peek();
    if (t.kind == TokenKind::kString) {
      advance();
      return Literal{Value{t.text}};
    }
    if (t.kind == TokenKind::kNumber) {
      advance();
      return make_number(t.text, false);
    }
    if (t.kind == TokenKind::kOp && t.text == "-" &&
        peek(1).kind == TokenKind::kNumber) {
      advance();
      const Token& num = peek();
      advance();
      return make_number(num.text, true);
    }
    if (t.kind == TokenKind::kIdent && !is_reserved(t.text)) {
      return parse_column_ref();
    }
    fail("expected a column, string, or number, got '" + t.text + "'", t.pos);
  }

  static Operand make_number(const std::string& text, bool negative) {
    try {
      if (text.find('.') != std::string::npos) {
        double v = std::stod(text);
        return Literal{Value{negative ? -v : v}};
      }
      long long v = std::stoll(text);
      return Literal{Value{negative ? -v : v}};
    } catch (const std::out_of_range&) {
      fail("numeric literal out of range: '" + text + "'");
    }
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr left = parse_and();
    while (accept_keyword("OR")) {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kOr;
      node->children.push_back(std::move(left));
      node->children.push_back(parse_and());
      left = std::move(node);
    }
    return left;
  }

  ExprPtr parse_and() {
    ExprPtr left = parse_not();
    while (accept_keyword("AND")) {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kAnd;
      node->children.push_back(std::move(left));
      node->children.push_back(parse_not());
      left = std::move(node);
    }
    return left;
  }

  ExprPtr parse_not() {
    if (accept_keyword("NOT")) {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kNot;
      node->children.push_back(parse_not());
      return node;
    }
    return parse_predicate();
  }

  ExprPtr parse_predicate() {
    if (peek().kind == TokenKind::kLParen) {
      advance();
      ExprPtr inner = parse_expr();
      if (!accept(TokenKind::kRParen)) {
        fail("expected ')'", peek().pos);
      }
      return inner;
    }
    Operand lhs = parse_operand();

    bool negated = false;
    if (peek_keyword("NOT") &&
        (peek_keyword("LIKE", 1) || peek_keyword("IN", 1))) {
      advance();
      negated = true;
    }
    if (accept_keyword("LIKE")) {
      const Token& t = peek();
      if (t.kind != TokenKind::kString) {
        fail("LIKE expects a string pattern", t.pos);
      }
      advance();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kLike;
      node->lhs = std::move(lhs);
      node->pattern = t.text;
      node->negated = negated;
      return node;
    }
    if (accept_keyword("IN")) {
      if (!accept(TokenKind::kLParen)) {
        fail("IN expects a parenthesized list", peek().pos);
      }
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kIn;
      node->lhs = std::move(lhs);
      node->negated = negated;
      do {
        Operand item = parse_operand();
        if (!std::holds_alternative<Literal>(item)) {
          fail("IN list items must be literals", peek().pos);
        }
        node->in_list.push_back(std::get<Literal>(item).value);
      } while (accept(TokenKind::kComma));
      if (!accept(TokenKind::kRParen)) {
        fail("expected ')' to close IN list", peek().pos);
      }
      return node;
    }
    if (negated) {
      fail("expected LIKE or IN after NOT", peek().pos);
    }

    const Token& op = peek();
    if (op.kind != TokenKind::kOp || op.text == "-") {
      fail("expected a comparison operator, got '" + op.text + "'", op.pos);
    }
    advance();
    auto node = std::make_unique<Expr>();
    node->kind = Expr::Kind::kCompare;
    node->lhs = std::move(lhs);
    node->op = op.text;
    node->rhs = parse_operand();
    return node;
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

struct BoundColumn {
  std::string source;  // table name or alias
  std::string name;
  ColumnType type;
};

struct RowContext {
  std::vector<BoundColumn> columns;

  int resolve(const ColumnRef& ref) const {
    int found = -1;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const BoundColumn& c = columns[i];
      if (!ref.qualifier.empty() && !text::iequals(c.source, ref.qualifier)) {
        continue;
      }
      if (!text::iequals(c.name, ref.column)) continue;
      if (found >= 0) {
        fail("ambiguous column name: '" + ref.display() + "'", ref.pos);
      }
      found = static_cast<int>(i);
    }
    if (found < 0) {
      fail("no such column: '" + ref.display() + "'", ref.pos);
    }
    return found;
  }
};

using Row = std::vector<Value>;

Value operand_value(const Operand& operand, const RowContext& ctx,
                    const Row& row) {
  if (const auto* lit = std::get_if<Literal>(&operand)) return lit->value;
  return row[ctx.resolve(std::get<ColumnRef>(operand))];
}

bool eval_expr(const Expr& expr, const RowContext& ctx, const Row& row) {
  switch (expr.kind) {
    case Expr::Kind::kAnd:
      return eval_expr(*expr.children[0], ctx, row) &&
             eval_expr(*expr.children[1], ctx, row);
    case Expr::Kind::kOr:
      return eval_expr(*expr.children[0], ctx, row) ||
             eval_expr(*expr.children[1], ctx, row);
    case Expr::Kind::kNot:
      return !eval_expr(*expr.children[0], ctx, row);
    case Expr::Kind::kCompare: {
      Value lhs = operand_value(expr.lhs, ctx, row);
      Value rhs = operand_value(expr.rhs, ctx, row);
      if (std::holds_alternative<std::monostate>(lhs) ||
          std::holds_alternative<std::monostate>(rhs)) {
        return false;
      }
      if (expr.op == "=") return values_equal(lhs, rhs);
      if (expr.op == "!=") return !values_equal(lhs, rhs);
      int cmp = compare_values(lhs, rhs);
      if (expr.op == "<") return cmp < 0;
      if (expr.op == "<=") return cmp <= 0;
      if (expr.op == ">") return cmp > 0;
      if (expr.op == ">=") return cmp >= 0;
      fail("unsupported operator '" + expr.op + "'");
    }
    case Expr::Kind::kLike: {
      Value lhs = operand_value(expr.lhs, ctx, row);
      bool match = std::holds_alternative<std::string>(lhs) &&
                   like_match(std::get<std::string>(lhs), expr.pattern);
      return expr.negated ? !match : match;
    }
    case Expr::Kind::kIn: {
      Value lhs = operand_value(expr.lhs, ctx, row);
      bool found = std::any_of(
          expr.in_list.begin(), expr.in_list.end(),
          [&](const Value& v) { return values_equal(lhs, v); });
      return expr.negated ? !found : found;
    }
  }
  return false;
}

struct AggregateState {
  long long count = 0;
  bool any = false;
  Value min_value;
  Value max_value;
  double sum_real = 0.0;
  long long sum_int = 0;
  bool sum_is_real = false;

  void add(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return;
    ++count;
    if (!any || compare_values(v, min_value) < 0) min_value = v;
    if (!any || compare_values(v, max_value) > 0) max_value = v;
    any = true;
    if (const auto* i = std::get_if<long long>(&v)) {
      sum_int += *i;
      sum_real += static_cast<double>(*i);
    } else if (const auto* d = std::get_if<double>(&v)) {
      sum_is_real = true;
      sum_real += *d;
    }
  }
};

class Executor {
 public:
  Executor(const std::vector<Table>& tables) : tables_(tables) {}

  QueryResult run(const SelectStatement& stmt, int row_limit) {
    bind_sources(stmt);
    std::vector<Row> rows = join_rows(stmt);

    if (stmt.where) {
      std::vector<Row> filtered;
      for (auto& row : rows) {
        if (eval_expr(*stmt.where, ctx_, row)) filtered.push_back(std::move(row));
      }
      rows = std::move(filtered);
    }

    bool has_aggregate = false;
    for (const auto& item : stmt.items) {
      if (std::holds_alternative<Aggregate>(item.expr)) has_aggregate = true;
    }

    QueryResult result;
    std::vector<Row> output;
    if (has_aggregate || !stmt.group_by.empty()) {
      output = aggregate_rows(stmt, rows, result.columns);
      sort_output(stmt, result.columns, output);
    } else {
      project_rows(stmt, rows, result.columns, output);
      sort_projected(stmt, result.columns, rows, output);
    }

    std::size_t full = output.size();
    std::size_t cap = static_cast<std::size_t>(row_limit);
    if (stmt.limit && *stmt.limit >= 0) {
      cap = std::min<std::size_t>(cap, static_cast<std::size_t>(*stmt.limit));
    }
    if (output.size() > cap) output.resize(cap);
    result.truncated = full > output.size();
    result.rows = std::move(output);
    return result;
  }

 private:
  struct Source {
    const Table* table;
    std::string label;
  };

  const Table* lookup_table(const std::string& name, std::size_t pos) const {
    for (const auto& t : tables_) {
      if (text::iequals(t.name, name)) return &t;
    }
    std::string valid;
    for (const auto& t : tables_) {
      if (!valid.empty()) valid += ", ";
      valid += t.name;
    }
    fail("no such table: '" + name + "' (valid tables: " + valid + ")", pos);
  }

  void bind_sources(const SelectStatement& stmt) {
    auto add_source = [&](const std::string& name, const std::string& alias,
                          std::size_t pos) {
      const Table* t = lookup_table(name, pos);
      std::string label = alias.empty() ? t->name : alias;
      for (const auto& existing : sources_) {
        if (text::iequals(existing.label, label)) {
          fail("duplicate table alias: '" + label + "'", pos);
        }
      }
      sources_.push_back({t, label});
      for (const auto& col : t->columns) {
        ctx_.columns.push_back({label, col.name, col.type});
      }
    };
    add_source(stmt.from_table, stmt.from_alias, stmt.from_pos);
    for (const auto& join : stmt.joins) {
      add_source(join.table, join.alias, join.pos);
    }
  }

  std::vector<Row> join_rows(const SelectStatement& stmt) {
    // Start with the FROM table.
    std::vector<Row> rows;
    for (const auto& r : sources_[0].table->rows) rows.push_back(r);

    std::size_t bound_columns = sources_[0].table->columns.size();
    for (std::size_t j = 0; j < stmt.joins.size(); ++j) {
      const JoinClause& join = stmt.joins[j];
      const Table* right = sources_[j + 1].table;

      // Split each equality into (existing side, new side).
      RowContext left_ctx;
      left_ctx.columns.assign(ctx_.columns.begin(),
                              ctx_.columns.begin() + bound_columns);
      RowContext right_ctx;
      right_ctx.columns.assign(ctx_.columns.begin() + bound_columns,
                               ctx_.columns.begin() + bound_columns +
                                   right->columns.size());

      std::vector<int> left_keys, right_keys;
      for (const auto& [a, b] : join.equalities) {
        auto try_resolve = [](const RowContext& ctx,
                              const ColumnRef& ref) -> int {
          try {
            return ctx.resolve(ref);
          } catch (const SqlThrow&) {
            return -1;
          }
        };
        int al = try_resolve(left_ctx, a);
        int br = try_resolve(right_ctx, b);
        if (al >= 0 && br >= 0) {
          left_keys.push_back(al);
          right_keys.push_back(br);
          continue;
        }
        int ar = try_resolve(right_ctx, a);
        int bl = try_resolve(left_ctx, b);
        if (ar >= 0 && bl >= 0) {
          left_keys.push_back(bl);
          right_keys.push_back(ar);
          continue;
        }
        fail("JOIN condition must relate '" + join.table +
                 "' to a previously joined table",
             join.pos);
      }

      // Hash join on the display form of the key tuple.
      std::map<std::string, std::vector<const Row*>> index;
      for (const auto& r : right->rows) {
        std::string key;
        for (int k : right_keys) {
          key += value_to_display(r[k]);
          key += '\x1f';
        }
        index[key].push_back(&r);
      }
      std::vector<Row> joined;
      for (const auto& row : rows) {
        std::string key;
        for (int k : left_keys) {
          key += value_to_display(row[k]);
          key += '\x1f';
        }
        auto it = index.find(key);
        if (it == index.end()) continue;
        for (const Row* rr : it->second) {
          Row combined = row;
          combined.insert(combined.end(), rr->begin(), rr->end());
          joined.push_back(std::move(combined));
        }
      }
      rows = std::move(joined);
      bound_columns += right->columns.size();
    }
    return rows;
  }

  void project_rows(const SelectStatement& stmt, const std::vector<Row>& rows,
                    std::vector<std::string>& names, std::vector<Row>& output) {
    std::vector<int> indices;
    if (stmt.select_all) {
      for (std::size_t i = 0; i < ctx_.columns.size(); ++i) {
        indices.push_back(static_cast<int>(i));
        names.push_back(ctx_.columns[i].name);
      }
    } else {
      for (const auto& item : stmt.items) {
        const auto& ref = std::get<ColumnRef>(item.expr);
        indices.push_back(ctx_.resolve(ref));
        names.push_back(item.alias.empty() ? ref.column : item.alias);
      }
    }
    output.reserve(rows.size());
    for (const auto& row : rows) {
      Row out;
      out.reserve(indices.size());
      for (int idx : indices) out.push_back(row[idx]);
      output.push_back(std::move(out));
    }
  }

  /// ORDER BY for plain projections: keys may be output columns or any source
  /// column.
  void sort_projected(const SelectStatement& stmt,
                      const std::vector<std::string>& names,
                      const std::vector<Row>& source_rows,
                      std::vector<Row>& output) {
    if (stmt.order_by.empty()) return;

    struct Key {
      int output_index = -1;
      int source_index = -1;
      bool descending = false;
    };
    std::vector<Key> keys;
    for (const auto& item : stmt.order_by) {
      Key key;
      key.descending = item.descending;
      if (item.ref.qualifier.empty()) {
        for (std::size_t i = 0; i < names.size(); ++i) {
          if (text::iequals(names[i], item.ref.column)) {
            key.output_index = static_cast<int>(i);
            break;
          }
        }
      }
      if (key.output_index < 0) key.source_index = ctx_.resolve(item.ref);
      keys.push_back(key);
    }

    std::vector<std::size_t> order(output.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       for (const Key& key : keys) {
                         const Value& va = key.output_index >= 0
                                               ? output[a][key.output_index]
                                               : source_rows[a][key.source_index];
                         const Value& vb = key.output_index >= 0
                                               ? output[b][key.output_index]
                                               : source_rows[b][key.source_index];
                         int cmp = compare_values(va, vb);
                         if (cmp != 0) return key.descending ? cmp > 0 : cmp < 0;
                       }
                       return false;
                     });
    std::vector<Row> sorted;
    sorted.reserve(output.size());
    for (std::size_t idx : order) sorted.push_back(std::move(output[idx]));
    output = std::move(sorted);
  }

  /// ORDER BY over aggregated output: keys must be output columns.
  void sort_output(const SelectStatement& stmt,
                   const std::vector<std::string>& names,
                   std::vector<Row>& output) {
    if (stmt.order_by.empty()) return;
    std::vector<std::pair<int, bool>> keys;
    for (const auto& item : stmt.order_by) {
      int idx = -1;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (text::iequals(names[i], item.ref.column)) {
          idx = static_cast<int>(i);
          break;
        }
      }
      if (idx < 0) {
        fail("ORDER BY over grouped results must reference an output column: '" +
                 item.ref.display() + "'",
             item.ref.pos);
      }
      keys.emplace_back(idx, item.descending);
    }
    std::stable_sort(output.begin(), output.end(),
                     [&](const Row& a, const Row& b) {
                       for (auto [idx, desc] : keys) {
                         int cmp = compare_values(a[idx], b[idx]);
                         if (cmp != 0) return desc ? cmp > 0 : cmp < 0;
                       }
                       return false;
                     });
  }

  std::vector<Row> aggregate_rows(const SelectStatement& stmt,
                                  const std::vector<Row>& rows,
                                  std::vector<std::string>& names) {
    if (stmt.select_all) {
      fail("SELECT * cannot be combined with GROUP BY or aggregates");
    }
    std::vector<int> group_indices;
    for (const auto& ref : stmt.group_by) {
      group_indices.push_back(ctx_.resolve(ref));
    }

    // Non-aggregate select items must be grouping columns.
    struct ItemPlan {
      bool is_aggregate;
      int column_index = -1;   // plain column
      AggregateFn fn = AggregateFn::kCount;
      bool star = false;
      int agg_index = -1;  // argument column
    };
    std::vector<ItemPlan> plans;
    for (const auto& item : stmt.items) {
      ItemPlan plan;
      if (const auto* agg = std::get_if<Aggregate>(&item.expr)) {
        plan.is_aggregate = true;
        plan.fn = agg->fn;
        plan.star = agg->star;
        if (!agg->star) plan.agg_index = ctx_.resolve(agg->arg);
        names.push_back(item.alias.empty() ? agg->display : item.alias);
      } else {
        const auto& ref = std::get<ColumnRef>(item.expr);
        plan.is_aggregate = false;
        plan.column_index = ctx_.resolve(ref);
        bool grouped =
            std::any_of(group_indices.begin(), group_indices.end(),
                        [&](int g) { return g == plan.column_index; });
        if (!grouped) {
          fail("column '" + ref.display() +
                   "' must appear in GROUP BY or inside an aggregate",
               ref.pos);
        }
        names.push_back(item.alias.empty() ? ref.column : item.alias);
      }
      plans.push_back(plan);
    }

    struct Group {
      Row representative;
      std::vector<AggregateState> states;
      long long row_count = 0;
    };
    std::map<std::string, Group> groups;
    std::vector<std::string> group_order;

    for (const auto& row : rows) {
      std::string key;
      for (int idx : group_indices) {
        key += value_to_display(row[idx]);
        key += '\x1f';
      }
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) {
        it->second.representative = row;
        it->second.states.resize(plans.size());
        group_order.push_back(key);
      }
      Group& g = it->second;
      ++g.row_count;
      for (std::size_t p = 0; p < plans.size(); ++p) {
        if (plans[p].is_aggregate && !plans[p].star) {
          g.states[p].add(row[plans[p].agg_index]);
        }
      }
    }

    // Aggregates with no GROUP BY collapse everything into one group, even
    // when the input is empty.
    if (group_indices.empty() && groups.empty()) {
      Group g;
      g.states.resize(plans.size());
      g.row_count = 0;
      groups.emplace("", std::move(g));
      group_order.push_back("");
    }

    std::vector<Row> output;
    for (const auto& key : group_order) {
      const Group& g = groups.at(key);
      Row out;
      for (std::size_t p = 0; p < plans.size(); ++p) {
        const ItemPlan& plan = plans[p];
        if (!plan.is_aggregate) {
          out.push_back(g.representative[plan.column_index]);
          continue;
        }
        const AggregateState& st = g.states[p];
        switch (plan.fn) {
          case AggregateFn::kCount:
            out.push_back(plan.star ? g.row_count : st.count);
            break;
          case AggregateFn::kMin:
            out.push_back(st.any ? st.min_value : Value{});
            break;
          case AggregateFn::kMax:
            out.push_back(st.any ? st.max_value : Value{});
            break;
          case AggregateFn::kSum:
            if (!st.any) {
              out.push_back(Value{});
            } else if (st.sum_is_real) {
              out.push_back(st.sum_real);
            } else {
              out.push_back(st.sum_int);
            }
            break;
          case AggregateFn::kAvg:
            if (st.count == 0) {
              out.push_back(Value{});
            } else {
              out.push_back(st.sum_real / static_cast<double>(st.count));
            }
            break;
        }
      }
      output.push_back(std::move(out));
    }
    return output;
  }

  const std::vector<Table>& tables_;
  std::vector<Source> sources_;
  RowContext ctx_;
};

}  // namespace

void Engine::add_table(Table table) { tables_.push_back(std::move(table)); }

const Table* Engine::find_table(const std::string& name) const {
  for (const auto& t : tables_) {
    if (text::iequals(t.name, name)) return &t;
  }
  return nullptr;
}

ExecuteResult Engine::execute(const std::string& query, int row_limit) const {
  try {
    Parser parser(tokenize(query));
    SelectStatement stmt = parser.parse();
    Executor executor(tables_);
    return executor.run(stmt, row_limit);
  } catch (const SqlThrow& e) {
    return e.error;
  }
}

}  // namespace fleetlog::sql
