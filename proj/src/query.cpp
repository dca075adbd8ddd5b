#include "cardbench/query.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "cardbench/error.hpp"
#include "cardbench/text.hpp"

namespace cardbench {

Region Region::interval(Interval iv) {
  if (iv.empty()) return nothing();
  Region r;
  r.is_interval_ = true;
  r.interval_ = iv;
  return r;
}

Region Region::values(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Region r;
  r.values_ = std::move(values);
  return r;
}

bool Region::contains(double v) const {
  if (is_interval_) return interval_.contains(v);
  return std::binary_search(values_.begin(), values_.end(), v);
}

Region Region::intersect(const Region& other) const {
  if (!is_interval_ || !other.is_interval_) {
    const Region& set = is_interval_ ? other : *this;
    const Region& filter = is_interval_ ? *this : other;
    std::vector<double> kept;
    for (const double v : set.values_) {
      if (filter.contains(v)) kept.push_back(v);
    }
    return values(std::move(kept));
  }
  Interval out = interval_;
  const Interval& b = other.interval_;
  if (b.lo > out.lo || (b.lo == out.lo && b.lo_open)) {
    out.lo = b.lo;
    out.lo_open = b.lo_open;
  }
  if (b.hi < out.hi || (b.hi == out.hi && b.hi_open)) {
    out.hi = b.hi;
    out.hi_open = b.hi_open;
  }
  return interval(out);
}

std::size_t Query::table_index(std::string_view table) const {
  const auto it = std::lower_bound(tables.begin(), tables.end(), table);
  if (it == tables.end() || *it != table) fail(ErrorCode::kUnknownTable, std::string(table) + " not in query " + id);
  return static_cast<std::size_t>(it - tables.begin());
}

bool Query::operator==(const Query& other) const {
  if (id != other.id || tables != other.tables || predicates != other.predicates) return false;
  if (join_edges.size() != other.join_edges.size()) return false;
  for (std::size_t i = 0; i < join_edges.size(); ++i) {
    if (join_edges[i].left != other.join_edges[i].left || join_edges[i].right != other.join_edges[i].right ||
        join_edges[i].role != other.join_edges[i].role) {
      return false;
    }
  }
  return true;
}

std::string subplan_key(const std::vector<std::string>& sorted_tables) {
  std::string key;
  for (const auto& t : sorted_tables) {
    if (!key.empty()) key += '|';
    key += t;
  }
  return key;
}

std::string SubPlanQuery::key() const { return subplan_key(tables); }

std::vector<Predicate> SubPlanQuery::predicates_on(std::string_view table) const {
  std::vector<Predicate> out;
  for (const auto& p : predicates) {
    if (p.table == table) out.push_back(p);
  }
  return out;
}

namespace {

enum class TokenKind { kIdent, kNumber, kString, kSymbol, kEnd };

struct Token {
  TokenKind kind;
  std::string text;  // identifiers keep case; keywords are compared case-insensitively
  std::size_t pos;
};

[[noreturn]] void syntax_error(std::size_t pos, const std::string& message) {
  fail(ErrorCode::kSyntaxError, "at position " + std::to_string(pos) + ": " + message);
}

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < sql.size()) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < sql.size() && sql[i + 1] == '-') break;  // trailing comment
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < sql.size() && (std::isalnum(static_cast<unsigned char>(sql[i])) || sql[i] == '_')) ++i;
      tokens.push_back({TokenKind::kIdent, std::string(sql.substr(start, i - start)), start});
      continue;
    }
    const bool sign = (c == '-' || c == '+') && i + 1 < sql.size() &&
                      (std::isdigit(static_cast<unsigned char>(sql[i + 1])) || sql[i + 1] == '.');
    if (std::isdigit(static_cast<unsigned char>(c)) || sign ||
        (c == '.' && i + 1 < sql.size() && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      if (sign) ++i;
      while (i < sql.size() && (std::isdigit(static_cast<unsigned char>(sql[i])) || sql[i] == '.')) ++i;
      if (i < sql.size() && (sql[i] == 'e' || sql[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < sql.size() && (sql[j] == '+' || sql[j] == '-')) ++j;
        if (j < sql.size() && std::isdigit(static_cast<unsigned char>(sql[j]))) {
          i = j;
          while (i < sql.size() && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
        }
      }
      tokens.push_back({TokenKind::kNumber, std::string(sql.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < sql.size()) {
        if (sql[i] == '\'') {
          if (i + 1 < sql.size() && sql[i + 1] == '\'') {
            value.push_back('\'');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        value.push_back(sql[i++]);
      }
      if (!closed) syntax_error(start, "unterminated string literal");
      tokens.push_back({TokenKind::kString, std::move(value), start});
      continue;
    }
    static const char* kTwoChar[] = {"<=", ">=", "<>", "!="};
    bool matched = false;
    for (const char* op : kTwoChar) {
      if (sql.substr(i, 2) == op) {
        tokens.push_back({TokenKind::kSymbol, op, start});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(),.*=<>;").find(c) != std::string_view::npos) {
      tokens.push_back({TokenKind::kSymbol, std::string(1, c), start});
      ++i;
      continue;
    }
    syntax_error(start, std::string("unexpected character '") + c + "'");
  }
  tokens.push_back({TokenKind::kEnd, "", sql.size()});
  return tokens;
}

struct Literal {
  bool is_string = false;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

enum class CompareOp { kEq, kLt, kLe, kGt, kGe };

CompareOp flip(CompareOp op) {
  switch (op) {
    case CompareOp::kLt: return CompareOp::kGt;
    case CompareOp::kLe: return CompareOp::kGe;
    case CompareOp::kGt: return CompareOp::kLt;
    case CompareOp::kGe: return CompareOp::kLe;
    default: return op;
  }
}

class Parser {
 public:
  Parser(std::string_view sql, const Catalog& catalog) : tokens_(tokenize(sql)), catalog_(catalog) {}

  Query parse(std::string id) {
    query_.id = std::move(id);
    expect_keyword("select");
    expect_keyword("count");
    expect_symbol("(");
    expect_symbol("*");
    expect_symbol(")");
    expect_keyword("from");
    parse_table_ref();
    while (accept_symbol(",")) parse_table_ref();
    if (accept_keyword("where")) {
      parse_condition();
      while (true) {
        if (peek_keyword("or")) syntax_error(peek().pos, "disjunctions are not supported");
        if (!accept_keyword("and")) break;
        parse_condition();
      }
    }
    if (peek_keyword("or")) syntax_error(peek().pos, "disjunctions are not supported");
    accept_symbol(";");
    if (peek().kind != TokenKind::kEnd) syntax_error(peek().pos, "unexpected '" + peek().text + "'");
    return finish();
  }

 private:
  const Token& peek() const { return tokens_[cursor_]; }
  const Token& next() { return tokens_[cursor_ < tokens_.size() - 1 ? cursor_++ : cursor_]; }

  bool peek_keyword(std::string_view kw) const {
    return peek().kind == TokenKind::kIdent && to_lower(peek().text) == kw;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    ++cursor_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) syntax_error(peek().pos, "expected " + to_upper(kw));
  }
  bool accept_symbol(std::string_view sym) {
    if (peek().kind != TokenKind::kSymbol || peek().text != sym) return false;
    ++cursor_;
    return true;
  }
  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) syntax_error(peek().pos, "expected '" + std::string(sym) + "'");
  }
  static std::string to_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  static bool is_reserved(std::string_view word) {
    static const std::set<std::string, std::less<>> kReserved = {"select", "count", "from", "where", "and",
                                                                 "or", "in", "between", "as", "not"};
    return kReserved.count(to_lower(word)) > 0;
  }

  void parse_table_ref() {
    const Token& t = next();
    if (t.kind != TokenKind::kIdent || is_reserved(t.text)) syntax_error(t.pos, "expected table name");
    if (!catalog_.has_table(t.text)) {
      fail(ErrorCode::kUnknownTable, "'" + t.text + "' at position " + std::to_string(t.pos));
    }
    if (std::find(query_.tables.begin(), query_.tables.end(), t.text) != query_.tables.end()) {
      syntax_error(t.pos, "table '" + t.text + "' listed twice (self-joins are not supported)");
    }
    query_.tables.push_back(t.text);
    bind_name(t.text, t.text, t.pos);
    accept_keyword("as");
    if (peek().kind == TokenKind::kIdent && !is_reserved(peek().text)) {
      const Token& alias = next();
      bind_name(alias.text, t.text, alias.pos);
    }
  }

  void bind_name(const std::string& name, const std::string& table, std::size_t pos) {
    auto [it, inserted] = names_.emplace(name, table);
    if (!inserted && it->second != table) syntax_error(pos, "name '" + name + "' bound twice");
  }

  ColumnRef parse_column_ref() {
    const Token& first = next();
    if (first.kind != TokenKind::kIdent || is_reserved(first.text)) syntax_error(first.pos, "expected column");
    if (accept_symbol(".")) {
      const Token& col = next();
      if (col.kind != TokenKind::kIdent) syntax_error(col.pos, "expected column name after '.'");
      auto it = names_.find(first.text);
      if (it == names_.end()) {
        fail(ErrorCode::kUnknownTable, "'" + first.text + "' at position " + std::to_string(first.pos));
      }
      if (!catalog_.table(it->second).has_column(col.text)) {
        fail(ErrorCode::kUnknownColumn, it->second + "." + col.text + " at position " + std::to_string(col.pos));
      }
      return {it->second, col.text};
    }
    std::optional<ColumnRef> found;
    for (const auto& table : query_.tables) {
      if (!catalog_.table(table).has_column(first.text)) continue;
      if (found) syntax_error(first.pos, "ambiguous column '" + first.text + "'");
      found = ColumnRef{table, first.text};
    }
    if (!found) fail(ErrorCode::kUnknownColumn, "'" + first.text + "' at position " + std::to_string(first.pos));
    return *found;
  }

  bool peek_column() const {
    return peek().kind == TokenKind::kIdent && !is_reserved(peek().text);
  }

  Literal parse_literal() {
    const Token& t = next();
    if (t.kind == TokenKind::kNumber) {
      auto value = parse_number(t.text);
      if (!value) syntax_error(t.pos, "malformed number '" + t.text + "'");
      return Literal{false, *value, t.text, t.pos};
    }
    if (t.kind == TokenKind::kString) return Literal{true, 0.0, t.text, t.pos};
    syntax_error(t.pos, "expected literal");
  }

  std::optional<CompareOp> parse_compare_op() {
    const Token& t = peek();
    if (t.kind != TokenKind::kSymbol) return std::nullopt;
    if (t.text == "<>" || t.text == "!=") syntax_error(t.pos, "inequality predicates are not supported");
    std::optional<CompareOp> op;
    if (t.text == "=") op = CompareOp::kEq;
    if (t.text == "<") op = CompareOp::kLt;
    if (t.text == "<=") op = CompareOp::kLe;
    if (t.text == ">") op = CompareOp::kGt;
    if (t.text == ">=") op = CompareOp::kGe;
    if (op) ++cursor_;
    return op;
  }

  void parse_condition() {
    if (peek_keyword("not")) syntax_error(peek().pos, "negation is not supported");
    if (accept_symbol("(")) syntax_error(tokens_[cursor_ - 1].pos, "parenthesized conditions are not supported");
    if (!peek_column()) {
      // literal <op> column
      const Literal lit = parse_literal();
      const std::size_t op_pos = peek().pos;
      auto op = parse_compare_op();
      if (!op) syntax_error(op_pos, "expected comparison operator");
      const ColumnRef col = parse_column_ref();
      add_comparison(col, flip(*op), lit);
      return;
    }
    const ColumnRef col = parse_column_ref();
    if (accept_keyword("in")) {
      expect_symbol("(");
      std::vector<Literal> items;
      if (!accept_symbol(")")) {
        items.push_back(parse_literal());
        while (accept_symbol(",")) items.push_back(parse_literal());
        expect_symbol(")");
      }
      add_region(col, value_set_region(col, items));
      return;
    }
    if (accept_keyword("between")) {
      const Literal lo = parse_literal();
      expect_keyword("and");
      const Literal hi = parse_literal();
      add_comparison(col, CompareOp::kGe, lo);
      add_comparison(col, CompareOp::kLe, hi);
      return;
    }
    const std::size_t op_pos = peek().pos;
    auto op = parse_compare_op();
    if (!op) syntax_error(op_pos, "expected comparison operator, IN, or BETWEEN");
    if (peek_column()) {
      const ColumnRef other = parse_column_ref();
      if (*op != CompareOp::kEq) {
        fail(ErrorCode::kNonEquiJoin, col.str() + " vs " + other.str() + " at position " + std::to_string(op_pos));
      }
      add_join(col, other, op_pos);
      return;
    }
    add_comparison(col, *op, parse_literal());
  }

  void add_join(const ColumnRef& a, const ColumnRef& b, std::size_t pos) {
    if (a.table == b.table) syntax_error(pos, "column comparison within one table is not supported");
    const auto index = catalog_.join_graph().find_edge(a, b);
    if (!index) {
      fail(ErrorCode::kUnknownJoinEdge, a.str() + " = " + b.str() + " is not a join-graph edge (position " +
                                            std::to_string(pos) + ")");
    }
    edge_indices_.insert(*index);
  }

  // Position of a literal within the dictionary order of a categorical column.
  static bool label_less(const Dictionary& dict, std::size_t code, const Literal& lit) {
    return dict.is_numeric ? dict.numeric[code] < lit.number : dict.labels[code] < lit.text;
  }
  static bool label_equal(const Dictionary& dict, std::size_t code, const Literal& lit) {
    return dict.is_numeric ? dict.numeric[code] == lit.number : dict.labels[code] == lit.text;
  }

  void check_literal(const ColumnRef& ref, const Column& column, const Literal& lit) const {
    const bool wants_string = column.kind() == ColumnKind::kCategorical && !column.dictionary().is_numeric;
    if (lit.is_string != wants_string) {
      fail(ErrorCode::kColumnTypeMismatch, "literal at position " + std::to_string(lit.pos) + " does not match " +
                                               ref.str() + (wants_string ? " (text labels)" : " (numeric)"));
    }
  }

  Region value_set_region(const ColumnRef& ref, const std::vector<Literal>& items) const {
    const Column& column = catalog_.column(ref);
    std::vector<double> values;
    for (const auto& lit : items) {
      check_literal(ref, column, lit);
      if (column.kind() == ColumnKind::kContinuous) {
        values.push_back(lit.number);
        continue;
      }
      if (auto code = find_code(column.dictionary(), lit)) values.push_back(*code);
    }
    return Region::values(std::move(values));
  }

  static std::optional<double> find_code(const Dictionary& dict, const Literal& lit) {
    std::size_t lo = 0;
    std::size_t hi = dict.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (label_less(dict, mid, lit)) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo < dict.size() && label_equal(dict, lo, lit)) return static_cast<double>(lo);
    return std::nullopt;
  }

  void add_comparison(const ColumnRef& ref, CompareOp op, const Literal& lit) {
    const Column& column = catalog_.column(ref);
    check_literal(ref, column, lit);
    const auto& meta = column.meta();
    constexpr double kInf = std::numeric_limits<double>::infinity();

    if (column.kind() == ColumnKind::kContinuous) {
      const double lo_clamp = meta.has_bounds ? meta.min : -kInf;
      const double hi_clamp = meta.has_bounds ? meta.max : kInf;
      const double v = lit.number;
      Interval iv;
      switch (op) {
        case CompareOp::kEq: iv = {v, v, false, false}; break;
        case CompareOp::kLt: iv = {lo_clamp, v, false, true}; break;
        case CompareOp::kLe: iv = {lo_clamp, v, false, false}; break;
        case CompareOp::kGt: iv = {v, hi_clamp, true, false}; break;
        case CompareOp::kGe: iv = {v, hi_clamp, false, false}; break;
      }
      add_region(ref, Region::interval(iv));
      return;
    }

    // Categorical: translate to a closed code range.
    const Dictionary& dict = column.dictionary();
    const auto n = static_cast<double>(dict.size());
    std::size_t lower = 0;  // first code >= literal
    while (lower < dict.size() && label_less(dict, lower, lit)) ++lower;
    std::size_t upper = lower;  // first code > literal
    while (upper < dict.size() && label_equal(dict, upper, lit)) ++upper;
    double lo = 0.0;
    double hi = n - 1.0;
    switch (op) {
      case CompareOp::kEq: {
        auto code = find_code(dict, lit);
        add_region(ref, code ? Region::values({*code}) : Region::nothing());
        return;
      }
      case CompareOp::kLt: hi = static_cast<double>(lower) - 1.0; break;
      case CompareOp::kLe: hi = static_cast<double>(upper) - 1.0; break;
      case CompareOp::kGt: lo = static_cast<double>(upper); break;
      case CompareOp::kGe: lo = static_cast<double>(lower); break;
    }
    add_region(ref, Region::interval({lo, hi, false, false}));
  }

  void add_region(const ColumnRef& ref, Region region) {
    auto [it, inserted] = regions_.emplace(ref, region);
    if (!inserted) it->second = it->second.intersect(region);
  }

  Query finish() {
    std::sort(query_.tables.begin(), query_.tables.end());
    for (const auto index : edge_indices_) query_.join_edges.push_back(catalog_.join_graph().edges[index]);
    std::sort(query_.join_edges.begin(), query_.join_edges.end(),
              [](const JoinEdge& a, const JoinEdge& b) { return a.str() < b.str(); });
    for (const auto& [ref, region] : regions_) {
      query_.predicates.push_back(Predicate{ref.table, ref.column, region});
    }
    const auto n = query_.tables.size();
    if (n > 31) fail(ErrorCode::kResourceLimit, "queries are limited to 31 tables");
    if (query_.join_edges.size() > n - 1) {
      fail(ErrorCode::kCyclicJoinGraph, "query " + query_.id + " has " + std::to_string(query_.join_edges.size()) +
                                            " join edges over " + std::to_string(n) + " tables");
    }
    const TableMask all = n == 32 ? ~TableMask{0} : (TableMask{1} << n) - 1;
    if (!is_connected(query_, all)) {
      fail(ErrorCode::kDisconnectedJoinGraph, "query " + query_.id + " has tables without a join path");
    }
    return std::move(query_);
  }

  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
  const Catalog& catalog_;
  Query query_;
  std::map<std::string, std::string> names_;
  std::set<std::size_t> edge_indices_;
  std::map<ColumnRef, Region> regions_;
};

std::string literal_text(const Column& column, double value) {
  if (column.kind() == ColumnKind::kCategorical && !column.dictionary().is_numeric) {
    std::string out = "'";
    for (const char c : column.render_value(value)) {
      if (c == '\'') out.push_back('\'');
      out.push_back(c);
    }
    return out + "'";
  }
  return column.render_value(value);
}

}  // namespace

Query parse_query(std::string_view sql, const Catalog& catalog, std::string id) {
  return Parser(sql, catalog).parse(std::move(id));
}

std::string to_sql(const Query& query, const Catalog& catalog) {
  std::string sql = "SELECT COUNT(*) FROM ";
  for (std::size_t i = 0; i < query.tables.size(); ++i) sql += (i ? ", " : "") + query.tables[i];
  std::vector<std::string> conditions;
  for (const auto& edge : query.join_edges) conditions.push_back(edge.str());
  for (const auto& p : query.predicates) {
    const Column& column = catalog.table(p.table).column(p.column);
    const std::string name = p.table + "." + p.column;
    if (!p.region.is_interval()) {
      std::string list;
      for (const double v : p.region.value_set()) list += (list.empty() ? "" : ", ") + literal_text(column, v);
      conditions.push_back(name + " IN (" + list + ")");
      continue;
    }
    const Interval& iv = p.region.bounds();
    if (iv.lo == iv.hi && !iv.lo_open && !iv.hi_open && column.kind() == ColumnKind::kContinuous) {
      conditions.push_back(name + " = " + literal_text(column, iv.lo));
      continue;
    }
    if (std::isfinite(iv.lo)) conditions.push_back(name + (iv.lo_open ? " > " : " >= ") + literal_text(column, iv.lo));
    if (std::isfinite(iv.hi)) conditions.push_back(name + (iv.hi_open ? " < " : " <= ") + literal_text(column, iv.hi));
  }
  for (std::size_t i = 0; i < conditions.size(); ++i) sql += (i ? " AND " : " WHERE ") + conditions[i];
  return sql + ";";
}

bool is_connected(const Query& query, TableMask mask) {
  if (mask == 0) return false;
  TableMask reached = mask & (~mask + 1);  // lowest set bit
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& edge : query.join_edges) {
      const TableMask a = TableMask{1} << query.table_index(edge.left.table);
      const TableMask b = TableMask{1} << query.table_index(edge.right.table);
      if (!(mask & a) || !(mask & b)) continue;
      if (((reached & a) != 0) != ((reached & b) != 0)) {
        reached |= a | b;
        grew = true;
      }
    }
  }
  return reached == mask;
}

SubPlanQuery make_subplan(const Query& query, TableMask mask) {
  SubPlanQuery sub;
  sub.parent = query.id;
  sub.mask = mask;
  for (std::size_t i = 0; i < query.tables.size(); ++i) {
    if (mask & (TableMask{1} << i)) sub.tables.push_back(query.tables[i]);
  }
  auto inside = [&](const std::string& t) { return std::binary_search(sub.tables.begin(), sub.tables.end(), t); };
  for (const auto& edge : query.join_edges) {
    if (inside(edge.left.table) && inside(edge.right.table)) sub.join_edges.push_back(edge);
  }
  for (const auto& p : query.predicates) {
    if (inside(p.table)) sub.predicates.push_back(p);
  }
  return sub;
}

SubPlanSpace enumerate_subplans(const Query& query) {
  const std::size_t n = query.tables.size();
  std::vector<TableMask> neighbours(n, 0);
  for (const auto& edge : query.join_edges) {
    const auto a = query.table_index(edge.left.table);
    const auto b = query.table_index(edge.right.table);
    neighbours[a] |= TableMask{1} << b;
    neighbours[b] |= TableMask{1} << a;
  }
  // Grow connected sets one neighbour at a time, starting from every single table.
  std::set<TableMask> seen;
  std::vector<TableMask> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    seen.insert(TableMask{1} << i);
    frontier.push_back(TableMask{1} << i);
  }
  while (!frontier.empty()) {
    std::vector<TableMask> next;
    for (const TableMask set : frontier) {
      TableMask adjacent = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (set & (TableMask{1} << i)) adjacent |= neighbours[i];
      }
      adjacent &= ~set;
      for (std::size_t i = 0; i < n; ++i) {
        const TableMask bit = TableMask{1} << i;
        if ((adjacent & bit) && seen.insert(set | bit).second) next.push_back(set | bit);
      }
    }
    frontier = std::move(next);
  }

  SubPlanSpace space;
  space.parent = query.id;
  for (const TableMask mask : seen) space.entries.push_back(make_subplan(query, mask));
  std::sort(space.entries.begin(), space.entries.end(), [](const SubPlanQuery& a, const SubPlanQuery& b) {
    if (a.tables.size() != b.tables.size()) return a.tables.size() < b.tables.size();
    return a.tables < b.tables;
  });
  return space;
}

std::vector<WorkloadEntry> parse_workload(std::string_view text) {
  std::vector<WorkloadEntry> entries;
  std::optional<std::string> pending_name;
  std::set<std::string> ids;
  auto name_from_comment = [](std::string_view comment) -> std::optional<std::string> {
    comment = trim(comment.substr(2));
    if (comment.substr(0, 5) != "name:") return std::nullopt;
    return std::string(trim(comment.substr(5)));
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    // A `--` outside a string literal starts the comment.
    std::size_t comment_at = std::string_view::npos;
    bool in_string = false;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      if (line[i] == '\'') in_string = !in_string;
      if (!in_string && line[i] == '-' && line[i + 1] == '-') {
        comment_at = i;
        break;
      }
    }
    const std::string_view statement = trim(line.substr(0, comment_at));
    std::optional<std::string> name;
    if (comment_at != std::string_view::npos) name = name_from_comment(line.substr(comment_at));
    if (statement.empty()) {
      if (name) pending_name = name;
      continue;
    }
    WorkloadEntry entry;
    entry.sql = std::string(statement);
    if (name) {
      entry.id = *name;
    } else if (pending_name) {
      entry.id = *pending_name;
    } else {
      entry.id = "q" + std::to_string(entries.size() + 1);
    }
    pending_name.reset();
    if (!ids.insert(entry.id).second) fail(ErrorCode::kSyntaxError, "duplicate query name '" + entry.id + "'");
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string format_workload(const std::vector<WorkloadEntry>& entries) {
  std::string out;
  for (const auto& e : entries) out += e.sql + " -- name:" + e.id + "\n";
  return out;
}

}  // namespace cardbench
