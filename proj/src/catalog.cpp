#include "cardbench/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "cardbench/csv.hpp"
#include "cardbench/error.hpp"
#include "cardbench/hash.hpp"
#include "cardbench/text.hpp"

namespace cardbench {

std::string_view column_kind_name(ColumnKind kind) {
  return kind == ColumnKind::kCategorical ? "categorical" : "continuous";
}

std::string_view key_role_name(KeyRole role) { return role == KeyRole::kPkFk ? "pkfk" : "fkfk"; }

namespace {

Dictionary numeric_dictionary(std::vector<double> distinct) {
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Dictionary dict;
  dict.is_numeric = true;
  dict.numeric = distinct;
  dict.labels.reserve(distinct.size());
  for (const double v : distinct) dict.labels.push_back(format_number(v));
  return dict;
}

double code_of(const std::vector<double>& sorted, double v) {
  return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

}  // namespace

Column Column::from_numeric(std::string name, ColumnKind kind, std::span<const std::optional<double>> cells) {
  Column col;
  col.meta_.name = std::move(name);
  col.meta_.kind = kind;
  col.values_.assign(cells.size(), 0.0);
  const bool any_null = std::any_of(cells.begin(), cells.end(), [](const auto& c) { return !c.has_value(); });
  if (any_null) col.valid_.assign(cells.size(), 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) {
      col.valid_[i] = 0;
    } else {
      col.values_[i] = *cells[i] == 0.0 ? 0.0 : *cells[i];
    }
  }
  if (kind == ColumnKind::kCategorical) {
    std::vector<double> present;
    present.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i]) present.push_back(col.values_[i]);
    }
    col.dictionary_ = numeric_dictionary(std::move(present));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i]) col.values_[i] = code_of(col.dictionary_.numeric, col.values_[i]);
    }
  }
  col.compute_meta();
  return col;
}

Column Column::from_text(std::string name, ColumnKind kind, std::span<const std::optional<std::string>> cells) {
  if (kind == ColumnKind::kContinuous) {
    std::vector<std::optional<double>> numbers(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i]) continue;
      auto parsed = parse_number(*cells[i]);
      if (!parsed) {
        fail(ErrorCode::kColumnTypeMismatch, "column '" + name + "' row " + std::to_string(i) +
                                                 ": '" + *cells[i] + "' is not numeric");
      }
      numbers[i] = *parsed;
    }
    return from_numeric(std::move(name), kind, numbers);
  }

  // Categorical: numeric dictionary when every label is a number, otherwise a string dictionary.
  bool all_numeric = true;
  std::vector<std::optional<double>> numbers(cells.size());
  for (std::size_t i = 0; i < cells.size() && all_numeric; ++i) {
    if (!cells[i]) continue;
    numbers[i] = parse_number(*cells[i]);
    if (!numbers[i]) all_numeric = false;
  }
  if (all_numeric) return from_numeric(std::move(name), kind, numbers);

  Column col;
  col.meta_.name = std::move(name);
  col.meta_.kind = kind;
  col.values_.assign(cells.size(), 0.0);
  std::set<std::string> distinct;
  for (const auto& cell : cells) {
    if (cell) distinct.insert(*cell);
  }
  col.dictionary_.is_numeric = false;
  col.dictionary_.labels.assign(distinct.begin(), distinct.end());
  std::unordered_map<std::string_view, double> codes;
  for (std::size_t i = 0; i < col.dictionary_.labels.size(); ++i) {
    codes.emplace(col.dictionary_.labels[i], static_cast<double>(i));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) {
      if (col.valid_.empty()) col.valid_.assign(cells.size(), 1);
      col.valid_[i] = 0;
    } else {
      col.values_[i] = codes.at(*cells[i]);
    }
  }
  col.compute_meta();
  return col;
}

void Column::compute_meta() {
  meta_.null_count = 0;
  meta_.has_bounds = false;
  meta_.min = 0.0;
  meta_.max = 0.0;
  std::vector<double> present;
  present.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (is_null(i)) {
      ++meta_.null_count;
      continue;
    }
    present.push_back(values_[i]);
  }
  if (meta_.null_count == 0) valid_.clear();
  if (!present.empty()) {
    const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
    meta_.min = *lo;
    meta_.max = *hi;
    meta_.has_bounds = true;
  }
  std::sort(present.begin(), present.end());
  meta_.domain_size = static_cast<uint64_t>(std::unique(present.begin(), present.end()) - present.begin());
}

double Column::join_key(std::size_t row) const {
  if (meta_.kind == ColumnKind::kContinuous) return values_[row];
  if (dictionary_.is_numeric) return dictionary_.numeric[static_cast<std::size_t>(values_[row])];
  return string_keys_[row];
}

std::string Column::render(std::size_t row) const {
  if (is_null(row)) return {};
  return render_value(values_[row]);
}

std::string Column::render_value(double value) const {
  if (meta_.kind == ColumnKind::kContinuous) return format_number(value);
  const auto code = static_cast<std::size_t>(value);
  if (value < 0 || code >= dictionary_.size() || static_cast<double>(code) != value) return format_number(value);
  return dictionary_.labels[code];
}

void TableData::add_column(Column column) {
  if (has_column(column.name())) fail(ErrorCode::kSchema, "duplicate column '" + column.name() + "' in " + name_);
  if (!columns_.empty() && column.size() != rows_) {
    fail(ErrorCode::kSchema, "column '" + column.name() + "' has " + std::to_string(column.size()) +
                                 " rows, table " + name_ + " has " + std::to_string(rows_));
  }
  rows_ = column.size();
  columns_.push_back(std::move(column));
}

bool TableData::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name() == name; });
}

std::size_t TableData::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name() == name) return i;
  }
  fail(ErrorCode::kUnknownColumn, name_ + "." + std::string(name));
}

const Column& TableData::column(std::string_view name) const { return columns_[column_index(name)]; }

bool JoinEdge::same_columns(const JoinEdge& other) const {
  return (left == other.left && right == other.right) || (left == other.right && right == other.left);
}

std::string JoinEdge::str() const { return left.str() + " = " + right.str(); }

std::optional<std::size_t> JoinGraph::find_edge(const ColumnRef& a, const ColumnRef& b) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if ((edges[i].left == a && edges[i].right == b) || (edges[i].left == b && edges[i].right == a)) return i;
  }
  return std::nullopt;
}

void Catalog::add_table(TableData table) {
  if (tables_.count(table.name())) fail(ErrorCode::kDuplicateTableName, table.name());
  for (auto& column : table.columns_) {
    if (column.kind() != ColumnKind::kCategorical || column.dictionary_.is_numeric) continue;
    // Interned ids make string keys comparable across tables.
    std::vector<double> label_ids(column.dictionary_.size());
    for (std::size_t code = 0; code < label_ids.size(); ++code) {
      const auto& label = column.dictionary_.labels[code];
      auto it = string_ids_.find(label);
      if (it == string_ids_.end()) it = string_ids_.emplace(label, static_cast<double>(string_ids_.size())).first;
      label_ids[code] = it->second;
    }
    column.string_keys_.assign(column.size(), 0.0);
    for (std::size_t row = 0; row < column.size(); ++row) {
      if (!column.is_null(row)) column.string_keys_[row] = label_ids[static_cast<std::size_t>(column.values_[row])];
    }
  }
  join_graph_.nodes.push_back(table.name());
  tables_.emplace(table.name(), std::move(table));
}

void Catalog::add_join(JoinEdge edge) {
  column(edge.left);
  column(edge.right);
  if (edge.left.table == edge.right.table) fail(ErrorCode::kSchema, "self-referencing join edge " + edge.str());
  for (const auto& existing : join_graph_.edges) {
    if (existing.same_columns(edge)) fail(ErrorCode::kSchema, "duplicate join edge " + edge.str());
  }
  join_graph_.edges.push_back(std::move(edge));
}

bool Catalog::has_table(std::string_view name) const { return tables_.find(std::string(name)) != tables_.end(); }

const TableData& Catalog::table(std::string_view name) const {
  auto it = tables_.find(std::string(name));
  if (it == tables_.end()) fail(ErrorCode::kUnknownTable, std::string(name));
  return it->second;
}

const Column& Catalog::column(const ColumnRef& ref) const { return table(ref.table).column(ref.column); }

uint64_t Catalog::column_distinct_count(std::string_view table_name, std::string_view column_name) const {
  return table(table_name).column(column_name).meta().domain_size;
}

bool Catalog::is_join_column(const ColumnRef& ref) const {
  return std::any_of(join_graph_.edges.begin(), join_graph_.edges.end(),
                     [&](const JoinEdge& e) { return e.left == ref || e.right == ref; });
}

uint64_t Catalog::fingerprint() const {
  Fnv1a h;
  for (const auto& [name, table] : tables_) {
    h.add(name);
    h.add_u64(table.rows());
    for (const auto& column : table.columns()) {
      h.add(column.name());
      h.add_u64(static_cast<uint64_t>(column.kind()));
      for (const auto& label : column.dictionary().labels) h.add(label);
      for (std::size_t row = 0; row < column.size(); ++row) {
        h.add_u64(column.is_null(row) ? 1 : 0);
        h.add_double(column.value(row));
      }
    }
  }
  for (const auto& edge : join_graph_.edges) {
    h.add(edge.str());
    h.add_u64(static_cast<uint64_t>(edge.role));
  }
  return h.digest();
}

namespace {

[[noreturn]] void schema_error(std::size_t line, const std::string& message) {
  fail(ErrorCode::kSchema, "line " + std::to_string(line) + ": " + message);
}

ColumnRef parse_column_ref(std::string_view word, std::size_t line) {
  const auto dot = word.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == word.size()) {
    schema_error(line, "expected <table>.<column>, got '" + std::string(word) + "'");
  }
  return ColumnRef{std::string(word.substr(0, dot)), std::string(word.substr(dot + 1))};
}

}  // namespace

Schema parse_schema(std::string_view text) {
  Schema schema;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto words = split_words(line);
    if (words.empty()) continue;
    const auto keyword = to_lower(words[0]);
    if (keyword == "table") {
      if (words.size() != 2) schema_error(line_no, "expected `table <name>`");
      const std::string name(words[1]);
      for (const auto& t : schema.tables) {
        if (t.name == name) fail(ErrorCode::kDuplicateTableName, name);
      }
      schema.tables.push_back(SchemaTable{name, {}});
    } else if (keyword == "column") {
      if (schema.tables.empty()) schema_error(line_no, "column outside of a table block");
      if (words.size() != 3) schema_error(line_no, "expected `column <name> <categorical|continuous>`");
      const auto kind_word = to_lower(words[2]);
      ColumnKind kind;
      if (kind_word == "categorical") {
        kind = ColumnKind::kCategorical;
      } else if (kind_word == "continuous") {
        kind = ColumnKind::kContinuous;
      } else {
        schema_error(line_no, "unknown column kind '" + std::string(words[2]) + "'");
      }
      auto& table = schema.tables.back();
      for (const auto& [existing, _] : table.columns) {
        if (existing == words[1]) schema_error(line_no, "duplicate column '" + std::string(words[1]) + "'");
      }
      table.columns.emplace_back(std::string(words[1]), kind);
    } else if (keyword == "join") {
      if ((words.size() != 4 && words.size() != 5) || words[2] != "=") {
        schema_error(line_no, "expected `join <t1>.<c1> = <t2>.<c2> [pkfk|fkfk]`");
      }
      JoinEdge edge{parse_column_ref(words[1], line_no), parse_column_ref(words[3], line_no), KeyRole::kPkFk};
      if (words.size() == 5) {
        const auto role = to_lower(words[4]);
        if (role == "pkfk") {
          edge.role = KeyRole::kPkFk;
        } else if (role == "fkfk") {
          edge.role = KeyRole::kFkFk;
        } else {
          schema_error(line_no, "unknown key role '" + std::string(words[4]) + "'");
        }
      }
      schema.joins.push_back(std::move(edge));
    } else {
      schema_error(line_no, "unknown directive '" + std::string(words[0]) + "'");
    }
  }
  return schema;
}

std::string format_schema(const Schema& schema) {
  std::string out;
  for (const auto& table : schema.tables) {
    out += "table " + table.name + "\n";
    for (const auto& [name, kind] : table.columns) {
      out += "  column " + name + " " + std::string(column_kind_name(kind)) + "\n";
    }
    out += "\n";
  }
  for (const auto& edge : schema.joins) {
    out += "join " + edge.str() + " " + std::string(key_role_name(edge.role)) + "\n";
  }
  return out;
}

Schema schema_of(const Catalog& catalog) {
  Schema schema;
  for (const auto& node : catalog.join_graph().nodes) {
    const auto& table = catalog.table(node);
    SchemaTable st{table.name(), {}};
    for (const auto& column : table.columns()) st.columns.emplace_back(column.name(), column.kind());
    schema.tables.push_back(std::move(st));
  }
  schema.joins = catalog.join_graph().edges;
  return schema;
}

Catalog load_catalog(const std::filesystem::path& schema_file, const std::filesystem::path& data_dir) {
  const Schema schema = parse_schema(read_file(schema_file.string()));
  Catalog catalog;
  for (const auto& spec : schema.tables) {
    const auto csv_path = data_dir / (spec.name + ".csv");
    if (!std::filesystem::exists(csv_path)) fail(ErrorCode::kMissingTableFile, csv_path.string());
    auto rows = parse_csv(read_file(csv_path.string()));
    if (rows.empty()) fail(ErrorCode::kSchema, csv_path.string() + ": missing header row");
    const CsvRow header = std::move(rows.front());
    rows.erase(rows.begin());

    TableData table(spec.name);
    for (const auto& [column_name, kind] : spec.columns) {
      std::optional<std::size_t> index;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] && trim(*header[i]) == column_name) index = i;
      }
      if (!index) fail(ErrorCode::kSchema, csv_path.string() + ": header lacks column '" + column_name + "'");
      std::vector<std::optional<std::string>> cells;
      cells.reserve(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
          fail(ErrorCode::kSchema, csv_path.string() + ": row " + std::to_string(r) + " has " +
                                       std::to_string(rows[r].size()) + " fields, header has " +
                                       std::to_string(header.size()));
        }
        cells.push_back(rows[r][*index]);
      }
      try {
        table.add_column(Column::from_text(column_name, kind, cells));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kColumnTypeMismatch) throw;
        fail(ErrorCode::kColumnTypeMismatch, spec.name + ": " + e.message());
      }
    }
    catalog.add_table(std::move(table));
  }
  for (const auto& edge : schema.joins) catalog.add_join(edge);
  return catalog;
}

void write_catalog(const Catalog& catalog, const std::filesystem::path& schema_file,
                   const std::filesystem::path& data_dir) {
  std::filesystem::create_directories(data_dir);
  if (schema_file.has_parent_path()) std::filesystem::create_directories(schema_file.parent_path());
  {
    std::ofstream out(schema_file);
    if (!out) fail(ErrorCode::kIo, "cannot write " + schema_file.string());
    out << format_schema(schema_of(catalog));
  }
  for (const auto& [name, table] : catalog.tables()) {
    std::ofstream out(data_dir / (name + ".csv"));
    if (!out) fail(ErrorCode::kIo, "cannot write table " + name);
    for (std::size_t c = 0; c < table.columns().size(); ++c) {
      out << (c ? "," : "") << csv_field(table.columns()[c].name());
    }
    out << "\n";
    for (std::size_t row = 0; row < table.rows(); ++row) {
      for (std::size_t c = 0; c < table.columns().size(); ++c) {
        const auto& column = table.columns()[c];
        if (c) out << ",";
        if (!column.is_null(row)) {
          const auto cell = column.render(row);
          // A quoted empty string stays distinguishable from null.
          out << (cell.empty() ? std::string("\"\"") : csv_field(cell));
        }
      }
      out << "\n";
    }
  }
}

}  // namespace cardbench
