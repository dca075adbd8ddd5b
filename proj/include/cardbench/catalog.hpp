#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cardbench {

enum class ColumnKind { kCategorical, kContinuous };
enum class KeyRole { kPkFk, kFkFk };

std::string_view column_kind_name(ColumnKind kind);
std::string_view key_role_name(KeyRole role);

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  uint64_t domain_size = 0;  // distinct non-null values
  double min = 0.0;
  double max = 0.0;
  bool has_bounds = false;  // false when the column holds no non-null value
  uint64_t null_count = 0;
};

// Code <-> label mapping for categorical columns. Codes are dense and ordered like the labels:
// numerically when every label parses as a number, lexicographically otherwise.
struct Dictionary {
  std::vector<std::string> labels;
  std::vector<double> numeric;  // parallel to labels when is_numeric
  bool is_numeric = true;

  std::size_t size() const { return labels.size(); }
};

class Column {
 public:
  Column() = default;

  // Numeric ingestion. Categorical columns get a numeric dictionary over the distinct values.
  static Column from_numeric(std::string name, ColumnKind kind, std::span<const std::optional<double>> cells);

  // Text ingestion (CSV). Continuous cells must parse as numbers; the first failing row is reported
  // through ColumnTypeMismatch.
  static Column from_text(std::string name, ColumnKind kind, std::span<const std::optional<std::string>> cells);

  const ColumnMeta& meta() const { return meta_; }
  const std::string& name() const { return meta_.name; }
  ColumnKind kind() const { return meta_.kind; }
  std::size_t size() const { return values_.size(); }

  bool is_null(std::size_t row) const { return !valid_.empty() && valid_[row] == 0; }
  bool has_nulls() const { return meta_.null_count > 0; }

  // Dictionary code for categorical columns, the parsed value for continuous ones.
  double value(std::size_t row) const { return values_[row]; }
  std::span<const double> values() const { return values_; }

  // Value used for equi-join matching; comparable across columns of the same catalog.
  double join_key(std::size_t row) const;

  const Dictionary& dictionary() const { return dictionary_; }

  // Human-readable cell, empty string for null.
  std::string render(std::size_t row) const;
  // Renders a value from the column's value space (a code for categorical columns).
  std::string render_value(double value) const;

 private:
  friend class Catalog;
  void compute_meta();

  ColumnMeta meta_;
  std::vector<double> values_;
  std::vector<uint8_t> valid_;  // empty when the column has no nulls
  Dictionary dictionary_;
  std::vector<double> string_keys_;  // join keys of string-labelled categorical columns
};

class TableData {
 public:
  TableData() = default;
  explicit TableData(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  std::size_t rows() const { return rows_; }
  const std::vector<Column>& columns() const { return columns_; }

  void add_column(Column column);

  bool has_column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;
  const Column& column(std::string_view name) const;

 private:
  friend class Catalog;

  std::string name_;
  std::size_t rows_ = 0;
  std::vector<Column> columns_;
};

struct ColumnRef {
  std::string table;
  std::string column;

  auto operator<=>(const ColumnRef&) const = default;
  std::string str() const { return table + "." + column; }
};

struct JoinEdge {
  ColumnRef left;
  ColumnRef right;
  KeyRole role = KeyRole::kPkFk;

  bool touches(std::string_view table) const { return left.table == table || right.table == table; }
  const ColumnRef& side(std::string_view table) const { return left.table == table ? left : right; }
  const ColumnRef& other_side(std::string_view table) const { return left.table == table ? right : left; }
  const std::string& other_table(std::string_view table) const { return other_side(table).table; }
  bool same_columns(const JoinEdge& other) const;
  std::string str() const;
};

struct JoinGraph {
  std::vector<std::string> nodes;
  std::vector<JoinEdge> edges;

  // Edge joining exactly these two columns, in either orientation.
  std::optional<std::size_t> find_edge(const ColumnRef& a, const ColumnRef& b) const;
};

class Catalog {
 public:
  void add_table(TableData table);
  void add_join(JoinEdge edge);

  const std::map<std::string, TableData>& tables() const { return tables_; }
  const JoinGraph& join_graph() const { return join_graph_; }

  bool has_table(std::string_view name) const;
  const TableData& table(std::string_view name) const;
  const Column& column(const ColumnRef& ref) const;

  // Exact distinct count over non-null values.
  uint64_t column_distinct_count(std::string_view table, std::string_view column) const;

  // True when the column is an endpoint of any join-graph edge.
  bool is_join_column(const ColumnRef& ref) const;

  // Stable 64-bit digest of schema and data; keys caches.
  uint64_t fingerprint() const;

 private:
  std::map<std::string, TableData> tables_;
  std::map<std::string, double, std::less<>> string_ids_;
  JoinGraph join_graph_;
};

// Declarative schema file: `table <name>` blocks of `column <name> <categorical|continuous>` lines and
// `join <t1>.<c1> = <t2>.<c2> [pkfk|fkfk]` lines. `#` starts a comment.
struct SchemaTable {
  std::string name;
  std::vector<std::pair<std::string, ColumnKind>> columns;
};

struct Schema {
  std::vector<SchemaTable> tables;
  std::vector<JoinEdge> joins;
};

Schema parse_schema(std::string_view text);
std::string format_schema(const Schema& schema);
Schema schema_of(const Catalog& catalog);

Catalog load_catalog(const std::filesystem::path& schema_file, const std::filesystem::path& data_dir);

// Writes the schema file plus `<data_dir>/<table>.csv` for every table.
void write_catalog(const Catalog& catalog, const std::filesystem::path& schema_file,
                   const std::filesystem::path& data_dir);

}  // namespace cardbench
