#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "cardbench/catalog.hpp"
#include "cardbench/error.hpp"
#include "cardbench/synthetic.hpp"

namespace cardbench {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cardbench_catalog_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir / "data");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

Column numeric(const std::string& name, std::vector<std::optional<double>> cells) {
  return Column::from_numeric(name, ColumnKind::kContinuous, cells);
}

TEST(CatalogTest, LoadsThreeRowTable) {
  const fs::path dir = scratch_dir("three_rows");
  write_text(dir / "schema.txt", "table a\ncolumn x continuous\ncolumn y continuous\n");
  write_text(dir / "data" / "a.csv", "x,y\n1,5\n2,5\n2,7\n");
  const Catalog catalog = load_catalog(dir / "schema.txt", dir / "data");
  const TableData& a = catalog.table("a");
  EXPECT_EQ(a.rows(), 3u);
  EXPECT_EQ(a.column("x").meta().domain_size, 2u);
  EXPECT_EQ(a.column("y").meta().domain_size, 2u);
  EXPECT_DOUBLE_EQ(a.column("x").meta().min, 1.0);
  EXPECT_DOUBLE_EQ(a.column("x").meta().max, 2.0);
}

TEST(CatalogTest, HeaderOnlyCsvGivesEmptyTableWithoutBounds) {
  const fs::path dir = scratch_dir("empty");
  write_text(dir / "schema.txt", "table a\ncolumn x continuous\n");
  write_text(dir / "data" / "a.csv", "x\n");
  const Catalog catalog = load_catalog(dir / "schema.txt", dir / "data");
  EXPECT_EQ(catalog.table("a").rows(), 0u);
  EXPECT_FALSE(catalog.table("a").column("x").meta().has_bounds);
}

TEST(CatalogTest, MissingTableFileIsReported) {
  const fs::path dir = scratch_dir("missing");
  write_text(dir / "schema.txt", "table a\ncolumn x continuous\n");
  try {
    load_catalog(dir / "schema.txt", dir / "data");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingTableFile);
  }
}

TEST(CatalogTest, NonNumericContinuousCellIsATypeMismatch) {
  const fs::path dir = scratch_dir("mismatch");
  write_text(dir / "schema.txt", "table a\ncolumn x continuous\n");
  write_text(dir / "data" / "a.csv", "x\n1\nabc\n");
  try {
    load_catalog(dir / "schema.txt", dir / "data");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kColumnTypeMismatch);
  }
}

TEST(CatalogTest, DuplicateTableNameIsRejected) {
  Catalog catalog;
  TableData a("a");
  a.add_column(numeric("x", {1.0}));
  catalog.add_table(a);
  try {
    catalog.add_table(a);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateTableName);
  }
}

TEST(CatalogTest, DistinctCountIgnoresNulls) {
  Catalog catalog;
  TableData t("t");
  t.add_column(numeric("a", {1.0, 1.0, 2.0, 3.0}));
  t.add_column(numeric("b", {std::nullopt, std::nullopt, std::nullopt, std::nullopt}));
  catalog.add_table(t);
  EXPECT_EQ(catalog.column_distinct_count("t", "a"), 3u);
  EXPECT_EQ(catalog.column_distinct_count("t", "b"), 0u);
}

TEST(CatalogTest, DistinctCountMatchesSetSize) {
  std::mt19937_64 rng(11);
  std::vector<std::optional<double>> cells;
  std::set<double> seen;
  for (int i = 0; i < 1000; ++i) {
    const double v = static_cast<double>(std::uniform_int_distribution<int>(1, 100)(rng));
    cells.push_back(v);
    seen.insert(v);
  }
  Catalog catalog;
  TableData t("t");
  t.add_column(numeric("x", cells));
  catalog.add_table(t);
  EXPECT_EQ(catalog.column_distinct_count("t", "x"), seen.size());
}

TEST(CatalogTest, CategoricalLabelsGetOrderedCodes) {
  std::vector<std::optional<std::string>> cells{"pear", "apple", std::nullopt, "fig", "apple"};
  const Column c = Column::from_text("fruit", ColumnKind::kCategorical, cells);
  ASSERT_EQ(c.dictionary().size(), 3u);
  EXPECT_EQ(c.dictionary().labels[0], "apple");
  EXPECT_DOUBLE_EQ(c.value(0), 2.0);
  EXPECT_TRUE(c.is_null(2));
  EXPECT_EQ(c.render(3), "fig");
  EXPECT_EQ(c.render(2), "");
}

TEST(CatalogTest, SyntheticCatalogHasEightTablesAndTwelveEdges) {
  const Catalog catalog = make_stats_like_catalog();
  EXPECT_EQ(catalog.tables().size(), 8u);
  EXPECT_EQ(catalog.join_graph().edges.size(), 12u);
  std::size_t fkfk = 0;
  for (const auto& e : catalog.join_graph().edges) fkfk += e.role == KeyRole::kFkFk ? 1 : 0;
  EXPECT_GE(fkfk, 1u);
  for (const auto& [name, table] : catalog.tables()) EXPECT_LE(table.rows(), 10'000u) << name;
}

TEST(CatalogTest, SyntheticCatalogIsSeedDeterministic) {
  EXPECT_EQ(make_stats_like_catalog({.seed = 3}).fingerprint(), make_stats_like_catalog({.seed = 3}).fingerprint());
  EXPECT_NE(make_stats_like_catalog({.seed = 3}).fingerprint(), make_stats_like_catalog({.seed = 4}).fingerprint());
}

TEST(CatalogTest, WriteThenLoadPreservesFingerprint) {
  const fs::path dir = scratch_dir("roundtrip");
  const Catalog catalog = make_stats_like_catalog({.seed = 1, .scale = 0.1});
  write_catalog(catalog, dir / "schema.txt", dir / "data");
  const Catalog loaded = load_catalog(dir / "schema.txt", dir / "data");
  EXPECT_EQ(loaded.fingerprint(), catalog.fingerprint());
}

TEST(CatalogTest, SchemaFormatRoundTrips) {
  const std::string text =
      "table a\ncolumn id continuous\ncolumn kind categorical\n"
      "table b\ncolumn aid continuous\n"
      "join a.id = b.aid pkfk\n";
  const Schema schema = parse_schema(text);
  ASSERT_EQ(schema.tables.size(), 2u);
  ASSERT_EQ(schema.joins.size(), 1u);
  EXPECT_EQ(schema.tables[0].columns[1].second, ColumnKind::kCategorical);
  const Schema again = parse_schema(format_schema(schema));
  EXPECT_EQ(format_schema(again), format_schema(schema));
}

}  // namespace
}  // namespace cardbench
