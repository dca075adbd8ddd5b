#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cardbench/catalog.hpp"
#include "cardbench/query.hpp"

namespace cardbench {

// Sub-plan key -> cardinality for one parent query (true counts or one estimator's output).
struct CardinalityMap {
  std::string parent;
  std::string provenance = "true";  // "true" or "estimated(<method>)"
  std::map<std::string, double> values;

  bool contains(const std::string& key) const { return values.count(key) > 0; }
  // Throws IncompleteCardinalityMap when the key is missing.
  double at(const std::string& key) const;
  bool is_true() const { return provenance == "true"; }
};

// Row-level test for one table: every predicate holds and each listed column is non-null.
class RowFilter {
 public:
  RowFilter(const TableData& table, std::span<const Predicate> predicates,
            std::span<const std::string> non_null_columns = {});
  // Predicates and non-null join columns of one sub-plan table.
  RowFilter(const Catalog& catalog, const SubPlanQuery& subplan, const std::string& table);

  bool matches(std::size_t row) const {
    for (const auto& [column, region] : checks_) {
      // Nulls never satisfy a predicate.
      if (column->is_null(row) || !region.contains(column->value(row))) return false;
    }
    for (const Column* key : keys_) {
      if (key->is_null(row)) return false;
    }
    return true;
  }

 private:
  std::vector<std::pair<const Column*, Region>> checks_;
  std::vector<const Column*> keys_;
};

// Rows of `table` that satisfy every predicate on it and are non-null in each `non_null` column.
std::vector<uint32_t> filter_table(const Catalog& catalog, const std::string& table,
                                   std::span<const Predicate> predicates,
                                   std::span<const std::string> non_null_columns = {});

// Filtered rows of one sub-plan table: its predicates plus non-null join columns of induced edges.
std::vector<uint32_t> filter_subplan_table(const Catalog& catalog, const SubPlanQuery& subplan,
                                           const std::string& table);

struct OracleOptions {
  // Cap on materialized intermediate groups; beyond it the instance is not desk scale.
  uint64_t max_intermediate_rows = 100'000'000;
  std::size_t workers = 1;
};

// Exact Card(T, Q): filters every table, then hash-joins along a greedy smallest-first spanning
// order. Intermediates keep only the join keys still needed, with multiplicities.
uint64_t execute_count(const SubPlanQuery& subplan, const Catalog& catalog, const OracleOptions& options = {});

// Persistent store of true cardinalities: CSV `query_id,subplan_key,cardinality`, sorted, preceded by
// a `# fingerprint=<hex>` line. Entries from a different catalog fingerprint are discarded on load.
class TrueCardCache {
 public:
  TrueCardCache(std::filesystem::path path, uint64_t catalog_fingerprint);

  const std::filesystem::path& path() const { return path_; }
  bool lookup(const std::string& query_id, const std::string& key, uint64_t& out) const;
  void insert(const std::string& query_id, const std::string& key, uint64_t value);
  std::size_t size() const { return entries_.size(); }
  bool dirty() const { return dirty_; }

  // Atomic write through a temporary file and rename.
  void save();

 private:
  std::filesystem::path path_;
  uint64_t fingerprint_;
  std::map<std::pair<std::string, std::string>, uint64_t> entries_;
  bool dirty_ = false;
};

// True cardinalities of every entry of the space. Cached entries are reused; new ones are added to
// the cache (the caller decides when to save).
CardinalityMap true_cardinalities(const SubPlanSpace& space, const Catalog& catalog,
                                  const OracleOptions& options = {}, TrueCardCache* cache = nullptr);

}  // namespace cardbench
