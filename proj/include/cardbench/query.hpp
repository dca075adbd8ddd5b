#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cardbench/catalog.hpp"

namespace cardbench {

// Closed/open interval in a column's value space (dictionary codes for categorical columns).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  bool empty() const { return lo > hi || (lo == hi && (lo_open || hi_open)); }
  bool operator==(const Interval&) const = default;
};

// Constraint region of one attribute: an interval or a finite sorted value set.
// The empty region is canonically the empty value set.
class Region {
 public:
  static Region interval(Interval iv);
  static Region values(std::vector<double> values);
  static Region nothing() { return values({}); }

  bool is_interval() const { return is_interval_; }
  const Interval& bounds() const { return interval_; }
  const std::vector<double>& value_set() const { return values_; }

  bool empty() const { return !is_interval_ && values_.empty(); }
  bool contains(double v) const;
  Region intersect(const Region& other) const;

  bool operator==(const Region&) const = default;

 private:
  bool is_interval_ = false;
  Interval interval_;
  std::vector<double> values_;
};

struct Predicate {
  std::string table;
  std::string column;
  Region region;

  bool operator==(const Predicate&) const = default;
};

// Canonical conjunctive selection-join query. Tables are sorted; predicates hold one merged region
// per (table, column), sorted; join edges use catalog orientation and are sorted.
struct Query {
  std::string id;
  std::vector<std::string> tables;
  std::vector<JoinEdge> join_edges;
  std::vector<Predicate> predicates;

  std::size_t table_index(std::string_view table) const;
  bool operator==(const Query& other) const;
};

using TableMask = uint32_t;

struct SubPlanQuery {
  std::string parent;
  TableMask mask = 0;  // bits index the parent's sorted table list
  std::vector<std::string> tables;
  std::vector<JoinEdge> join_edges;
  std::vector<Predicate> predicates;

  std::string key() const;
  std::vector<Predicate> predicates_on(std::string_view table) const;
};

struct SubPlanSpace {
  std::string parent;
  std::vector<SubPlanQuery> entries;
};

// Canonical sub-plan identifier: sorted table names joined by '|'.
std::string subplan_key(const std::vector<std::string>& sorted_tables);

Query parse_query(std::string_view sql, const Catalog& catalog, std::string id = "q");

// SQL text that parses back to an identical Query.
std::string to_sql(const Query& query, const Catalog& catalog);

// Restriction of a query to the tables in `mask`, with induced edges and predicates.
SubPlanQuery make_subplan(const Query& query, TableMask mask);

// Whether the tables in `mask` form a connected subgraph of the query's join edges.
bool is_connected(const Query& query, TableMask mask);

// All connected table subsets, ordered by size then lexicographic table tuple.
SubPlanSpace enumerate_subplans(const Query& query);

struct WorkloadEntry {
  std::string id;
  std::string sql;
};

// One statement per line; `-- name:<id>` names it (trailing or on the preceding line).
std::vector<WorkloadEntry> parse_workload(std::string_view text);
std::string format_workload(const std::vector<WorkloadEntry>& entries);

}  // namespace cardbench
