#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardbench/oracle.hpp"
#include "cardbench/query.hpp"

namespace cardbench {

// PostgreSQL-like cost constants. All must be positive except hash_probe_factor, which may be 0.
struct CostParams {
  double seq_page_cost = 1.0;
  double cpu_tuple_cost = 0.01;
  double cpu_operator_cost = 0.0025;
  double sort_factor = 2.0;
  double rows_per_page = 100.0;
  // Hash bucket scan per output row, in units of cpu_operator_cost. 0 gives the bare formulas, where
  // the output size is costed identically by every operator.
  double hash_probe_factor = 0.5;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

enum class JoinOp { kHash, kMerge, kNestedLoop };

std::string_view join_op_name(JoinOp op);

// Node of a binary plan tree stored in PhysicalPlan::nodes; children precede their parent.
struct PlanNode {
  bool is_scan = true;
  std::string table;             // scans
  std::size_t predicates = 0;    // scans: predicate count
  JoinOp op = JoinOp::kHash;     // joins
  JoinEdge edge;                 // joins
  int left = -1;                 // joins: probe side
  int right = -1;                // joins: build side for HashJoin, inner for NestedLoop
  TableMask mask = 0;
  std::string key;
  double rows = 0.0;             // cardinality read from the map when costed
  double cost = 0.0;             // cumulative
};

struct PhysicalPlan {
  std::string query_id;
  std::vector<PlanNode> nodes;
  int root = -1;

  const PlanNode& root_node() const { return nodes.at(static_cast<std::size_t>(root)); }
  double cost() const { return root_node().cost; }
};

double scan_cost(double rows, std::size_t predicates, const CostParams& params);
// Cumulative cost of a join node given its children's cumulative costs and the three cardinalities.
double join_cost(JoinOp op, double left_cost, double right_cost, double left_rows, double right_rows, double out,
                 const CostParams& params);

// Minimum-cost bushy plan over connected sub-plans and all three join operators. Ties go to the
// smallest (operator name, left sub-plan key). Throws IncompleteCardinalityMap on a missing key.
PhysicalPlan optimize(const Query& query, const CardinalityMap& cards, const CostParams& params = {});

// The plan's shape with every node's rows and cost re-read from `cards`.
PhysicalPlan recost(const PhysicalPlan& plan, const CardinalityMap& cards, const CostParams& params = {});

double cost_plan(const PhysicalPlan& plan, const CardinalityMap& cards, const CostParams& params = {});

// cost_plan(optimize(query, estimated), truth).
double ppc(const Query& query, const CardinalityMap& estimated, const CardinalityMap& truth,
           const CostParams& params = {});

// Indented EXPLAIN-like text, one node per line.
std::string format_plan(const PhysicalPlan& plan);

// Pre-order comparison of operator, sub-plan key and child split; nullopt when the plans agree.
std::optional<std::string> first_divergence(const PhysicalPlan& a, const PhysicalPlan& b);

}  // namespace cardbench
