#include "cardbench/estimators/pessimistic.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "cardbench/error.hpp"

namespace cardbench {
namespace {

double max_degree(const Column& column, const std::vector<uint32_t>& rows) {
  std::unordered_map<double, uint64_t> counts;
  uint64_t best = 0;
  for (const uint32_t r : rows) best = std::max(best, ++counts[column.join_key(r)]);
  return static_cast<double>(best);
}

}  // namespace

double PessimisticEstimator::estimate(const SubPlanQuery& subplan, uint64_t) const {
  const std::size_t n = subplan.tables.size();
  std::vector<double> filtered(n);
  // Exact max multiplicity of each join column over its table's filtered rows.
  std::map<ColumnRef, double> table_degree;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<uint32_t> rows = filter_subplan_table(*catalog_, subplan, subplan.tables[i]);
    filtered[i] = static_cast<double>(rows.size());
    for (const auto& edge : subplan.join_edges) {
      if (!edge.touches(subplan.tables[i])) continue;
      const ColumnRef& ref = edge.side(subplan.tables[i]);
      if (!table_degree.count(ref)) table_degree[ref] = max_degree(catalog_->column(ref), rows);
    }
  }
  if (n == 1) return filtered[0];

  auto slot = [&](const std::string& table) {
    return static_cast<std::size_t>(std::lower_bound(subplan.tables.begin(), subplan.tables.end(), table) -
                                    subplan.tables.begin());
  };

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t root = 0; root < n; ++root) {
    std::vector<bool> in(n, false);
    in[root] = true;
    double bound = filtered[root];
    // Cap on the number of partial join tuples sharing one value of a column already joined.
    std::map<ColumnRef, double> degree;
    for (const auto& [ref, d] : table_degree) {
      if (ref.table == subplan.tables[root]) degree[ref] = d;
    }
    for (std::size_t joined = 1; joined < n; ++joined) {
      const JoinEdge* next = nullptr;
      for (const auto& edge : subplan.join_edges) {
        if (in[slot(edge.left.table)] != in[slot(edge.right.table)]) {
          next = &edge;
          break;
        }
      }
      if (!next) fail(ErrorCode::kDisconnectedJoinGraph, subplan.parent + "/" + subplan.key());
      const bool left_in = in[slot(next->left.table)];
      const ColumnRef& a = left_in ? next->left : next->right;
      const ColumnRef& b = left_in ? next->right : next->left;
      const std::size_t t = slot(b.table);
      const double deg_a = degree.at(a);
      const double deg_b = table_degree.at(b);
      const double new_bound = std::min(bound * deg_b, filtered[t] * deg_a);
      for (auto& [ref, d] : degree) d = std::min(d * deg_b, new_bound);
      for (const auto& [ref, d] : table_degree) {
        if (ref.table == b.table) degree[ref] = std::min(d * deg_a, new_bound);
      }
      bound = new_bound;
      in[t] = true;
    }
    best = std::min(best, bound);
  }
  return best;
}

}  // namespace cardbench
