#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "cardbench/query.hpp"

namespace cardbench::detail {

// Join size under the uniformity assumption: the product of per-table filtered sizes divided, per
// join edge, by max(V_f(left), V_f(right)) with V_f = max(1, min(V, filtered rows of its table)).
inline double uniformity_join_size(const SubPlanQuery& subplan, const std::map<std::string, double>& filtered_rows,
                                   const std::function<double(const ColumnRef&)>& distinct) {
  double size = 1.0;
  for (const auto& table : subplan.tables) size *= filtered_rows.at(table);
  for (const auto& edge : subplan.join_edges) {
    auto scaled = [&](const ColumnRef& ref) {
      return std::max(1.0, std::min(distinct(ref), filtered_rows.at(ref.table)));
    };
    size /= std::max(scaled(edge.left), scaled(edge.right));
  }
  return size;
}

}  // namespace cardbench::detail
