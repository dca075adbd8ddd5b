#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace cardbench::detail {

// Groups consecutive (value, count) runs into at most `groups` equi-depth groups without splitting a
// run. Returns [first, last) run index ranges covering every run; fewer runs than groups gives one
// group per run.
inline std::vector<std::pair<std::size_t, std::size_t>> equi_depth_groups(
    const std::vector<std::pair<double, std::size_t>>& runs, std::size_t groups) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (runs.empty() || groups == 0) return out;
  const std::size_t target = std::min(groups, runs.size());
  std::size_t total = 0;
  for (const auto& run : runs) total += run.second;
  const double depth = static_cast<double>(total) / static_cast<double>(target);
  std::size_t i = 0;
  std::size_t consumed = 0;
  for (std::size_t g = 0; g < target && i < runs.size(); ++g) {
    const std::size_t first = i;
    if (g + 1 == target) {
      i = runs.size();
    } else {
      const double goal = depth * static_cast<double>(g + 1);
      do {
        consumed += runs[i].second;
        ++i;
      } while (i < runs.size() && static_cast<double>(consumed) < goal - 1e-9 &&
               runs.size() - i > target - g - 1);
    }
    out.emplace_back(first, i);
  }
  return out;
}

// Sorted (value, multiplicity) runs of the values.
inline std::vector<std::pair<double, std::size_t>> value_runs(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, std::size_t>> runs;
  for (const double v : values) {
    if (runs.empty() || runs.back().first != v) runs.emplace_back(v, 0);
    ++runs.back().second;
  }
  return runs;
}

}  // namespace cardbench::detail
