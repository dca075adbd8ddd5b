#include "cardbench/estimators/wander_join.hpp"

#include <algorithm>
#include <random>

#include "cardbench/error.hpp"

namespace cardbench {

std::unique_ptr<WanderJoinEstimator> WanderJoinEstimator::build(const Catalog& catalog, std::size_t walks,
                                                                std::string root) {
  if (walks == 0) fail(ErrorCode::kInvalidArgument, "wj_sample needs a positive walk count");
  if (!root.empty() && !catalog.has_table(root)) fail(ErrorCode::kUnknownTable, "wander-join root " + root);
  auto model = std::unique_ptr<WanderJoinEstimator>(new WanderJoinEstimator(catalog, walks, std::move(root)));
  for (const auto& edge : catalog.join_graph().edges) {
    for (const ColumnRef* ref : {&edge.left, &edge.right}) {
      if (model->index_.count(*ref)) continue;
      Index& index = model->index_[*ref];
      const Column& column = catalog.column(*ref);
      for (std::size_t r = 0; r < column.size(); ++r) {
        if (!column.is_null(r)) index[column.join_key(r)].push_back(static_cast<uint32_t>(r));
      }
    }
  }
  return model;
}

std::string WanderJoinEstimator::choose_root(const SubPlanQuery& subplan) const {
  if (!root_.empty() && std::binary_search(subplan.tables.begin(), subplan.tables.end(), root_)) return root_;
  std::string best;
  std::size_t best_rows = 0;
  for (const auto& table : subplan.tables) {
    const std::size_t rows = filter_subplan_table(*catalog_, subplan, table).size();
    if (best.empty() || rows < best_rows) {
      best = table;
      best_rows = rows;
    }
  }
  return best;
}

double WanderJoinEstimator::estimate(const SubPlanQuery& subplan, uint64_t seed) const {
  const std::string root = choose_root(subplan);
  const std::vector<uint32_t> root_rows = filter_subplan_table(*catalog_, subplan, root);
  if (root_rows.empty()) return 0.0;
  if (subplan.tables.size() == 1) return static_cast<double>(root_rows.size());

  struct Hop {
    std::size_t from;
    std::size_t to;
    const Column* from_column;
    const Index* index;
  };
  const std::size_t n = subplan.tables.size();
  auto slot = [&](const std::string& table) {
    return static_cast<std::size_t>(std::lower_bound(subplan.tables.begin(), subplan.tables.end(), table) -
                                    subplan.tables.begin());
  };
  std::vector<Hop> hops;
  std::vector<bool> reached(n, false);
  reached[slot(root)] = true;
  // Sub-plans are trees, so breadth-first growth reaches each table through exactly one edge.
  for (std::size_t done = 1; done < n;) {
    const std::size_t before = done;
    for (const auto& edge : subplan.join_edges) {
      const std::size_t l = slot(edge.left.table);
      const std::size_t r = slot(edge.right.table);
      if (reached[l] == reached[r]) continue;
      const ColumnRef& from = reached[l] ? edge.left : edge.right;
      const ColumnRef& to = reached[l] ? edge.right : edge.left;
      hops.push_back({reached[l] ? l : r, reached[l] ? r : l, &catalog_->column(from), &index_.at(to)});
      reached[hops.back().to] = true;
      ++done;
    }
    if (done == before) fail(ErrorCode::kDisconnectedJoinGraph, subplan.parent + "/" + subplan.key());
  }
  std::vector<RowFilter> filters;
  filters.reserve(n);
  for (const auto& table : subplan.tables) filters.emplace_back(*catalog_, subplan, table);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_root(0, root_rows.size() - 1);
  std::vector<uint32_t> rows(n);
  double total = 0.0;
  for (std::size_t walk = 0; walk < walks_; ++walk) {
    rows[slot(root)] = root_rows[pick_root(rng)];
    double weight = 1.0;
    for (const Hop& hop : hops) {
      const auto it = hop.index->find(hop.from_column->join_key(rows[hop.from]));
      if (it == hop.index->end()) {
        weight = 0.0;
        break;
      }
      const auto& candidates = it->second;
      rows[hop.to] = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      weight *= static_cast<double>(candidates.size());
      if (!filters[hop.to].matches(rows[hop.to])) {
        weight = 0.0;
        break;
      }
    }
    total += weight;
  }
  return static_cast<double>(root_rows.size()) * total / static_cast<double>(walks_);
}

void WanderJoinEstimator::serialize(std::ostream& out) const {
  BinaryWriter w(out);
  w.u64(walks_);
  w.str(root_);
  w.u64(index_.size());
  for (const auto& [ref, index] : index_) {
    w.str(ref.table);
    w.str(ref.column);
    std::vector<double> keys;
    keys.reserve(index.size());
    for (const auto& entry : index) keys.push_back(entry.first);
    std::sort(keys.begin(), keys.end());
    w.f64s(keys);
    for (const double key : keys) {
      const auto& rows = index.at(key);
      w.u64s(std::vector<uint64_t>(rows.begin(), rows.end()));
    }
  }
}

std::unique_ptr<WanderJoinEstimator> WanderJoinEstimator::deserialize(BinaryReader& in, const Catalog& catalog) {
  const uint64_t walks = in.u64();
  std::string root = in.str();
  auto model = std::unique_ptr<WanderJoinEstimator>(new WanderJoinEstimator(catalog, walks, std::move(root)));
  const uint64_t columns = in.u64();
  for (uint64_t c = 0; c < columns; ++c) {
    ColumnRef ref;
    ref.table = in.str();
    ref.column = in.str();
    Index& index = model->index_[ref];
    for (const double key : in.f64s()) {
      const auto rows = in.u64s();
      index[key].assign(rows.begin(), rows.end());
    }
  }
  return model;
}

}  // namespace cardbench
