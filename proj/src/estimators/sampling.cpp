#include "cardbench/estimators/sampling.hpp"

#include <random>

#include "cardbench/error.hpp"
#include "cardbench/hash.hpp"
#include "estimators/uniformity.hpp"

namespace cardbench {

std::unique_ptr<SamplingEstimator> SamplingEstimator::build(const Catalog& catalog, std::size_t sample_size) {
  if (sample_size == 0) fail(ErrorCode::kInvalidArgument, "uni_sample needs a positive sample size");
  auto model = std::unique_ptr<SamplingEstimator>(new SamplingEstimator(catalog, sample_size));
  for (const auto& edge : catalog.join_graph().edges) {
    for (const ColumnRef* ref : {&edge.left, &edge.right}) {
      model->distinct_[*ref] = static_cast<double>(catalog.column_distinct_count(ref->table, ref->column));
    }
  }
  return model;
}

double SamplingEstimator::selectivity(const SubPlanQuery& subplan, const std::string& table, uint64_t seed) const {
  const std::size_t rows = catalog_->table(table).rows();
  if (rows == 0) return 0.0;
  const RowFilter filter(*catalog_, subplan, table);
  std::size_t hits = 0;
  if (rows <= sample_size_) {
    for (std::size_t r = 0; r < rows; ++r) hits += filter.matches(r) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(rows);
  }
  std::mt19937_64 rng(derive_seed(seed, table));
  std::uniform_int_distribution<std::size_t> pick(0, rows - 1);
  for (std::size_t i = 0; i < sample_size_; ++i) hits += filter.matches(pick(rng)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(sample_size_);
}

double SamplingEstimator::estimate(const SubPlanQuery& subplan, uint64_t seed) const {
  std::map<std::string, double> filtered;
  for (const auto& table : subplan.tables) {
    filtered[table] = static_cast<double>(catalog_->table(table).rows()) * selectivity(subplan, table, seed);
  }
  if (subplan.tables.size() == 1) return filtered.begin()->second;
  return detail::uniformity_join_size(subplan, filtered, [&](const ColumnRef& ref) { return distinct_.at(ref); });
}

void SamplingEstimator::serialize(std::ostream& out) const {
  BinaryWriter w(out);
  w.u64(sample_size_);
  w.u64(distinct_.size());
  for (const auto& [ref, distinct] : distinct_) {
    w.str(ref.table);
    w.str(ref.column);
    w.f64(distinct);
  }
}

std::unique_ptr<SamplingEstimator> SamplingEstimator::deserialize(BinaryReader& in, const Catalog& catalog) {
  const uint64_t sample_size = in.u64();
  auto model = std::unique_ptr<SamplingEstimator>(new SamplingEstimator(catalog, sample_size));
  const uint64_t n = in.u64();
  for (uint64_t i = 0; i < n; ++i) {
    ColumnRef ref;
    ref.table = in.str();
    ref.column = in.str();
    model->distinct_[ref] = in.f64();
  }
  return model;
}

}  // namespace cardbench
