#include "cardbench/estimators/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "cardbench/error.hpp"
#include "cardbench/parallel.hpp"
#include "estimators/bucket.hpp"
#include "estimators/equi_depth.hpp"
#include "estimators/uniformity.hpp"

namespace cardbench {
namespace {

// Integer codes in [lo, hi] that lie inside the region.
double count_codes(const Region& region, double lo, double hi) {
  if (region.empty()) return 0.0;
  if (!region.is_interval()) {
    const auto& v = region.value_set();
    double hits = 0.0;
    for (auto it = std::lower_bound(v.begin(), v.end(), lo); it != v.end() && *it <= hi; ++it) {
      if (*it == std::floor(*it)) hits += 1.0;
    }
    return hits;
  }
  const Interval& iv = region.bounds();
  double first = std::ceil(iv.lo);
  if (iv.lo_open && first == iv.lo) first += 1.0;
  double last = std::floor(iv.hi);
  if (iv.hi_open && last == iv.hi) last -= 1.0;
  return std::max(0.0, std::min(last, hi) - std::max(first, lo) + 1.0);
}

}  // namespace

double ColumnHistogram::total_mass() const {
  double total = 0.0;
  for (const double f : mcv_freqs) total += f;
  for (const double m : bucket_mass) total += m;
  return total;
}

double ColumnHistogram::selectivity(const Region& region) const {
  if (region.empty()) return 0.0;
  double inside = 0.0;
  for (std::size_t i = 0; i < mcv_values.size(); ++i) {
    if (region.contains(mcv_values[i])) inside += mcv_freqs[i];
  }
  // MCV rows are not in any bucket, so listed MCVs must not also draw bucket mass.
  Region rest = region;
  if (!region.is_interval()) {
    std::vector<double> listed;
    for (const double v : region.value_set()) {
      if (!std::binary_search(mcv_values.begin(), mcv_values.end(), v)) listed.push_back(v);
    }
    rest = Region::values(std::move(listed));
  }
  if (rest.empty()) return std::clamp((1.0 - null_frac) * inside, 0.0, 1.0);
  for (std::size_t b = 0; b < bucket_mass.size(); ++b) {
    if (discrete) {
      // Codes are dense, so every code in [lo, hi] that is not an MCV belongs to this bucket.
      double hits = count_codes(rest, bucket_lo[b], bucket_hi[b]);
      for (const double v : mcv_values) {
        if (v >= bucket_lo[b] && v <= bucket_hi[b] && rest.contains(v)) hits -= 1.0;
      }
      inside += bucket_mass[b] * std::clamp(hits / std::max(1.0, bucket_distinct[b]), 0.0, 1.0);
      continue;
    }
    const detail::ValueRange range{bucket_lo[b], bucket_hi[b], bucket_distinct[b], false};
    inside += bucket_mass[b] * range.fraction_in(rest);
  }
  return std::clamp((1.0 - null_frac) * inside, 0.0, 1.0);
}

ColumnHistogram build_column_histogram(const Column& column, std::size_t buckets, std::size_t mcv_k) {
  ColumnHistogram h;
  h.discrete = column.kind() == ColumnKind::kCategorical;
  std::vector<double> values;
  values.reserve(column.size());
  for (std::size_t r = 0; r < column.size(); ++r) {
    if (!column.is_null(r)) values.push_back(column.value(r));
  }
  if (column.size() > 0) h.null_frac = 1.0 - static_cast<double>(values.size()) / static_cast<double>(column.size());
  if (values.empty()) return h;
  const auto runs = detail::value_runs(std::move(values));
  h.distinct = static_cast<double>(runs.size());
  double nonnull = 0.0;
  for (const auto& run : runs) nonnull += static_cast<double>(run.second);

  // Top-k by count descending, ties by value ascending.
  std::vector<std::size_t> order(runs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return runs[a].second > runs[b].second; });
  std::vector<bool> is_mcv(runs.size(), false);
  for (std::size_t i = 0; i < std::min(mcv_k, order.size()); ++i) is_mcv[order[i]] = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!is_mcv[i]) continue;
    h.mcv_values.push_back(runs[i].first);
    h.mcv_freqs.push_back(static_cast<double>(runs[i].second) / nonnull);
  }

  std::vector<std::pair<double, std::size_t>> rest;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!is_mcv[i]) rest.push_back(runs[i]);
  }
  for (const auto& [first, last] : detail::equi_depth_groups(rest, buckets)) {
    std::size_t count = 0;
    for (std::size_t i = first; i < last; ++i) count += rest[i].second;
    h.bucket_lo.push_back(rest[first].first);
    h.bucket_hi.push_back(rest[last - 1].first);
    h.bucket_mass.push_back(static_cast<double>(count) / nonnull);
    h.bucket_distinct.push_back(static_cast<double>(last - first));
  }
  return h;
}

std::unique_ptr<HistogramEstimator> HistogramEstimator::build(const Catalog& catalog, std::size_t buckets,
                                                              std::size_t mcv_k, std::size_t workers) {
  auto model = std::unique_ptr<HistogramEstimator>(new HistogramEstimator());
  std::vector<const TableData*> tables;
  for (const auto& [name, table] : catalog.tables()) {
    tables.push_back(&table);
    model->tables_[name];
  }
  parallel_for(tables.size(), workers, [&](std::size_t t) {
    TableHistograms& out = model->tables_.at(tables[t]->name());
    out.rows = static_cast<double>(tables[t]->rows());
    for (const auto& column : tables[t]->columns()) {
      out.columns.emplace(column.name(), build_column_histogram(column, buckets, mcv_k));
    }
  });
  return model;
}

const ColumnHistogram& HistogramEstimator::histogram(const std::string& table, const std::string& column) const {
  const auto t = tables_.find(table);
  if (t == tables_.end()) fail(ErrorCode::kUnknownTable, "indep_hist has no statistics for table " + table);
  const auto c = t->second.columns.find(column);
  if (c == t->second.columns.end()) fail(ErrorCode::kUnknownColumn, "indep_hist has no column " + table + "." + column);
  return c->second;
}

double HistogramEstimator::filtered_rows(const SubPlanQuery& subplan, const std::string& table) const {
  const auto t = tables_.find(table);
  if (t == tables_.end()) fail(ErrorCode::kUnknownTable, "indep_hist has no statistics for table " + table);
  double rows = t->second.rows;
  std::vector<std::string> predicated;
  for (const auto& p : subplan.predicates_on(table)) {
    rows *= histogram(table, p.column).selectivity(p.region);
    predicated.push_back(p.column);
  }
  // Join columns must be non-null to match; predicates already exclude nulls.
  std::vector<std::string> join_columns;
  for (const auto& edge : subplan.join_edges) {
    if (!edge.touches(table)) continue;
    const std::string& c = edge.side(table).column;
    if (std::find(predicated.begin(), predicated.end(), c) != predicated.end()) continue;
    if (std::find(join_columns.begin(), join_columns.end(), c) != join_columns.end()) continue;
    join_columns.push_back(c);
    rows *= 1.0 - histogram(table, c).null_frac;
  }
  return rows;
}

double HistogramEstimator::estimate(const SubPlanQuery& subplan, uint64_t) const {
  std::map<std::string, double> filtered;
  for (const auto& table : subplan.tables) filtered[table] = filtered_rows(subplan, table);
  if (subplan.tables.size() == 1) return filtered.begin()->second;
  return detail::uniformity_join_size(subplan, filtered, [&](const ColumnRef& ref) {
    return histogram(ref.table, ref.column).distinct;
  });
}

void HistogramEstimator::serialize(std::ostream& out) const {
  BinaryWriter w(out);
  w.u64(tables_.size());
  for (const auto& [name, table] : tables_) {
    w.str(name);
    w.f64(table.rows);
    w.u64(table.columns.size());
    for (const auto& [column, h] : table.columns) {
      w.str(column);
      w.f64(h.null_frac);
      w.f64(h.distinct);
      w.u64(h.discrete ? 1 : 0);
      w.f64s(h.mcv_values);
      w.f64s(h.mcv_freqs);
      w.f64s(h.bucket_lo);
      w.f64s(h.bucket_hi);
      w.f64s(h.bucket_mass);
      w.f64s(h.bucket_distinct);
    }
  }
}

std::unique_ptr<HistogramEstimator> HistogramEstimator::deserialize(BinaryReader& in) {
  auto model = std::unique_ptr<HistogramEstimator>(new HistogramEstimator());
  const uint64_t tables = in.u64();
  for (uint64_t t = 0; t < tables; ++t) {
    TableHistograms& table = model->tables_[in.str()];
    table.rows = in.f64();
    const uint64_t columns = in.u64();
    for (uint64_t c = 0; c < columns; ++c) {
      ColumnHistogram& h = table.columns[in.str()];
      h.null_frac = in.f64();
      h.distinct = in.f64();
      h.discrete = in.u64() != 0;
      h.mcv_values = in.f64s();
      h.mcv_freqs = in.f64s();
      h.bucket_lo = in.f64s();
      h.bucket_hi = in.f64s();
      h.bucket_mass = in.f64s();
      h.bucket_distinct = in.f64s();
    }
  }
  return model;
}

}  // namespace cardbench
