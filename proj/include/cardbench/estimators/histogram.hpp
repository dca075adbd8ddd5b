#pragma once

#include <map>
#include <string>
#include <vector>

#include "cardbench/binary_io.hpp"
#include "cardbench/estimator.hpp"

namespace cardbench {

// One column's statistics: most-common values with exact frequencies plus an equi-depth histogram
// over the remaining values. Frequencies and masses are fractions of the non-null rows.
struct ColumnHistogram {
  double null_frac = 0.0;
  double distinct = 0.0;
  bool discrete = false;
  std::vector<double> mcv_values;  // sorted ascending
  std::vector<double> mcv_freqs;
  std::vector<double> bucket_lo;
  std::vector<double> bucket_hi;
  std::vector<double> bucket_mass;
  std::vector<double> bucket_distinct;

  // Fraction of all rows (nulls included in the denominator) falling in `region`.
  double selectivity(const Region& region) const;
  double total_mass() const;
};

struct TableHistograms {
  double rows = 0.0;
  std::map<std::string, ColumnHistogram> columns;
};

// Attribute-independence estimator in the style of PostgreSQL's planner statistics.
class HistogramEstimator final : public Estimator {
 public:
  static std::unique_ptr<HistogramEstimator> build(const Catalog& catalog, std::size_t buckets, std::size_t mcv_k,
                                                   std::size_t workers = 1);
  static std::unique_ptr<HistogramEstimator> deserialize(BinaryReader& in);

  std::string_view name() const override { return "indep_hist"; }
  double estimate(const SubPlanQuery& subplan, uint64_t seed) const override;
  void serialize(std::ostream& out) const override;

  // Per-table selectivity product times |T|, including non-null fractions of join columns.
  double filtered_rows(const SubPlanQuery& subplan, const std::string& table) const;
  const ColumnHistogram& histogram(const std::string& table, const std::string& column) const;

 private:
  std::map<std::string, TableHistograms> tables_;
};

ColumnHistogram build_column_histogram(const Column& column, std::size_t buckets, std::size_t mcv_k);

}  // namespace cardbench
