#pragma once

#include <map>

#include "cardbench/binary_io.hpp"
#include "cardbench/estimator.hpp"

namespace cardbench {

// Per-table selectivity from a fresh uniform sample, joins combined under the uniformity assumption.
// Tables no larger than the sample size are scanned exactly; larger ones are sampled with replacement.
class SamplingEstimator final : public Estimator {
 public:
  static std::unique_ptr<SamplingEstimator> build(const Catalog& catalog, std::size_t sample_size);
  static std::unique_ptr<SamplingEstimator> deserialize(BinaryReader& in, const Catalog& catalog);

  std::string_view name() const override { return "uni_sample"; }
  double estimate(const SubPlanQuery& subplan, uint64_t seed) const override;
  void serialize(std::ostream& out) const override;

  // Fraction of sampled rows passing the table's predicates and non-null join columns.
  double selectivity(const SubPlanQuery& subplan, const std::string& table, uint64_t seed) const;
  std::size_t sample_size() const { return sample_size_; }

 private:
  SamplingEstimator(const Catalog& catalog, std::size_t sample_size) : catalog_(&catalog), sample_size_(sample_size) {}

  const Catalog* catalog_;
  std::size_t sample_size_;
  std::map<ColumnRef, double> distinct_;  // join columns only
};

}  // namespace cardbench
