#pragma once

#include "cardbench/estimator.hpp"

namespace cardbench {

// Degree-based upper bound. Max key multiplicities are recomputed per query over the filtered
// tables, so the model holds no statistics of its own.
class PessimisticEstimator final : public Estimator {
 public:
  explicit PessimisticEstimator(const Catalog& catalog) : catalog_(&catalog) {}

  std::string_view name() const override { return "pess_bound"; }
  // Never below the true cardinality.
  double estimate(const SubPlanQuery& subplan, uint64_t seed) const override;
  void serialize(std::ostream&) const override {}

 private:
  const Catalog* catalog_;
};

}  // namespace cardbench
