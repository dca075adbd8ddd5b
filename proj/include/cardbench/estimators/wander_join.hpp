#pragma once

#include <map>
#include <unordered_map>

#include "cardbench/binary_io.hpp"
#include "cardbench/estimator.hpp"

namespace cardbench {

// Horvitz-Thompson random-walk estimator over per-join-column adjacency indexes.
class WanderJoinEstimator final : public Estimator {
 public:
  static std::unique_ptr<WanderJoinEstimator> build(const Catalog& catalog, std::size_t walks, std::string root);
  static std::unique_ptr<WanderJoinEstimator> deserialize(BinaryReader& in, const Catalog& catalog);

  std::string_view name() const override { return "wj_sample"; }
  double estimate(const SubPlanQuery& subplan, uint64_t seed) const override;
  void serialize(std::ostream& out) const override;

  // Root of the walks: the configured table when present in the sub-plan, else the table with the
  // fewest filtered rows (ties by name).
  std::string choose_root(const SubPlanQuery& subplan) const;

 private:
  using Index = std::unordered_map<double, std::vector<uint32_t>>;

  WanderJoinEstimator(const Catalog& catalog, std::size_t walks, std::string root)
      : catalog_(&catalog), walks_(walks), root_(std::move(root)) {}

  const Catalog* catalog_;
  std::size_t walks_;
  std::string root_;
  std::map<ColumnRef, Index> index_;  // join key -> rows, non-null keys only
};

}  // namespace cardbench
