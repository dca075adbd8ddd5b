#include "cardbench/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cardbench/binary_io.hpp"
#include "cardbench/error.hpp"
#include "cardbench/estimators/chow_liu.hpp"
#include "cardbench/estimators/histogram.hpp"
#include "cardbench/estimators/pessimistic.hpp"
#include "cardbench/estimators/sampling.hpp"
#include "cardbench/estimators/wander_join.hpp"
#include "cardbench/hash.hpp"
#include "cardbench/parallel.hpp"

namespace cardbench {
namespace {

constexpr std::string_view kMagic = "CARDBMDL";
constexpr uint64_t kFormatVersion = 1;

// Exact counts through the oracle; used as the reference method.
class TrueEstimator final : public Estimator {
 public:
  explicit TrueEstimator(const Catalog& catalog) : catalog_(&catalog) {}
  std::string_view name() const override { return "true"; }
  double estimate(const SubPlanQuery& subplan, uint64_t) const override {
    return static_cast<double>(execute_count(subplan, *catalog_));
  }
  void serialize(std::ostream&) const override {}

 private:
  const Catalog* catalog_;
};

std::unique_ptr<Estimator> make_estimator(std::string_view method, const Catalog& catalog,
                                          const EstimatorConfig& config) {
  if (method == "true") return std::make_unique<TrueEstimator>(catalog);
  if (method == "indep_hist") {
    if (config.hist_buckets == 0) fail(ErrorCode::kInvalidArgument, "indep_hist needs at least one bucket");
    return HistogramEstimator::build(catalog, config.hist_buckets, config.mcv_k, config.workers);
  }
  if (method == "uni_sample") return SamplingEstimator::build(catalog, config.sample_size);
  if (method == "wj_sample") return WanderJoinEstimator::build(catalog, config.wj_walks, config.wj_root);
  if (method == "pess_bound") return std::make_unique<PessimisticEstimator>(catalog);
  if (method == "chow_liu") {
    return ChowLiuEstimator::build(catalog, config.chow_liu_bins, config.chow_liu_exclude, config.workers);
  }
  fail(ErrorCode::kUnsupportedMethod, "unknown estimation method '" + std::string(method) + "'");
}

std::size_t serialized_size(const Estimator& estimator) {
  std::ostringstream body;
  estimator.serialize(body);
  return body.str().size();
}

}  // namespace

bool is_known_method(std::string_view method) {
  return std::find(std::begin(kMethodNames), std::end(kMethodNames), method) != std::end(kMethodNames);
}

std::unique_ptr<Estimator> build_estimator(std::string_view method, const Catalog& catalog,
                                           const EstimatorConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto estimator = make_estimator(method, catalog, config);
  estimator->stats_.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  estimator->stats_.model_bytes = serialized_size(*estimator);
  return estimator;
}

void save_estimator(const Estimator& estimator, const Catalog& catalog, std::ostream& out) {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  BinaryWriter w(out);
  w.u64(kFormatVersion);
  w.str(std::string(estimator.name()));
  w.u64(catalog.fingerprint());
  estimator.serialize(out);
  if (!out) fail(ErrorCode::kIo, "failed to write model file");
}

std::unique_ptr<Estimator> load_estimator(std::istream& in, const Catalog& catalog) {
  std::string magic(kMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (magic != kMagic) fail(ErrorCode::kIo, "not a model file");
  BinaryReader r(in);
  if (const uint64_t version = r.u64(); version != kFormatVersion) {
    fail(ErrorCode::kIo, "unsupported model format version " + std::to_string(version));
  }
  const std::string method = r.str();
  if (r.u64() != catalog.fingerprint()) fail(ErrorCode::kIo, "model was built on a different catalog");
  std::unique_ptr<Estimator> estimator;
  if (method == "true") {
    estimator = std::make_unique<TrueEstimator>(catalog);
  } else if (method == "indep_hist") {
    estimator = HistogramEstimator::deserialize(r);
  } else if (method == "uni_sample") {
    estimator = SamplingEstimator::deserialize(r, catalog);
  } else if (method == "wj_sample") {
    estimator = WanderJoinEstimator::deserialize(r, catalog);
  } else if (method == "pess_bound") {
    estimator = std::make_unique<PessimisticEstimator>(catalog);
  } else if (method == "chow_liu") {
    estimator = ChowLiuEstimator::deserialize(r);
  } else {
    fail(ErrorCode::kUnsupportedMethod, "model file names unknown method '" + method + "'");
  }
  estimator->stats_.model_bytes = serialized_size(*estimator);
  return estimator;
}

CardinalityMap estimate_space(const Estimator& estimator, const SubPlanSpace& space, uint64_t seed,
                              std::size_t workers) {
  std::vector<double> values(space.entries.size());
  parallel_for(space.entries.size(), workers, [&](std::size_t i) {
    const SubPlanQuery& entry = space.entries[i];
    const double raw = estimator.estimate(entry, derive_seed(seed, space.parent + ":" + entry.key()));
    if (!std::isfinite(raw) || raw < 0.0) {
      fail(ErrorCode::kInvariantViolation, std::string(estimator.name()) + " produced estimate " +
                                               std::to_string(raw) + " for " + space.parent + "/" + entry.key());
    }
    values[i] = floor_estimate(raw);
  });
  CardinalityMap map;
  map.parent = space.parent;
  map.provenance = "estimated(" + std::string(estimator.name()) + ")";
  for (std::size_t i = 0; i < values.size(); ++i) map.values[space.entries[i].key()] = values[i];
  return map;
}

}  // namespace cardbench
