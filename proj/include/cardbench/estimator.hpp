#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cardbench/catalog.hpp"
#include "cardbench/oracle.hpp"
#include "cardbench/query.hpp"

namespace cardbench {

struct EstimatorConfig {
  std::size_t hist_buckets = 100;
  std::size_t mcv_k = 10;
  std::size_t sample_size = 10'000;
  std::size_t wj_walks = 10'000;
  std::string wj_root;  // empty: smallest filtered table of each sub-plan
  std::size_t chow_liu_bins = 64;
  std::vector<ColumnRef> chow_liu_exclude;
  uint64_t seed = 0;
  std::size_t workers = 1;  // tables are built in parallel
};

struct BuildStats {
  double build_seconds = 0.0;
  std::size_t model_bytes = 0;
};

// Maps a sub-plan to an estimated cardinality. Models are immutable after build and `estimate` is a
// pure function of (model, sub-plan, seed), so one model may serve any number of threads.
class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual std::string_view name() const = 0;
  // Finite, non-negative raw estimate.
  virtual double estimate(const SubPlanQuery& subplan, uint64_t seed) const = 0;
  virtual void serialize(std::ostream& out) const = 0;

  const BuildStats& build_stats() const { return stats_; }

 protected:
  friend std::unique_ptr<Estimator> build_estimator(std::string_view, const Catalog&, const EstimatorConfig&);
  friend std::unique_ptr<Estimator> load_estimator(std::istream&, const Catalog&);
  BuildStats stats_;
};

inline constexpr std::string_view kMethodNames[] = {"true",       "indep_hist", "uni_sample",
                                                    "wj_sample",  "pess_bound", "chow_liu"};

bool is_known_method(std::string_view method);

// Throws UnsupportedMethod for unknown names and InsufficientData when the catalog cannot support
// the model. Records build time and serialized size.
std::unique_ptr<Estimator> build_estimator(std::string_view method, const Catalog& catalog,
                                           const EstimatorConfig& config);

// Model file: magic, format version, method name, catalog fingerprint, then the method body.
void save_estimator(const Estimator& estimator, const Catalog& catalog, std::ostream& out);
std::unique_ptr<Estimator> load_estimator(std::istream& in, const Catalog& catalog);

// Planner-facing value: estimates below one row are raised to one.
inline double floor_estimate(double raw) { return raw < 1.0 ? 1.0 : raw; }

// Floored estimates for every entry; per-entry seeds derive from (seed, sub-plan key).
// Throws InvariantViolation on a non-finite or negative raw estimate.
CardinalityMap estimate_space(const Estimator& estimator, const SubPlanSpace& space, uint64_t seed,
                              std::size_t workers = 1);

}  // namespace cardbench
