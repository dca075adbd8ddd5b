#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardbench/estimator.hpp"
#include "cardbench/oracle.hpp"
#include "cardbench/planner.hpp"
#include "cardbench/query.hpp"

namespace cardbench {

struct BenchConfig {
  std::vector<std::string> methods;
  EstimatorConfig estimator;
  CostParams cost;
  OracleOptions oracle;
  uint64_t seed = 0;
  std::size_t workers = 1;
};

struct SubPlanResult {
  std::string key;
  double truth = 0.0;     // exact count
  double raw = 0.0;       // estimator output before the one-row floor
  double estimate = 0.0;  // floored
  double q_error = 1.0;
  bool zero_truth = false;
};

struct MethodResult {
  std::string method;
  std::vector<SubPlanResult> subplans;
  double q_error_median = 1.0;
  double p_error = 1.0;
  double ppc = 0.0;  // true cost of the plan chosen under the estimates
  std::string plan;
  double latency_seconds = 0.0;  // wall clock of all estimate calls for the query
};

struct QueryResult {
  std::string id;
  std::string sql;
  double optimal_cost = 0.0;  // true cost of the plan chosen under true cardinalities
  std::string true_plan;
  std::vector<MethodResult> methods;  // config order
};

struct Percentiles {
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
};

struct MethodSummary {
  std::string method;
  Percentiles q_error;  // over every sub-plan of every query
  Percentiles p_error;  // over queries
  double build_seconds = 0.0;
  std::size_t model_bytes = 0;
  double mean_latency_seconds = 0.0;  // per query
};

// Pearson r over every (query, method) pair of a metric against the true-cost ratio
// ppc / optimal_cost. Absent when a series is constant.
struct CorrelationAnalysis {
  std::optional<double> p_error_vs_cost_ratio;
  std::optional<double> median_q_error_vs_cost_ratio;
  std::size_t points = 0;
};

struct BenchmarkReport {
  uint64_t seed = 0;
  std::vector<std::string> methods;
  CostParams cost;
  std::vector<QueryResult> queries;
  std::vector<MethodSummary> summaries;
  CorrelationAnalysis correlation;
  std::vector<std::string> violations;  // invariant failures; non-empty means a failed run
};

// Runs the full pipeline. Results depend only on (catalog, workload, config minus workers).
BenchmarkReport run_benchmark(const Catalog& catalog, const std::vector<WorkloadEntry>& workload,
                              const BenchConfig& config, TrueCardCache* cache = nullptr);

std::vector<MethodSummary> summarize(const std::vector<QueryResult>& queries, const std::vector<std::string>& methods);
CorrelationAnalysis correlate(const std::vector<QueryResult>& queries);

// Wall-clock fields are excluded so equal seeds give byte-identical output.
nlohmann::json report_json(const BenchmarkReport& report);
BenchmarkReport report_from_json(const nlohmann::json& json);
nlohmann::json timings_json(const BenchmarkReport& report);
std::string report_csv(const BenchmarkReport& report);
std::string report_text(const BenchmarkReport& report);

}  // namespace cardbench
