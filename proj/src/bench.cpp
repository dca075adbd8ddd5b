#include "cardbench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fmt/format.h>
#include <map>
#include <memory>

#include "cardbench/csv.hpp"
#include "cardbench/error.hpp"
#include "cardbench/hash.hpp"
#include "cardbench/metrics.hpp"
#include "cardbench/parallel.hpp"

namespace cardbench {
namespace {

CardinalityMap floored(CardinalityMap map) {
  for (auto& [key, value] : map.values) value = floor_estimate(value);
  return map;
}

Percentiles percentiles_of(const std::vector<double>& values) {
  if (values.empty()) return {};
  return {percentile(values, 50), percentile(values, 90), percentile(values, 99)};
}

}  // namespace

BenchmarkReport run_benchmark(const Catalog& catalog, const std::vector<WorkloadEntry>& workload,
                              const BenchConfig& config, TrueCardCache* cache) {
  config.cost.validate();
  if (config.methods.empty()) fail(ErrorCode::kInvalidArgument, "no estimation methods selected");
  for (const auto& m : config.methods) {
    if (!is_known_method(m)) fail(ErrorCode::kUnsupportedMethod, "unknown estimation method '" + m + "'");
  }

  BenchmarkReport report;
  report.seed = config.seed;
  report.methods = config.methods;
  report.cost = config.cost;

  std::vector<Query> queries;
  std::vector<SubPlanSpace> spaces;
  std::vector<CardinalityMap> truths;
  for (const auto& entry : workload) {
    try {
      queries.push_back(parse_query(entry.sql, catalog, entry.id));
    } catch (const Error& e) {
      throw Error(e.code(), "query " + entry.id + ": " + e.message());
    }
    spaces.push_back(enumerate_subplans(queries.back()));
    OracleOptions oracle = config.oracle;
    oracle.workers = config.workers;
    truths.push_back(true_cardinalities(spaces.back(), catalog, oracle, cache));
  }

  EstimatorConfig estimator_config = config.estimator;
  estimator_config.workers = config.workers;
  estimator_config.seed = config.seed;
  std::vector<std::unique_ptr<Estimator>> estimators;
  for (const auto& method : config.methods) estimators.push_back(build_estimator(method, catalog, estimator_config));

  report.queries.resize(queries.size());
  std::vector<std::vector<std::string>> violations(queries.size());
  parallel_for(queries.size(), config.workers, [&](std::size_t q) {
    const Query& query = queries[q];
    const CardinalityMap truth = floored(truths[q]);
    QueryResult& result = report.queries[q];
    result.id = query.id;
    result.sql = workload[q].sql;
    const PhysicalPlan best = recost(optimize(query, truth, config.cost), truth, config.cost);
    result.optimal_cost = best.cost();
    result.true_plan = format_plan(best);

    for (std::size_t m = 0; m < estimators.size(); ++m) {
      const Estimator& estimator = *estimators[m];
      MethodResult mr;
      mr.method = config.methods[m];
      const uint64_t seed = derive_seed(config.seed, mr.method + "/" + query.id);
      CardinalityMap raw;
      raw.parent = query.id;
      const auto start = std::chrono::steady_clock::now();
      for (const auto& entry : spaces[q].entries) {
        raw.values[entry.key()] = estimator.estimate(entry, derive_seed(seed, query.id + ":" + entry.key()));
      }
      mr.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      CardinalityMap estimated;
      estimated.parent = query.id;
      estimated.provenance = "estimated(" + mr.method + ")";
      std::vector<double> q_errors;
      for (const auto& entry : spaces[q].entries) {
        const std::string key = entry.key();
        SubPlanResult s;
        s.key = key;
        s.truth = truths[q].at(key);
        s.raw = raw.values.at(key);
        if (!std::isfinite(s.raw) || s.raw < 0.0) {
          fail(ErrorCode::kInvariantViolation,
               fmt::format("{} produced estimate {} for {}/{}", mr.method, s.raw, query.id, key));
        }
        s.estimate = floor_estimate(s.raw);
        const QError qe = q_error_checked(s.estimate, s.truth);
        s.q_error = qe.value;
        s.zero_truth = qe.zero_truth;
        if (mr.method == "pess_bound" && s.raw < s.truth) {
          violations[q].push_back(fmt::format("pess_bound underestimates {}/{}: {} < {}", query.id, key,
                                              s.raw, s.truth));
        }
        estimated.values[key] = s.estimate;
        q_errors.push_back(s.q_error);
        mr.subplans.push_back(std::move(s));
      }
      mr.q_error_median = percentile(q_errors, 50);
      const PhysicalPlan chosen = optimize(query, estimated, config.cost);
      mr.ppc = cost_plan(chosen, truth, config.cost);
      mr.p_error = mr.ppc / result.optimal_cost;
      mr.plan = format_plan(chosen);
      if (mr.p_error < 1.0 - 1e-12) {
        violations[q].push_back(fmt::format("{} on {}: P-Error {} below 1", mr.method, query.id, mr.p_error));
      }
      result.methods.push_back(std::move(mr));
    }
  });
  for (const auto& v : violations) report.violations.insert(report.violations.end(), v.begin(), v.end());

  report.summaries = summarize(report.queries, config.methods);
  for (std::size_t m = 0; m < estimators.size(); ++m) {
    report.summaries[m].build_seconds = estimators[m]->build_stats().build_seconds;
    report.summaries[m].model_bytes = estimators[m]->build_stats().model_bytes;
  }
  report.correlation = correlate(report.queries);
  return report;
}

std::vector<MethodSummary> summarize(const std::vector<QueryResult>& queries, const std::vector<std::string>& methods) {
  std::vector<MethodSummary> out;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodSummary s;
    s.method = methods[m];
    std::vector<double> q_errors, p_errors;
    double latency = 0.0;
    for (const auto& query : queries) {
      const MethodResult& mr = query.methods.at(m);
      for (const auto& sub : mr.subplans) q_errors.push_back(sub.q_error);
      p_errors.push_back(mr.p_error);
      latency += mr.latency_seconds;
    }
    s.q_error = percentiles_of(q_errors);
    s.p_error = percentiles_of(p_errors);
    s.mean_latency_seconds = queries.empty() ? 0.0 : latency / static_cast<double>(queries.size());
    out.push_back(std::move(s));
  }
  return out;
}

CorrelationAnalysis correlate(const std::vector<QueryResult>& queries) {
  CorrelationAnalysis out;
  std::vector<double> p, q, ratio;
  for (const auto& query : queries) {
    for (const auto& mr : query.methods) {
      p.push_back(mr.p_error);
      q.push_back(mr.q_error_median);
      ratio.push_back(mr.ppc / query.optimal_cost);
    }
  }
  out.points = p.size();
  auto safe = [](const std::vector<double>& xs, const std::vector<double>& ys) -> std::optional<double> {
    try {
      return pearson(xs, ys);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  out.p_error_vs_cost_ratio = safe(p, ratio);
  out.median_q_error_vs_cost_ratio = safe(q, ratio);
  return out;
}

nlohmann::json report_json(const BenchmarkReport& report) {
  using nlohmann::json;
  json j;
  j["seed"] = report.seed;
  j["methods"] = report.methods;
  j["cost_params"] = {{"seq_page_cost", report.cost.seq_page_cost},
                      {"cpu_tuple_cost", report.cost.cpu_tuple_cost},
                      {"cpu_operator_cost", report.cost.cpu_operator_cost},
                      {"sort_factor", report.cost.sort_factor},
                      {"rows_per_page", report.cost.rows_per_page},
                      {"hash_probe_factor", report.cost.hash_probe_factor}};
  json queries = json::array();
  for (const auto& q : report.queries) {
    json jq;
    jq["id"] = q.id;
    jq["sql"] = q.sql;
    jq["optimal_cost"] = q.optimal_cost;
    jq["true_plan"] = q.true_plan;
    json methods = json::object();
    for (const auto& mr : q.methods) {
      json subs = json::array();
      for (const auto& s : mr.subplans) {
        subs.push_back({{"key", s.key}, {"truth", s.truth}, {"raw", s.raw}, {"estimate", s.estimate},
                        {"q_error", s.q_error}, {"zero_truth", s.zero_truth}});
      }
      methods[mr.method] = {{"p_error", mr.p_error}, {"ppc", mr.ppc}, {"q_error_median", mr.q_error_median},
                            {"plan", mr.plan}, {"subplans", std::move(subs)}};
    }
    jq["methods"] = std::move(methods);
    queries.push_back(std::move(jq));
  }
  j["queries"] = std::move(queries);
  json summary = json::object();
  for (const auto& s : report.summaries) {
    summary[s.method] = {{"q_error", {{"p50", s.q_error.p50}, {"p90", s.q_error.p90}, {"p99", s.q_error.p99}}},
                         {"p_error", {{"p50", s.p_error.p50}, {"p90", s.p_error.p90}, {"p99", s.p_error.p99}}},
                         {"model_bytes", s.model_bytes}};
  }
  j["summary"] = std::move(summary);
  auto optional_number = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["correlation"] = {{"points", report.correlation.points},
                      {"p_error_vs_cost_ratio", optional_number(report.correlation.p_error_vs_cost_ratio)},
                      {"median_q_error_vs_cost_ratio",
                       optional_number(report.correlation.median_q_error_vs_cost_ratio)}};
  j["violations"] = report.violations;
  return j;
}

BenchmarkReport report_from_json(const nlohmann::json& j) {
  BenchmarkReport report;
  report.seed = j.at("seed").get<uint64_t>();
  report.methods = j.at("methods").get<std::vector<std::string>>();
  const auto& c = j.at("cost_params");
  report.cost = {c.at("seq_page_cost"), c.at("cpu_tuple_cost"), c.at("cpu_operator_cost"),
                 c.at("sort_factor"), c.at("rows_per_page"), c.at("hash_probe_factor")};
  for (const auto& jq : j.at("queries")) {
    QueryResult q;
    q.id = jq.at("id");
    q.sql = jq.at("sql");
    q.optimal_cost = jq.at("optimal_cost");
    q.true_plan = jq.at("true_plan");
    for (const auto& method : report.methods) {
      const auto& jm = jq.at("methods").at(method);
      MethodResult mr;
      mr.method = method;
      mr.p_error = jm.at("p_error");
      mr.ppc = jm.at("ppc");
      mr.q_error_median = jm.at("q_error_median");
      mr.plan = jm.at("plan");
      for (const auto& js : jm.at("subplans")) {
        mr.subplans.push_back({js.at("key"), js.at("truth"), js.at("raw"), js.at("estimate"), js.at("q_error"),
                               js.at("zero_truth")});
      }
      q.methods.push_back(std::move(mr));
    }
    report.queries.push_back(std::move(q));
  }
  report.summaries = summarize(report.queries, report.methods);
  for (auto& s : report.summaries) s.model_bytes = j.at("summary").at(s.method).at("model_bytes");
  report.correlation = correlate(report.queries);
  report.violations = j.at("violations").get<std::vector<std::string>>();
  return report;
}

nlohmann::json timings_json(const BenchmarkReport& report) {
  using nlohmann::json;
  json j;
  for (const auto& s : report.summaries) {
    j["methods"][s.method] = {{"build_seconds", s.build_seconds},
                              {"model_bytes", s.model_bytes},
                              {"mean_latency_seconds", s.mean_latency_seconds}};
  }
  for (const auto& q : report.queries) {
    for (const auto& mr : q.methods) j["queries"][q.id][mr.method] = mr.latency_seconds;
  }
  return j;
}

std::string report_csv(const BenchmarkReport& report) {
  std::string out = "query_id,method,subplans,p_error,ppc,optimal_cost,q_error_median,q_error_max,latency_seconds\n";
  for (const auto& q : report.queries) {
    for (const auto& mr : q.methods) {
      double q_max = 1.0;
      for (const auto& s : mr.subplans) q_max = std::max(q_max, s.q_error);
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_field(q.id), mr.method, mr.subplans.size(), mr.p_error,
                         mr.ppc, q.optimal_cost, mr.q_error_median, q_max, mr.latency_seconds);
    }
  }
  return out;
}

std::string report_text(const BenchmarkReport& report) {
  std::string out = fmt::format("{} queries, seed {}\n\n", report.queries.size(), report.seed);
  out += fmt::format("{:<12} {:>10} {:>10} {:>10} {:>9} {:>9} {:>9} {:>10} {:>12} {:>12}\n", "method", "q_p50",
                     "q_p90", "q_p99", "p_p50", "p_p90", "p_p99", "build_s", "model_bytes", "latency_ms");
  for (const auto& s : report.summaries) {
    out += fmt::format("{:<12} {:>10.3f} {:>10.3f} {:>10.3f} {:>9.4f} {:>9.4f} {:>9.4f} {:>10.3f} {:>12} {:>12.3f}\n",
                       s.method, s.q_error.p50, s.q_error.p90, s.q_error.p99, s.p_error.p50, s.p_error.p90,
                       s.p_error.p99, s.build_seconds, s.model_bytes, s.mean_latency_seconds * 1e3);
  }
  const auto& c = report.correlation;
  auto show = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string("n/a"); };
  out += fmt::format("\nPearson r vs true-cost ratio over {} points: P-Error {}, median Q-Error {}\n", c.points,
                     show(c.p_error_vs_cost_ratio), show(c.median_q_error_vs_cost_ratio));
  if (report.violations.empty()) {
    out += "invariants: ok\n";
  } else {
    out += fmt::format("invariants: {} violation(s)\n", report.violations.size());
    for (const auto& v : report.violations) out += "  " + v + "\n";
  }
  return out;
}

}  // namespace cardbench
