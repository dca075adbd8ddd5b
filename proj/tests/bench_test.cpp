#include <gtest/gtest.h>

#include <cstdlib>

#include "cardbench/bench.hpp"
#include "cardbench/config.hpp"
#include "cardbench/error.hpp"
#include "cardbench/synthetic.hpp"
#include "cardbench/workloadgen.hpp"

namespace cardbench {
namespace {

struct Fixture {
  Catalog catalog = make_stats_like_catalog({.seed = 5, .scale = 0.2});
  std::vector<WorkloadEntry> workload;

  Fixture() {
    GenerationOptions options;
    options.per_template = 2;
    options.seed = 5;
    workload = generate_queries(enumerate_templates(catalog, 4, 5, 5), catalog, options).queries;
  }
};

BenchConfig small_config(std::vector<std::string> methods) {
  BenchConfig config;
  config.methods = std::move(methods);
  config.estimator.sample_size = 300;
  config.estimator.wj_walks = 300;
  config.seed = 11;
  return config;
}

TEST(BenchTest, TrueCardinalitiesScorePerfectly) {
  const Fixture f;
  const BenchmarkReport report = run_benchmark(f.catalog, f.workload, small_config({"true"}));
  EXPECT_TRUE(report.violations.empty());
  ASSERT_EQ(report.queries.size(), f.workload.size());
  for (const auto& q : report.queries) {
    EXPECT_EQ(q.methods[0].p_error, 1.0);
    for (const auto& sp : q.methods[0].subplans) EXPECT_EQ(sp.q_error, 1.0);
  }
}

TEST(BenchTest, EveryMethodKeepsThePErrorFloor) {
  const Fixture f;
  const BenchmarkReport report = run_benchmark(
      f.catalog, f.workload, small_config({"indep_hist", "uni_sample", "wj_sample", "pess_bound", "chow_liu"}));
  EXPECT_TRUE(report.violations.empty());
  for (const auto& q : report.queries) {
    for (const auto& m : q.methods) EXPECT_GE(m.p_error, 1.0 - 1e-12) << q.id << " " << m.method;
  }
  ASSERT_EQ(report.summaries.size(), 5u);
}

TEST(BenchTest, JsonRoundTripRecomputesAggregates) {
  const Fixture f;
  const BenchmarkReport report = run_benchmark(f.catalog, f.workload, small_config({"indep_hist", "pess_bound"}));
  const nlohmann::json json = report_json(report);
  const BenchmarkReport back = report_from_json(json);
  EXPECT_EQ(report_json(back).dump(), json.dump());
  const auto summaries = summarize(back.queries, back.methods);
  ASSERT_EQ(summaries.size(), 2u);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    EXPECT_EQ(summaries[i].q_error.p50, report.summaries[i].q_error.p50);
    EXPECT_EQ(summaries[i].p_error.p99, report.summaries[i].p_error.p99);
  }
  EXPECT_EQ(correlate(back.queries).points, report.correlation.points);
}

TEST(BenchTest, WorkerCountDoesNotChangeTheReport) {
  const Fixture f;
  BenchConfig one = small_config({"uni_sample", "wj_sample", "chow_liu"});
  BenchConfig four = one;
  four.workers = 4;
  four.estimator.workers = 4;
  EXPECT_EQ(report_json(run_benchmark(f.catalog, f.workload, one)).dump(),
            report_json(run_benchmark(f.catalog, f.workload, four)).dump());
}

TEST(BenchTest, TextAndCsvOutputs) {
  const Fixture f;
  const BenchmarkReport report = run_benchmark(f.catalog, f.workload, small_config({"true", "indep_hist"}));
  const std::string csv = report_csv(report);
  EXPECT_EQ(csv.rfind("query_id", 0), 0u);
  EXPECT_NE(report_text(report).find("indep_hist"), std::string::npos);
  EXPECT_TRUE(timings_json(report).contains("methods"));
}

TEST(BenchTest, UnknownMethodIsRejected) {
  const Fixture f;
  EXPECT_THROW(run_benchmark(f.catalog, f.workload, small_config({"nope"})), Error);
}

TEST(ConfigTest, SectionsAndQuotes) {
  const auto entries = parse_config_text(
      "# comment\n[estimator]\nhist_buckets = 50\nwj_root = \"users\"\n[cost]\ncpu_tuple_cost = 0.02\n"
      "[bench]\nseed = 9\nmethods = indep_hist, pess_bound\n");
  EXPECT_EQ(entries.at("estimator.wj_root"), "users");
  BenchConfig config;
  apply_config(entries, config);
  EXPECT_EQ(config.estimator.hist_buckets, 50u);
  EXPECT_EQ(config.estimator.wj_root, "users");
  EXPECT_DOUBLE_EQ(config.cost.cpu_tuple_cost, 0.02);
  EXPECT_EQ(config.seed, 9u);
  EXPECT_EQ(config.methods, (std::vector<std::string>{"indep_hist", "pess_bound"}));
}

TEST(ConfigTest, UnknownKeysAndBadValuesAreErrors) {
  BenchConfig config;
  EXPECT_THROW(apply_config({{"estimator.nope", "1"}}, config), Error);
  EXPECT_THROW(apply_config({{"cost.cpu_tuple_cost", "abc"}}, config), Error);
  EXPECT_THROW(parse_config_text("[estimator\n"), Error);
}

TEST(ConfigTest, EnvironmentOverrides) {
  setenv("CARDBENCH_SEED", "77", 1);
  setenv("CARDBENCH_WORKERS", "3", 1);
  BenchConfig config;
  apply_environment(config);
  unsetenv("CARDBENCH_SEED");
  unsetenv("CARDBENCH_WORKERS");
  EXPECT_EQ(config.seed, 77u);
  EXPECT_EQ(config.workers, 3u);
}

}  // namespace
}  // namespace cardbench
