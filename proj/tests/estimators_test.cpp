#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cardbench/error.hpp"
#include "cardbench/estimator.hpp"
#include "cardbench/estimators/chow_liu.hpp"
#include "cardbench/estimators/histogram.hpp"
#include "cardbench/estimators/pessimistic.hpp"
#include "cardbench/estimators/sampling.hpp"
#include "cardbench/estimators/wander_join.hpp"
#include "cardbench/hash.hpp"
#include "cardbench/oracle.hpp"
#include "cardbench/synthetic.hpp"
#include "support/reference.hpp"

namespace cardbench {
namespace {

using Cells = std::vector<std::optional<double>>;

Column continuous(const std::string& name, const Cells& cells) {
  return Column::from_numeric(name, ColumnKind::kContinuous, cells);
}
Column categorical(const std::string& name, const Cells& cells) {
  return Column::from_numeric(name, ColumnKind::kCategorical, cells);
}

Catalog single_table(std::vector<Column> columns) {
  Catalog catalog;
  TableData t("t");
  for (auto& c : columns) t.add_column(std::move(c));
  catalog.add_table(std::move(t));
  return catalog;
}

// A: 100 rows, B: 50 rows, join key uniform over 10 values on both sides.
Catalog uniform_join() {
  Cells a, b;
  for (int i = 0; i < 100; ++i) a.push_back(static_cast<double>(i % 10));
  for (int i = 0; i < 50; ++i) b.push_back(static_cast<double>(i % 10));
  Catalog catalog;
  TableData ta("a"), tb("b");
  ta.add_column(continuous("k", a));
  tb.add_column(continuous("k", b));
  catalog.add_table(ta);
  catalog.add_table(tb);
  catalog.add_join({{"a", "k"}, {"b", "k"}, KeyRole::kPkFk});
  return catalog;
}

SubPlanQuery full_subplan(const std::string& sql, const Catalog& catalog) {
  const Query q = parse_query(sql, catalog);
  return make_subplan(q, static_cast<TableMask>((1u << q.tables.size()) - 1));
}

TEST(HistogramTest, UniformRangeWithinOneBucketMass) {
  Cells x;
  for (int i = 0; i < 1000; ++i) x.push_back(static_cast<double>(i % 100 + 1));
  const Catalog catalog = single_table({continuous("x", x)});
  const auto est = HistogramEstimator::build(catalog, 10, 10);
  const double e = est->estimate(full_subplan("SELECT COUNT(*) FROM t WHERE t.x <= 50", catalog), 0);
  EXPECT_NEAR(e, 500.0, 100.0);
}

TEST(HistogramTest, JoinUniformity) {
  const Catalog catalog = uniform_join();
  const auto est = HistogramEstimator::build(catalog, 100, 10);
  const SubPlanQuery sp = full_subplan("SELECT COUNT(*) FROM a, b WHERE a.k = b.k", catalog);
  EXPECT_DOUBLE_EQ(est->estimate(sp, 0), 500.0);
  EXPECT_EQ(execute_count(sp, catalog), 500u);
}

TEST(HistogramTest, McvCapturesFrequentValues) {
  Cells x;
  for (int i = 0; i < 900; ++i) x.push_back(7.0);
  for (int i = 0; i < 100; ++i) x.push_back(static_cast<double>(i));
  x.push_back(std::nullopt);
  const ColumnHistogram h = build_column_histogram(continuous("x", x), 10, 3);
  ASSERT_FALSE(h.mcv_values.empty());
  EXPECT_NEAR(h.null_frac, 1.0 / 1001.0, 1e-12);
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-9);
  EXPECT_NEAR(h.selectivity(Region::values({7.0})), 901.0 / 1001.0, 1e-9);
}

TEST(HistogramTest, CategoricalValueSetSelectivity) {
  Cells c;
  for (int i = 0; i < 600; ++i) c.push_back(static_cast<double>(i % 6));
  const ColumnHistogram h = build_column_histogram(categorical("c", c), 4, 2);
  EXPECT_NEAR(h.selectivity(Region::values({0.0, 3.0, 5.0})), 0.5, 1e-9);
}

TEST(EstimatorTest, NoPredicateSingleTableIsExactForEveryMethod) {
  const Catalog catalog = make_stats_like_catalog({.seed = 4, .scale = 0.2});
  EstimatorConfig config;
  config.sample_size = 100;
  config.wj_walks = 50;
  for (const auto method : kMethodNames) {
    const auto est = build_estimator(method, catalog, config);
    for (const auto& [name, table] : catalog.tables()) {
      const SubPlanQuery sp = full_subplan("SELECT COUNT(*) FROM " + name, catalog);
      EXPECT_DOUBLE_EQ(est->estimate(sp, 17), static_cast<double>(table.rows())) << method << " " << name;
    }
  }
}

TEST(EstimatorTest, UnknownMethodAndBadSettings) {
  const Catalog catalog = uniform_join();
  try {
    build_estimator("magic", catalog, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedMethod);
  }
  EstimatorConfig config;
  config.hist_buckets = 0;
  try {
    build_estimator("indep_hist", catalog, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(EstimatorTest, ModelsRoundTripThroughFiles) {
  const Catalog catalog = make_stats_like_catalog({.seed = 6, .scale = 0.2});
  const Query q = parse_query(
      "SELECT COUNT(*) FROM users, posts, comments WHERE users.id = posts.owner_user_id AND "
      "posts.id = comments.post_id AND posts.score >= 2 AND users.reputation <= 500",
      catalog, "q");
  const SubPlanSpace space = enumerate_subplans(q);
  EstimatorConfig config;
  config.sample_size = 200;
  config.wj_walks = 300;
  for (const auto method : kMethodNames) {
    const auto est = build_estimator(method, catalog, config);
    std::stringstream file;
    save_estimator(*est, catalog, file);
    const auto loaded = load_estimator(file, catalog);
    EXPECT_EQ(loaded->name(), method);
    EXPECT_EQ(estimate_space(*loaded, space, 9).values, estimate_space(*est, space, 9).values) << method;
    if (method != "true" && method != "pess_bound" && method != "uni_sample") EXPECT_GT(est->build_stats().model_bytes, 0u);
  }
}

TEST(EstimatorTest, ModelFromAnotherCatalogIsRejected) {
  const Catalog a = make_stats_like_catalog({.seed = 1, .scale = 0.1});
  const Catalog b = make_stats_like_catalog({.seed = 2, .scale = 0.1});
  std::stringstream file;
  save_estimator(*build_estimator("indep_hist", a, {}), a, file);
  EXPECT_THROW(load_estimator(file, b), Error);
  std::stringstream garbage("not a model");
  EXPECT_THROW(load_estimator(garbage, a), Error);
}

TEST(EstimatorTest, EstimateSpaceFloorsAndLabels) {
  const Catalog catalog = uniform_join();
  const auto est = build_estimator("pess_bound", catalog, {});
  const Query q = parse_query("SELECT COUNT(*) FROM a, b WHERE a.k = b.k AND a.k > 100", catalog, "q");
  const CardinalityMap m = estimate_space(*est, enumerate_subplans(q), 1);
  EXPECT_EQ(m.provenance, "estimated(pess_bound)");
  EXPECT_EQ(m.values.size(), 3u);
  EXPECT_DOUBLE_EQ(m.at("a"), 1.0);
  EXPECT_DOUBLE_EQ(m.at("a|b"), 1.0);
}

TEST(SamplingTest, PredicateMatchingEverythingIsExact) {
  Cells x;
  for (int i = 0; i < 20'000; ++i) x.push_back(static_cast<double>(i));
  const Catalog catalog = single_table({continuous("x", x)});
  const auto est = SamplingEstimator::build(catalog, 1000);
  EXPECT_DOUBLE_EQ(est->estimate(full_subplan("SELECT COUNT(*) FROM t WHERE t.x >= 0", catalog), 3), 20'000.0);
}

TEST(SamplingTest, HalfSelectivityConcentrates) {
  Cells x;
  for (int i = 0; i < 20'000; ++i) x.push_back(static_cast<double>(i % 2));
  const Catalog catalog = single_table({continuous("x", x)});
  const auto est = SamplingEstimator::build(catalog, 10'000);
  const SubPlanQuery sp = full_subplan("SELECT COUNT(*) FROM t WHERE t.x <= 0", catalog);
  const double bound = 3.0 * std::sqrt(0.25 / 10'000.0);
  int within = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    within += std::abs(est->selectivity(sp, "t", seed) - 0.5) / 0.5 <= bound / 0.5 ? 1 : 0;
  }
  EXPECT_GE(within, 97);
}

TEST(SamplingTest, ZeroMatchesFloorToOneRow) {
  Cells x;
  for (int i = 0; i < 20'000; ++i) x.push_back(i == 0 ? 1.0 : 0.0);
  const Catalog catalog = single_table({continuous("x", x)});
  const auto est = SamplingEstimator::build(catalog, 10);
  const double raw = est->estimate(full_subplan("SELECT COUNT(*) FROM t WHERE t.x >= 1", catalog), 0);
  EXPECT_DOUBLE_EQ(raw, 0.0);
  EXPECT_DOUBLE_EQ(floor_estimate(raw), 1.0);
}

TEST(WanderJoinTest, KeysWithoutMatchesGiveZero) {
  Catalog catalog;
  TableData a("a"), b("b");
  a.add_column(continuous("k", {1.0, 2.0}));
  b.add_column(continuous("k", {3.0, 4.0}));
  catalog.add_table(a);
  catalog.add_table(b);
  catalog.add_join({{"a", "k"}, {"b", "k"}, KeyRole::kPkFk});
  const auto est = WanderJoinEstimator::build(catalog, 100, "");
  EXPECT_DOUBLE_EQ(est->estimate(full_subplan("SELECT COUNT(*) FROM a, b WHERE a.k = b.k", catalog), 1), 0.0);
}

TEST(WanderJoinTest, ReplicateMeanIsNearTruth) {
  const Catalog catalog = make_stats_like_catalog({.seed = 8, .scale = 0.2});
  const SubPlanQuery sp = full_subplan(
      "SELECT COUNT(*) FROM users, posts WHERE users.id = posts.owner_user_id AND posts.score >= 1", catalog);
  const double truth = static_cast<double>(execute_count(sp, catalog));
  const auto est = WanderJoinEstimator::build(catalog, 50, "");
  const int replicates = 300;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < replicates; ++r) {
    const double e = est->estimate(sp, derive_seed(99, std::to_string(r)));
    sum += e;
    sq += e * e;
  }
  const double mean = sum / replicates;
  const double sd = std::sqrt((sq - replicates * mean * mean) / (replicates - 1));
  EXPECT_LE(std::abs(mean - truth), 3.0 * sd / std::sqrt(double(replicates)));
}

TEST(WanderJoinTest, ConfiguredRootIsUsedWhenPresent) {
  const Catalog catalog = uniform_join();
  const SubPlanQuery sp = full_subplan("SELECT COUNT(*) FROM a, b WHERE a.k = b.k", catalog);
  EXPECT_EQ(WanderJoinEstimator::build(catalog, 10, "")->choose_root(sp), "b");
  EXPECT_EQ(WanderJoinEstimator::build(catalog, 10, "a")->choose_root(sp), "a");
}

TEST(PessimisticTest, PrimaryKeyToPrimaryKeyIsTheSmallerSide) {
  Cells a, b;
  for (int i = 0; i < 40; ++i) a.push_back(static_cast<double>(i));
  for (int i = 0; i < 25; ++i) b.push_back(static_cast<double>(i));
  Catalog catalog;
  TableData ta("a"), tb("b");
  ta.add_column(continuous("k", a));
  tb.add_column(continuous("k", b));
  catalog.add_table(ta);
  catalog.add_table(tb);
  catalog.add_join({{"a", "k"}, {"b", "k"}, KeyRole::kPkFk});
  const PessimisticEstimator est(catalog);
  const SubPlanQuery sp = full_subplan("SELECT COUNT(*) FROM a, b WHERE a.k = b.k AND a.k <= 29", catalog);
  EXPECT_DOUBLE_EQ(est.estimate(sp, 0), 25.0);
  EXPECT_EQ(execute_count(sp, catalog), 25u);
}

TEST(PessimisticTest, NeverBelowTruthOnRandomInstances) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const Catalog catalog = testing::random_catalog(rng, {.tables = 4, .max_rows = 60});
    const Query q = testing::random_query(rng, catalog, 4, "q");
    const PessimisticEstimator est(catalog);
    for (const auto& sp : enumerate_subplans(q).entries) {
      EXPECT_GE(est.estimate(sp, 0), static_cast<double>(execute_count(sp, catalog))) << to_sql(q, catalog);
    }
  }
}

// A1 uniform over 8 values, A2 independent noise, A3 a copy of A1.
Catalog copy_column_table() {
  std::mt19937_64 rng(3);
  Cells a1, a2, a3;
  for (int i = 0; i < 4000; ++i) {
    const double v = static_cast<double>(std::uniform_int_distribution<int>(1, 8)(rng));
    a1.push_back(v);
    a2.push_back(static_cast<double>(std::uniform_int_distribution<int>(1, 8)(rng)));
    a3.push_back(v);
  }
  return single_table({categorical("a1", a1), categorical("a2", a2), categorical("a3", a3)});
}

TEST(ChowLiuTest, CopiedColumnIsATreeEdge) {
  const Catalog catalog = copy_column_table();
  const auto est = ChowLiuEstimator::build(catalog, 64, {});
  const ChowLiuTable& model = est->table_model("t");
  ASSERT_EQ(model.attributes.size(), 3u);
  EXPECT_TRUE((model.parent[2] && *model.parent[2] == 0) || (model.parent[0] && *model.parent[0] == 2));
  // The copy carries the full entropy of A1; noise carries almost nothing.
  EXPECT_GT(model.mi(0, 2), 10 * model.mi(0, 1));
}

TEST(ChowLiuTest, CorrelationIsCapturedIndependenceIsMultiplied) {
  const Catalog catalog = copy_column_table();
  const auto est = ChowLiuEstimator::build(catalog, 64, {});
  const auto truth = [&](const std::string& sql) {
    return static_cast<double>(execute_count(full_subplan(sql, catalog), catalog));
  };
  const std::string copy = "SELECT COUNT(*) FROM t WHERE t.a1 <= 4 AND t.a3 <= 4";
  const std::string indep = "SELECT COUNT(*) FROM t WHERE t.a1 <= 4 AND t.a2 <= 4";
  EXPECT_NEAR(est->estimate(full_subplan(copy, catalog), 0), truth(copy), 1e-6 * truth(copy));
  EXPECT_NEAR(est->estimate(full_subplan(indep, catalog), 0), truth(indep), 0.1 * truth(indep));
}

TEST(ChowLiuTest, EmptyTableAndExcludedColumns) {
  const Catalog empty = single_table({continuous("x", {})});
  try {
    ChowLiuEstimator::build(empty, 64, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
  const Catalog catalog = copy_column_table();
  const auto est = ChowLiuEstimator::build(catalog, 64, {{"t", "a2"}});
  try {
    est->estimate(full_subplan("SELECT COUNT(*) FROM t WHERE t.a2 <= 3", catalog), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnmodeledColumn);
  }
}

TEST(ChowLiuTest, MaxSpanningTreePrefersHeavyEdges) {
  const std::vector<std::vector<double>> w{{0, 5, 1, 1}, {5, 0, 4, 1}, {1, 4, 0, 3}, {1, 1, 3, 0}};
  const auto parent = max_spanning_tree(w);
  ASSERT_EQ(parent.size(), 4u);
  EXPECT_FALSE(parent[0]);
  EXPECT_EQ(parent[1], 0u);
  EXPECT_EQ(parent[2], 1u);
  EXPECT_EQ(parent[3], 2u);
}

TEST(ChowLiuTest, FanoutExpectationMatchesJoinSize) {
  const Catalog catalog = uniform_join();
  const auto est = ChowLiuEstimator::build(catalog, 64, {});
  const SubPlanQuery sp = full_subplan("SELECT COUNT(*) FROM a, b WHERE a.k = b.k", catalog);
  EXPECT_NEAR(est->estimate(sp, 0), 500.0, 1e-9);
}

}  // namespace
}  // namespace cardbench
