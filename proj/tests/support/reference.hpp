#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cardbench/catalog.hpp"
#include "cardbench/estimators/chow_liu.hpp"
#include "cardbench/planner.hpp"
#include "cardbench/query.hpp"

namespace cardbench::testing {

// Random catalog: tables t0..t{n-1}, each with key columns k0, k1, a small categorical column `cat`
// and a continuous column `num`. Join edges form a random tree over the tables (plus `extra_edges`
// edges that may close cycles). Keys draw from small domains so joins are rarely empty.
struct RandomCatalogSpec {
  std::size_t tables = 3;
  std::size_t max_rows = 1000;
  std::size_t extra_edges = 0;
  double null_rate = 0.05;
};

Catalog random_catalog(std::mt19937_64& rng, const RandomCatalogSpec& spec);

// Random connected acyclic query over at most `max_tables` tables with random predicates.
Query random_query(std::mt19937_64& rng, const Catalog& catalog, std::size_t max_tables, const std::string& id);

// Region membership evaluated from the raw interval bounds or value list.
bool reference_contains(const Region& region, double v);

// Result size by nested loops over raw rows: tables are bound one at a time and every predicate and
// join edge is checked as soon as its columns are bound.
uint64_t nested_loop_count(const Catalog& catalog, const SubPlanQuery& subplan);

// Keys of all table subsets whose induced join graph is connected, found by testing every mask.
std::vector<std::string> brute_force_connected_keys(const Query& query);

// Every bushy plan with every operator assignment over the query's connected sub-plans.
std::vector<PhysicalPlan> all_plans(const Query& query);

double brute_force_min_cost(const Query& query, const CardinalityMap& cards, const CostParams& params);

// Mutual information between two state sequences, in nats.
double mutual_information(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y);

// Edge set {(min, max)} of a maximum-weight spanning tree found by trying every Pruefer sequence.
// `unique` is false when another tree reaches the same weight within 1e-12.
struct TreeSearch {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  double weight = 0.0;
  bool unique = true;
};
TreeSearch brute_force_max_tree(const std::vector<std::vector<double>>& weights);

// Full join-tree CardinalityMap for a query with every value drawn log-uniformly from [1, 10^6].
CardinalityMap random_cards(std::mt19937_64& rng, const Query& query);

}  // namespace cardbench::testing
