#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cardbench/catalog.hpp"
#include "cardbench/oracle.hpp"
#include "cardbench/query.hpp"

namespace cardbench {

enum class TemplateShape { kChain, kStar, kMixed };

std::string_view template_shape_name(TemplateShape shape);

// Connected acyclic join pattern over at least two tables.
struct JoinTemplate {
  std::string id;
  std::vector<std::string> tables;  // sorted
  std::vector<JoinEdge> edges;      // sorted by text
  TemplateShape shape = TemplateShape::kChain;
};

// Path: every table has degree <= 2. Star: one hub, all other tables are leaves, at least 3 leaves.
TemplateShape classify_shape(const std::vector<std::string>& tables, const std::vector<JoinEdge>& edges);

// Every join tree of the catalog's join graph with 2..max_tables tables, in canonical order
// (size, then edge texts). Throws ResourceLimit beyond `cap` trees.
std::vector<JoinTemplate> all_join_trees(const Catalog& catalog, std::size_t max_tables,
                                         std::size_t cap = 1'000'000);

// Seeded selection of `limit` trees that keeps one chain, one star and one mixed tree when the graph
// has them. Ids are t01, t02, ... in output order.
std::vector<JoinTemplate> enumerate_templates(const Catalog& catalog, std::size_t max_tables, std::size_t limit,
                                              uint64_t seed);

struct GenerationOptions {
  std::size_t per_template = 2;  // 1..4
  double min_selectivity = 0.05;
  double max_selectivity = 1.0;
  std::size_t max_predicate_columns = 2;  // per table
  std::size_t small_domain = 20;          // categorical columns up to this size get IN lists
  std::size_t retries = 50;
  uint64_t seed = 0;
  std::size_t workers = 1;
  OracleOptions oracle;
};

struct ManifestRow {
  std::string query_id;
  std::string template_id;
  TemplateShape shape = TemplateShape::kChain;
  uint64_t true_cardinality = 0;
};

struct GeneratedWorkload {
  std::vector<WorkloadEntry> queries;
  std::vector<ManifestRow> manifest;
};

// Instantiates predicates for each template. Every emitted query has true cardinality >= 1; a
// template that cannot reach that within the retry budget raises GenerationExhausted.
GeneratedWorkload generate_queries(const std::vector<JoinTemplate>& templates, const Catalog& catalog,
                                   const GenerationOptions& options);

std::string format_manifest(const std::vector<ManifestRow>& rows);

// Query with the template's tables and edges and no predicates.
Query template_query(const JoinTemplate& tmpl, std::string id);

}  // namespace cardbench
