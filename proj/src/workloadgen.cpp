#include "cardbench/workloadgen.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <random>
#include <set>

#include "cardbench/error.hpp"
#include "cardbench/hash.hpp"
#include "cardbench/parallel.hpp"

namespace cardbench {

std::string_view template_shape_name(TemplateShape shape) {
  switch (shape) {
    case TemplateShape::kChain: return "chain";
    case TemplateShape::kStar: return "star";
    case TemplateShape::kMixed: return "mixed";
  }
  return "?";
}

TemplateShape classify_shape(const std::vector<std::string>& tables, const std::vector<JoinEdge>& edges) {
  std::map<std::string, std::size_t> degree;
  for (const auto& t : tables) degree[t] = 0;
  for (const auto& e : edges) {
    ++degree[e.left.table];
    ++degree[e.right.table];
  }
  std::size_t max_degree = 0;
  for (const auto& [t, d] : degree) max_degree = std::max(max_degree, d);
  if (max_degree <= 2) return TemplateShape::kChain;
  if (tables.size() >= 4 && max_degree == tables.size() - 1) return TemplateShape::kStar;
  return TemplateShape::kMixed;
}

namespace {

std::string digits_id(char prefix, std::size_t index, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(count).size());
  return fmt::format("{}{:0{}}", prefix, index, width);
}

}  // namespace

std::vector<JoinTemplate> all_join_trees(const Catalog& catalog, std::size_t max_tables, std::size_t cap) {
  if (max_tables < 2) fail(ErrorCode::kInvalidArgument, "templates need at least 2 tables");
  const auto& edges = catalog.join_graph().edges;
  using EdgeSet = std::vector<std::size_t>;
  auto tables_of = [&](const EdgeSet& set) {
    std::set<std::string> tables;
    for (const std::size_t e : set) {
      tables.insert(edges[e].left.table);
      tables.insert(edges[e].right.table);
    }
    return tables;
  };

  std::set<EdgeSet> level;
  for (std::size_t e = 0; e < edges.size(); ++e) level.insert({e});
  std::vector<EdgeSet> found(level.begin(), level.end());
  // A tree over k tables has k - 1 edges; grow by edges with exactly one endpoint inside.
  for (std::size_t size = 3; size <= max_tables && !level.empty(); ++size) {
    std::set<EdgeSet> next;
    for (const auto& tree : level) {
      const auto tables = tables_of(tree);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const bool l = tables.count(edges[e].left.table) > 0;
        const bool r = tables.count(edges[e].right.table) > 0;
        if (l == r) continue;
        EdgeSet grown = tree;
        grown.insert(std::upper_bound(grown.begin(), grown.end(), e), e);
        next.insert(std::move(grown));
        if (found.size() + next.size() > cap) {
          fail(ErrorCode::kResourceLimit, fmt::format("more than {} join trees", cap));
        }
      }
    }
    found.insert(found.end(), next.begin(), next.end());
    level = std::move(next);
  }

  std::vector<JoinTemplate> out;
  out.reserve(found.size());
  for (const auto& tree : found) {
    JoinTemplate t;
    const auto tables = tables_of(tree);
    t.tables.assign(tables.begin(), tables.end());
    for (const std::size_t e : tree) t.edges.push_back(edges[e]);
    std::sort(t.edges.begin(), t.edges.end(), [](const JoinEdge& a, const JoinEdge& b) { return a.str() < b.str(); });
    t.shape = classify_shape(t.tables, t.edges);
    out.push_back(std::move(t));
  }
  auto edge_texts = [](const JoinTemplate& t) {
    std::vector<std::string> texts;
    for (const auto& e : t.edges) texts.push_back(e.str());
    return texts;
  };
  std::sort(out.begin(), out.end(), [&](const JoinTemplate& a, const JoinTemplate& b) {
    if (a.tables.size() != b.tables.size()) return a.tables.size() < b.tables.size();
    return edge_texts(a) < edge_texts(b);
  });
  return out;
}

std::vector<JoinTemplate> enumerate_templates(const Catalog& catalog, std::size_t max_tables, std::size_t limit,
                                              uint64_t seed) {
  std::vector<JoinTemplate> trees = all_join_trees(catalog, max_tables);
  std::mt19937_64 rng(derive_seed(seed, "templates"));
  std::shuffle(trees.begin(), trees.end(), rng);

  std::vector<bool> keep(trees.size(), trees.size() <= limit);
  if (trees.size() > limit) {
    std::size_t kept = 0;
    // Shape quota first, then fill in shuffled order.
    for (const TemplateShape shape : {TemplateShape::kChain, TemplateShape::kStar, TemplateShape::kMixed}) {
      for (std::size_t i = 0; i < trees.size() && kept < limit; ++i) {
        if (trees[i].shape == shape) {
          keep[i] = true;
          ++kept;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < trees.size() && kept < limit; ++i) {
      if (!keep[i]) {
        keep[i] = true;
        ++kept;
      }
    }
  }
  std::vector<JoinTemplate> out;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (keep[i]) out.push_back(std::move(trees[i]));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = digits_id('t', i + 1, out.size());
  return out;
}

Query template_query(const JoinTemplate& tmpl, std::string id) {
  Query q;
  q.id = std::move(id);
  q.tables = tmpl.tables;
  q.join_edges = tmpl.edges;
  return q;
}

namespace {

struct ColumnProfile {
  const Column* column = nullptr;
  std::vector<double> sorted;                        // non-null values
  std::vector<std::pair<double, std::size_t>> freq;  // small categorical domains only
};

Region draw_region(const ColumnProfile& profile, double selectivity, std::mt19937_64& rng) {
  const auto n = profile.sorted.size();
  if (!profile.freq.empty()) {
    auto codes = profile.freq;
    std::shuffle(codes.begin(), codes.end(), rng);
    std::vector<double> chosen;
    std::size_t covered = 0;
    for (const auto& [code, count] : codes) {
      if (!chosen.empty() && static_cast<double>(covered) >= selectivity * static_cast<double>(n)) break;
      chosen.push_back(code);
      covered += count;
    }
    return Region::values(std::move(chosen));
  }
  const auto width = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(selectivity * static_cast<double>(n))), 1, n);
  const std::size_t start = std::uniform_int_distribution<std::size_t>(0, n - width)(rng);
  return Region::interval({profile.sorted[start], profile.sorted[start + width - 1], false, false});
}

}  // namespace

GeneratedWorkload generate_queries(const std::vector<JoinTemplate>& templates, const Catalog& catalog,
                                   const GenerationOptions& options) {
  if (options.per_template < 1 || options.per_template > 4) {
    fail(ErrorCode::kInvalidArgument, "per_template must be in [1, 4]");
  }
  if (!(options.min_selectivity > 0.0) || options.max_selectivity > 1.0 ||
      options.min_selectivity > options.max_selectivity) {
    fail(ErrorCode::kInvalidArgument, "selectivity range must lie in (0, 1]");
  }

  // Predicate candidates: non-join columns holding at least one value.
  std::map<std::string, std::vector<ColumnProfile>> profiles;
  for (const auto& tmpl : templates) {
    for (const auto& table_name : tmpl.tables) {
      if (profiles.count(table_name)) continue;
      auto& list = profiles[table_name];
      const TableData& table = catalog.table(table_name);
      for (const auto& column : table.columns()) {
        if (catalog.is_join_column({table_name, column.name()})) continue;
        ColumnProfile p;
        p.column = &column;
        for (std::size_t r = 0; r < column.size(); ++r) {
          if (!column.is_null(r)) p.sorted.push_back(column.value(r));
        }
        if (p.sorted.empty()) continue;
        std::sort(p.sorted.begin(), p.sorted.end());
        if (column.kind() == ColumnKind::kCategorical && column.meta().domain_size <= options.small_domain) {
          for (const double v : p.sorted) {
            if (p.freq.empty() || p.freq.back().first != v) p.freq.emplace_back(v, 0);
            ++p.freq.back().second;
          }
        }
        list.push_back(std::move(p));
      }
    }
  }

  const std::size_t total = templates.size() * options.per_template;
  GeneratedWorkload out;
  out.queries.resize(total);
  out.manifest.resize(total);
  parallel_for(total, options.workers, [&](std::size_t task) {
    const JoinTemplate& tmpl = templates[task / options.per_template];
    const std::size_t k = task % options.per_template;
    const std::string id = digits_id('q', task + 1, std::max<std::size_t>(total, 100));
    std::mt19937_64 rng(derive_seed(options.seed, fmt::format("{}/{}", tmpl.id, k)));
    std::uniform_real_distribution<double> selectivity(options.min_selectivity, options.max_selectivity);

    for (std::size_t attempt = 0; attempt <= options.retries; ++attempt) {
      Query query = template_query(tmpl, id);
      for (const auto& table : tmpl.tables) {
        const auto& candidates = profiles.at(table);
        const std::size_t most = std::min(options.max_predicate_columns, candidates.size());
        const std::size_t count = std::uniform_int_distribution<std::size_t>(0, most)(rng);
        std::vector<std::size_t> order(candidates.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(count);
        std::sort(order.begin(), order.end());
        for (const std::size_t c : order) {
          const double s = selectivity(rng);
          if (s >= 1.0) continue;
          query.predicates.push_back({table, candidates[c].column->name(), draw_region(candidates[c], s, rng)});
        }
      }
      std::sort(query.predicates.begin(), query.predicates.end(), [](const Predicate& a, const Predicate& b) {
        return std::tie(a.table, a.column) < std::tie(b.table, b.column);
      });
      const std::string sql = to_sql(query, catalog);
      const Query parsed = parse_query(sql, catalog, id);
      const TableMask full = parsed.tables.size() >= 32 ? ~TableMask{0}
                                                         : (TableMask{1} << parsed.tables.size()) - 1;
      uint64_t truth = 0;
      try {
        truth = execute_count(make_subplan(parsed, full), catalog, options.oracle);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kResourceLimit) throw;
        continue;
      }
      if (truth == 0) continue;
      out.queries[task] = {id, sql};
      out.manifest[task] = {id, tmpl.id, tmpl.shape, truth};
      return;
    }
    fail(ErrorCode::kGenerationExhausted,
         fmt::format("template {}: no query with a non-empty result after {} attempts", tmpl.id, options.retries + 1));
  });
  return out;
}

std::string format_manifest(const std::vector<ManifestRow>& rows) {
  std::string out = "query_id,template_id,shape,true_cardinality\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.query_id, r.template_id, template_shape_name(r.shape), r.true_cardinality);
  }
  return out;
}

}  // namespace cardbench
