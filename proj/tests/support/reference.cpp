#include "support/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "cardbench/error.hpp"

namespace cardbench::testing {

Catalog random_catalog(std::mt19937_64& rng, const RandomCatalogSpec& spec) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double domains[] = {3, 10, 40, 200};
  const double domain = domains[std::uniform_int_distribution<int>(0, 3)(rng)];
  Catalog catalog;
  for (std::size_t t = 0; t < spec.tables; ++t) {
    const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, spec.max_rows)(rng);
    const bool skewed = unit(rng) < 0.5;
    auto key = [&]() -> std::optional<double> {
      if (unit(rng) < spec.null_rate) return std::nullopt;
      const double u = skewed ? std::pow(unit(rng), 3.0) : unit(rng);
      return std::floor(u * domain) + 1.0;
    };
    std::vector<std::optional<double>> k0, k1, num;
    std::vector<std::optional<std::string>> cat;
    const char* labels[] = {"ash", "birch", "cedar", "elm", "fir", "oak"};
    for (std::size_t r = 0; r < rows; ++r) {
      k0.push_back(key());
      k1.push_back(key());
      cat.push_back(unit(rng) < spec.null_rate ? std::nullopt
                                               : std::optional<std::string>(labels[std::uniform_int_distribution<int>(0, 5)(rng)]));
      num.push_back(unit(rng) < spec.null_rate ? std::nullopt
                                               : std::optional<double>(std::round(std::normal_distribution<double>(50, 20)(rng) * 2) / 2));
    }
    TableData table("t" + std::to_string(t));
    table.add_column(Column::from_numeric("k0", ColumnKind::kContinuous, k0));
    table.add_column(Column::from_numeric("k1", ColumnKind::kContinuous, k1));
    table.add_column(Column::from_text("cat", ColumnKind::kCategorical, cat));
    table.add_column(Column::from_numeric("num", ColumnKind::kContinuous, num));
    catalog.add_table(std::move(table));
  }
  auto key_column = [&] { return std::string(unit(rng) < 0.5 ? "k0" : "k1"); };
  auto role = [&] { return unit(rng) < 0.5 ? KeyRole::kPkFk : KeyRole::kFkFk; };
  for (std::size_t t = 1; t < spec.tables; ++t) {
    const std::size_t parent = std::uniform_int_distribution<std::size_t>(0, t - 1)(rng);
    catalog.add_join({{"t" + std::to_string(parent), key_column()}, {"t" + std::to_string(t), key_column()}, role()});
  }
  for (std::size_t e = 0; e < spec.extra_edges && spec.tables > 1; ++e) {
    const auto a = std::uniform_int_distribution<std::size_t>(0, spec.tables - 1)(rng);
    const auto b = std::uniform_int_distribution<std::size_t>(0, spec.tables - 1)(rng);
    if (a == b) continue;
    try {
      catalog.add_join({{"t" + std::to_string(a), key_column()}, {"t" + std::to_string(b), key_column()}, role()});
    } catch (const Error&) {
      // duplicate edge
    }
  }
  return catalog;
}

Query random_query(std::mt19937_64& rng, const Catalog& catalog, std::size_t max_tables, const std::string& id) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& graph = catalog.join_graph();
  std::vector<std::string> names;
  for (const auto& [name, table] : catalog.tables()) names.push_back(name);
  const std::size_t target = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, max_tables))(rng);

  std::set<std::string> chosen{names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)]};
  std::vector<JoinEdge> edges;
  while (chosen.size() < target) {
    std::vector<const JoinEdge*> frontier;
    for (const auto& e : graph.edges) {
      if ((chosen.count(e.left.table) > 0) != (chosen.count(e.right.table) > 0)) frontier.push_back(&e);
    }
    if (frontier.empty()) break;
    const JoinEdge* e = frontier[std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng)];
    chosen.insert(e->left.table);
    chosen.insert(e->right.table);
    edges.push_back(*e);
  }

  Query q;
  q.id = id;
  q.tables.assign(chosen.begin(), chosen.end());
  std::sort(edges.begin(), edges.end(), [](const JoinEdge& a, const JoinEdge& b) { return a.str() < b.str(); });
  q.join_edges = edges;
  for (const auto& table : q.tables) {
    const TableData& data = catalog.table(table);
    if (unit(rng) < 0.5) {
      const auto& dict = data.column("cat").dictionary();
      if (dict.size() > 0) {
        if (unit(rng) < 0.5) {
          std::vector<double> codes;
          for (std::size_t c = 0; c < dict.size(); ++c) {
            if (unit(rng) < 0.4) codes.push_back(static_cast<double>(c));
          }
          if (codes.empty()) codes.push_back(0.0);
          q.predicates.push_back({table, "cat", Region::values(codes)});
        } else {
          const auto lo = std::uniform_int_distribution<std::size_t>(0, dict.size() - 1)(rng);
          const auto hi = std::uniform_int_distribution<std::size_t>(lo, dict.size() - 1)(rng);
          q.predicates.push_back({table, "cat", Region::interval({double(lo), double(hi), false, false})});
        }
      }
    }
    if (unit(rng) < 0.4) {
      const double a = std::round(std::normal_distribution<double>(50, 25)(rng));
      const double b = a + std::round(unit(rng) * 60);
      q.predicates.push_back({table, "num", Region::interval({a, b, unit(rng) < 0.3, unit(rng) < 0.3})});
    }
    if (unit(rng) < 0.15) {
      const double v = std::floor(unit(rng) * 20) + 1;
      q.predicates.push_back({table, "k0", Region::interval({1, v, false, false})});
    }
  }
  std::sort(q.predicates.begin(), q.predicates.end(), [](const Predicate& a, const Predicate& b) {
    return std::tie(a.table, a.column) < std::tie(b.table, b.column);
  });
  return parse_query(to_sql(q, catalog), catalog, id);
}

bool reference_contains(const Region& region, double v) {
  if (!region.is_interval()) {
    for (const double x : region.value_set()) {
      if (x == v) return true;
    }
    return false;
  }
  const Interval& iv = region.bounds();
  const bool above = iv.lo_open ? v > iv.lo : v >= iv.lo;
  const bool below = iv.hi_open ? v < iv.hi : v <= iv.hi;
  return above && below;
}

uint64_t nested_loop_count(const Catalog& catalog, const SubPlanQuery& subplan) {
  const std::size_t n = subplan.tables.size();
  // Bind tables in breadth-first order so each one joins something already bound.
  std::vector<std::string> order{subplan.tables.front()};
  while (order.size() < n) {
    for (const auto& e : subplan.join_edges) {
      const bool l = std::find(order.begin(), order.end(), e.left.table) != order.end();
      const bool r = std::find(order.begin(), order.end(), e.right.table) != order.end();
      if (l != r) order.push_back(l ? e.right.table : e.left.table);
    }
  }
  std::vector<std::vector<std::size_t>> candidates(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TableData& table = catalog.table(order[i]);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      bool ok = true;
      for (const auto& p : subplan.predicates) {
        if (p.table != order[i]) continue;
        const Column& c = table.column(p.column);
        if (c.is_null(r) || !reference_contains(p.region, c.value(r))) ok = false;
      }
      if (ok) candidates[i].push_back(r);
    }
  }
  // Edges checked when table i binds: the other endpoint was bound earlier.
  std::vector<std::vector<std::pair<const JoinEdge*, std::size_t>>> checks(n);
  for (const auto& e : subplan.join_edges) {
    const auto li = static_cast<std::size_t>(std::find(order.begin(), order.end(), e.left.table) - order.begin());
    const auto ri = static_cast<std::size_t>(std::find(order.begin(), order.end(), e.right.table) - order.begin());
    checks[std::max(li, ri)].emplace_back(&e, std::min(li, ri));
  }
  std::vector<std::size_t> bound(n);
  std::function<uint64_t(std::size_t)> bind = [&](std::size_t i) -> uint64_t {
    if (i == n) return 1;
    uint64_t total = 0;
    for (const std::size_t r : candidates[i]) {
      bool ok = true;
      for (const auto& [e, other] : checks[i]) {
        const ColumnRef& mine = e->side(order[i]);
        const ColumnRef& theirs = e->other_side(order[i]);
        const Column& a = catalog.column(mine);
        const Column& b = catalog.column(theirs);
        if (a.is_null(r) || b.is_null(bound[other]) || a.join_key(r) != b.join_key(bound[other])) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      bound[i] = r;
      total += bind(i + 1);
    }
    return total;
  };
  return bind(0);
}

namespace {

bool connected_mask(const Query& query, TableMask mask) {
  std::vector<std::size_t> parent(query.tables.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& e : query.join_edges) {
    const std::size_t a = query.table_index(e.left.table);
    const std::size_t b = query.table_index(e.right.table);
    if ((mask >> a & 1) && (mask >> b & 1)) parent[find(a)] = find(b);
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (mask >> i & 1) roots.insert(find(i));
  }
  return roots.size() == 1;
}

std::vector<std::string> mask_tables(const Query& query, TableMask mask) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < query.tables.size(); ++i) {
    if (mask >> i & 1) out.push_back(query.tables[i]);
  }
  return out;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : "|") + n;
  return out;
}

}  // namespace

std::vector<std::string> brute_force_connected_keys(const Query& query) {
  std::vector<std::vector<std::string>> subsets;
  const TableMask full = (TableMask{1} << query.tables.size()) - 1;
  for (TableMask m = 1; m <= full; ++m) {
    if (connected_mask(query, m)) subsets.push_back(mask_tables(query, m));
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<std::string> keys;
  for (const auto& s : subsets) keys.push_back(join_names(s));
  return keys;
}

std::vector<PhysicalPlan> all_plans(const Query& query) {
  std::map<TableMask, std::vector<PhysicalPlan>> memo;
  std::function<const std::vector<PhysicalPlan>&(TableMask)> plans = [&](TableMask mask) -> const std::vector<PhysicalPlan>& {
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    std::vector<PhysicalPlan> out;
    const auto tables = mask_tables(query, mask);
    if (tables.size() == 1) {
      PlanNode scan;
      scan.table = tables[0];
      scan.mask = mask;
      scan.key = tables[0];
      for (const auto& p : query.predicates) scan.predicates += p.table == tables[0] ? 1 : 0;
      PhysicalPlan plan;
      plan.query_id = query.id;
      plan.nodes.push_back(scan);
      plan.root = 0;
      out.push_back(std::move(plan));
    } else {
      for (TableMask left = 1; left < mask; ++left) {
        if ((left & mask) != left) continue;
        const TableMask right = mask ^ left;
        if (!connected_mask(query, left) || !connected_mask(query, right)) continue;
        const JoinEdge* edge = nullptr;
        for (const auto& e : query.join_edges) {
          const TableMask a = TableMask{1} << query.table_index(e.left.table);
          const TableMask b = TableMask{1} << query.table_index(e.right.table);
          if (((a & left) && (b & right)) || ((a & right) && (b & left))) edge = &e;
        }
        if (!edge) continue;
        for (const JoinOp op : {JoinOp::kHash, JoinOp::kMerge, JoinOp::kNestedLoop}) {
          for (const auto& lp : plans(left)) {
            for (const auto& rp : plans(right)) {
              PhysicalPlan plan;
              plan.query_id = query.id;
              plan.nodes = lp.nodes;
              const int offset = static_cast<int>(plan.nodes.size());
              for (PlanNode node : rp.nodes) {
                if (!node.is_scan) {
                  node.left += offset;
                  node.right += offset;
                }
                plan.nodes.push_back(std::move(node));
              }
              PlanNode join;
              join.is_scan = false;
              join.op = op;
              join.edge = *edge;
              join.left = lp.root;
              join.right = rp.root + offset;
              join.mask = mask;
              join.key = join_names(tables);
              plan.nodes.push_back(std::move(join));
              plan.root = static_cast<int>(plan.nodes.size() - 1);
              out.push_back(std::move(plan));
            }
          }
        }
      }
    }
    return memo[mask] = std::move(out);
  };
  return plans((TableMask{1} << query.tables.size()) - 1);
}

double brute_force_min_cost(const Query& query, const CardinalityMap& cards, const CostParams& params) {
  double best = INFINITY;
  for (const auto& plan : all_plans(query)) best = std::min(best, cost_plan(plan, cards, params));
  return best;
}

double mutual_information(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> px, py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1;
    px[x[i]] += 1;
    py[y[i]] += 1;
  }
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [xy, c] : joint) mi += c / n * std::log(c * n / (px[xy.first] * py[xy.second]));
  return mi;
}

TreeSearch brute_force_max_tree(const std::vector<std::vector<double>>& w) {
  const std::size_t n = w.size();
  TreeSearch best;
  best.weight = -INFINITY;
  if (n < 2) {
    best.weight = 0.0;
    return best;
  }
  auto consider = [&](std::vector<std::pair<std::size_t, std::size_t>> edges) {
    double weight = 0.0;
    for (auto& [a, b] : edges) {
      if (a > b) std::swap(a, b);
      weight += w[a][b];
    }
    std::sort(edges.begin(), edges.end());
    if (weight > best.weight + 1e-12) {
      best = {edges, weight, true};
    } else if (std::abs(weight - best.weight) <= 1e-12 && edges != best.edges) {
      best.unique = false;
    }
  };
  if (n == 2) {
    consider({{0, 1}});
    return best;
  }
  // Decode every Pruefer sequence of length n - 2.
  std::vector<std::size_t> seq(n - 2, 0);
  while (true) {
    std::vector<std::size_t> degree(n, 1);
    for (const std::size_t s : seq) ++degree[s];
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const std::size_t s : seq) {
      for (std::size_t leaf = 0; leaf < n; ++leaf) {
        if (degree[leaf] == 1) {
          edges.emplace_back(leaf, s);
          --degree[leaf];
          --degree[s];
          break;
        }
      }
    }
    std::vector<std::size_t> last;
    for (std::size_t v = 0; v < n; ++v) {
      if (degree[v] == 1) last.push_back(v);
    }
    edges.emplace_back(last[0], last[1]);
    consider(edges);
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

CardinalityMap random_cards(std::mt19937_64& rng, const Query& query) {
  CardinalityMap cards;
  cards.parent = query.id;
  std::uniform_real_distribution<double> exponent(0.0, 6.0);
  for (const auto& entry : enumerate_subplans(query).entries) {
    cards.values[entry.key()] = std::floor(std::pow(10.0, exponent(rng)));
  }
  return cards;
}

}  // namespace cardbench::testing
