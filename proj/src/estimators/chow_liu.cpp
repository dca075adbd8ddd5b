#include "cardbench/estimators/chow_liu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "cardbench/error.hpp"
#include "cardbench/parallel.hpp"
#include "estimators/bucket.hpp"
#include "estimators/equi_depth.hpp"

namespace cardbench {

Discretizer Discretizer::build(const Column& column, std::size_t bins) {
  Discretizer d;
  d.discrete = column.kind() == ColumnKind::kCategorical;
  std::vector<double> values;
  values.reserve(column.size());
  for (std::size_t r = 0; r < column.size(); ++r) {
    if (!column.is_null(r)) values.push_back(column.value(r));
  }
  const auto runs = detail::value_runs(std::move(values));
  for (const auto& [first, last] : detail::equi_depth_groups(runs, bins)) {
    d.lo.push_back(runs[first].first);
    d.hi.push_back(runs[last - 1].first);
    d.distinct.push_back(static_cast<double>(last - first));
  }
  return d;
}

std::size_t Discretizer::state_of(const Column& column, std::size_t row) const {
  if (column.is_null(row)) return null_state();
  const double v = column.value(row);
  const auto it = std::lower_bound(hi.begin(), hi.end(), v);
  return it == hi.end() ? bins() - 1 : static_cast<std::size_t>(it - hi.begin());
}

std::vector<double> Discretizer::likelihood(const Region& region) const {
  std::vector<double> out(states(), 0.0);
  for (std::size_t b = 0; b < bins(); ++b) {
    out[b] = detail::ValueRange{lo[b], hi[b], distinct[b], discrete}.fraction_in(region);
  }
  return out;
}

std::vector<double> Discretizer::non_null() const {
  std::vector<double> out(states(), 1.0);
  out[null_state()] = 0.0;
  return out;
}

double FanoutTable::expected(const std::vector<double>& weights) const {
  double rows = 0.0;
  double matches = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (weights[s] == 0.0) continue;
    for (const auto& [fanout, count] : counts[s]) {
      rows += weights[s] * static_cast<double>(count);
      matches += weights[s] * static_cast<double>(count) * static_cast<double>(fanout);
    }
  }
  return rows > 0.0 ? matches / rows : 0.0;
}

std::optional<std::size_t> ChowLiuTable::attribute_index(const std::string& column) const {
  const auto it = std::find(attributes.begin(), attributes.end(), column);
  if (it == attributes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - attributes.begin());
}

double ChowLiuTable::mi(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  const std::size_t n = attributes.size();
  // Offset of row i in the packed upper triangle.
  return mutual_information[i * n - i * (i + 1) / 2 + (j - i - 1)];
}

double ChowLiuTable::probability(const std::map<std::size_t, std::vector<double>>& evidence) const {
  if (evidence.empty()) return 1.0;
  const std::size_t n = attributes.size();
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 1; i < n; ++i) children[*parent[i]].push_back(i);
  std::vector<std::size_t> order{0};
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (const std::size_t c : children[order[k]]) order.push_back(c);
  }
  std::vector<bool> observed(n, false);
  for (const auto& [i, lambda] : evidence) observed[i] = true;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it != 0 && observed[*it]) observed[*parent[*it]] = true;
  }

  // beta[v][x] = lambda_v(x) * product of child messages; computed leaves first.
  std::vector<std::vector<double>> beta(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    if (!observed[v]) continue;
    const std::size_t sv = discretizers[v].states();
    const auto e = evidence.find(v);
    beta[v] = e != evidence.end() ? e->second : std::vector<double>(sv, 1.0);
    for (const std::size_t c : children[v]) {
      if (!observed[c]) continue;
      const std::size_t sc = discretizers[c].states();
      for (std::size_t x = 0; x < sv; ++x) {
        if (beta[v][x] == 0.0) continue;
        double m = 0.0;
        for (std::size_t y = 0; y < sc; ++y) m += cpt[c][x * sc + y] * beta[c][y];
        beta[v][x] *= m;
      }
    }
  }
  double p = 0.0;
  for (std::size_t x = 0; x < beta[0].size(); ++x) p += cpt[0][x] * beta[0][x];
  return std::clamp(p, 0.0, 1.0);
}

std::vector<std::optional<std::size_t>> max_spanning_tree(const std::vector<std::vector<double>>& weights) {
  const std::size_t n = weights.size();
  std::vector<std::optional<std::size_t>> parent(n);
  if (n == 0) return parent;
  struct Candidate {
    double w;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({weights[i][j], i, j});
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Candidate& a, const Candidate& b) { return a.w > b.w; });
  std::vector<std::size_t> set(n);
  std::iota(set.begin(), set.end(), 0);
  auto find = [&](std::size_t x) {
    while (set[x] != x) x = set[x] = set[set[x]];
    return x;
  };
  std::vector<std::vector<std::size_t>> adjacent(n);
  for (const auto& e : edges) {
    const std::size_t a = find(e.i);
    const std::size_t b = find(e.j);
    if (a == b) continue;
    set[a] = b;
    adjacent[e.i].push_back(e.j);
    adjacent[e.j].push_back(e.i);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue{0};
  seen[0] = true;
  for (std::size_t k = 0; k < queue.size(); ++k) {
    std::sort(adjacent[queue[k]].begin(), adjacent[queue[k]].end());
    for (const std::size_t next : adjacent[queue[k]]) {
      if (seen[next]) continue;
      seen[next] = true;
      parent[next] = queue[k];
      queue.push_back(next);
    }
  }
  return parent;
}

namespace {

ChowLiuTable build_table(const TableData& table, std::size_t bins, const std::vector<ColumnRef>& exclude) {
  if (table.rows() == 0) fail(ErrorCode::kInsufficientData, "chow_liu cannot model empty table " + table.name());
  ChowLiuTable model;
  model.rows = static_cast<double>(table.rows());
  std::vector<std::vector<std::size_t>> states;
  for (const auto& column : table.columns()) {
    if (std::find(exclude.begin(), exclude.end(), ColumnRef{table.name(), column.name()}) != exclude.end()) continue;
    model.attributes.push_back(column.name());
    model.discretizers.push_back(Discretizer::build(column, bins));
    std::vector<std::size_t> s(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) s[r] = model.discretizers.back().state_of(column, r);
    states.push_back(std::move(s));
  }
  const std::size_t n = model.attributes.size();
  const double rows = model.rows;

  std::vector<std::vector<double>> mi(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t si = model.discretizers[i].states();
      const std::size_t sj = model.discretizers[j].states();
      std::vector<double> joint(si * sj, 0.0), pi(si, 0.0), pj(sj, 0.0);
      for (std::size_t r = 0; r < table.rows(); ++r) {
        joint[states[i][r] * sj + states[j][r]] += 1.0;
        pi[states[i][r]] += 1.0;
        pj[states[j][r]] += 1.0;
      }
      double value = 0.0;
      for (std::size_t x = 0; x < si; ++x) {
        for (std::size_t y = 0; y < sj; ++y) {
          const double c = joint[x * sj + y];
          if (c > 0.0) value += c / rows * std::log(c * rows / (pi[x] * pj[y]));
        }
      }
      mi[i][j] = mi[j][i] = std::max(0.0, value);
      model.mutual_information.push_back(mi[i][j]);
    }
  }
  model.parent = max_spanning_tree(mi);

  model.cpt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t si = model.discretizers[i].states();
    if (!model.parent[i]) {
      model.cpt[i].assign(si, 0.0);
      for (const std::size_t s : states[i]) model.cpt[i][s] += 1.0;
      for (double& p : model.cpt[i]) p /= rows;
      continue;
    }
    const std::size_t p = *model.parent[i];
    const std::size_t sp = model.discretizers[p].states();
    std::vector<double> counts(sp * si, 0.0), totals(sp, 0.0);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      counts[states[p][r] * si + states[i][r]] += 1.0;
      totals[states[p][r]] += 1.0;
    }
    // Unseen parent states get a uniform row so every row still sums to one.
    for (std::size_t x = 0; x < sp; ++x) {
      for (std::size_t y = 0; y < si; ++y) {
        counts[x * si + y] = totals[x] > 0.0 ? counts[x * si + y] / totals[x] : 1.0 / static_cast<double>(si);
      }
    }
    model.cpt[i] = std::move(counts);
  }
  return model;
}

FanoutTable build_fanout(const Catalog& catalog, const ColumnRef& from, const ColumnRef& to,
                         const Discretizer& discretizer) {
  FanoutTable table{from, to, std::vector<std::map<uint64_t, uint64_t>>(discretizer.states())};
  const Column& target = catalog.column(to);
  std::unordered_map<double, uint64_t> matches;
  for (std::size_t r = 0; r < target.size(); ++r) {
    if (!target.is_null(r)) ++matches[target.join_key(r)];
  }
  const Column& source = catalog.column(from);
  for (std::size_t r = 0; r < source.size(); ++r) {
    uint64_t fanout = 0;
    if (!source.is_null(r)) {
      const auto it = matches.find(source.join_key(r));
      if (it != matches.end()) fanout = it->second;
    }
    ++table.counts[discretizer.state_of(source, r)][fanout];
  }
  return table;
}

}  // namespace

std::unique_ptr<ChowLiuEstimator> ChowLiuEstimator::build(const Catalog& catalog, std::size_t bins,
                                                          const std::vector<ColumnRef>& exclude,
                                                          std::size_t workers) {
  if (bins == 0) fail(ErrorCode::kInvalidArgument, "chow_liu needs at least one bin");
  auto model = std::make_unique<ChowLiuEstimator>();
  std::vector<const TableData*> tables;
  for (const auto& [name, table] : catalog.tables()) {
    tables.push_back(&table);
    model->tables_[name];
  }
  parallel_for(tables.size(), workers, [&](std::size_t t) {
    model->tables_.at(tables[t]->name()) = build_table(*tables[t], bins, exclude);
  });
  for (const auto& edge : catalog.join_graph().edges) {
    for (const auto& [from, to] : {std::pair{edge.left, edge.right}, std::pair{edge.right, edge.left}}) {
      const std::string key = from.str();
      if (!model->key_discretizers_.count(key)) {
        model->key_discretizers_[key] = Discretizer::build(catalog.column(from), bins);
      }
      model->fanouts_[{from, to}] = build_fanout(catalog, from, to, model->key_discretizers_[key]);
    }
  }
  return model;
}

const ChowLiuTable& ChowLiuEstimator::table_model(const std::string& table) const {
  const auto it = tables_.find(table);
  if (it == tables_.end()) fail(ErrorCode::kUnknownTable, "chow_liu has no model for table " + table);
  return it->second;
}

const FanoutTable& ChowLiuEstimator::fanout(const ColumnRef& from, const ColumnRef& to) const {
  const auto it = fanouts_.find({from, to});
  if (it == fanouts_.end()) fail(ErrorCode::kUnknownJoinEdge, "chow_liu has no fanout table " + from.str() + " -> " + to.str());
  return it->second;
}

double ChowLiuEstimator::table_probability(const std::string& table, const std::vector<Predicate>& predicates,
                                           const std::vector<std::string>& non_null) const {
  const ChowLiuTable& model = table_model(table);
  std::map<std::size_t, std::vector<double>> evidence;
  for (const auto& p : predicates) {
    const auto i = model.attribute_index(p.column);
    if (!i) fail(ErrorCode::kUnmodeledColumn, table + "." + p.column + " is excluded from the chow_liu model");
    evidence[*i] = model.discretizers[*i].likelihood(p.region);
  }
  for (const auto& column : non_null) {
    const auto i = model.attribute_index(column);
    if (i && !evidence.count(*i)) evidence[*i] = model.discretizers[*i].non_null();
  }
  return model.probability(evidence);
}

double ChowLiuEstimator::estimate(const SubPlanQuery& subplan, uint64_t) const {
  // Root: the largest table (ties by name); fanouts are taken outward from it.
  std::string root = subplan.tables.front();
  for (const auto& table : subplan.tables) {
    if (table_model(table).rows > table_model(root).rows) root = table;
  }
  auto join_columns = [&](const std::string& table) {
    std::vector<std::string> columns;
    for (const auto& edge : subplan.join_edges) {
      if (edge.touches(table)) columns.push_back(edge.side(table).column);
    }
    return columns;
  };

  double card = table_model(root).rows *
                table_probability(root, subplan.predicates_on(root), join_columns(root));
  std::vector<std::string> reached{root};
  std::vector<bool> used(subplan.join_edges.size(), false);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t e = 0; e < subplan.join_edges.size(); ++e) {
      const JoinEdge& edge = subplan.join_edges[e];
      if (used[e]) continue;
      const bool l = std::find(reached.begin(), reached.end(), edge.left.table) != reached.end();
      const bool r = std::find(reached.begin(), reached.end(), edge.right.table) != reached.end();
      if (l == r) continue;
      const ColumnRef& from = l ? edge.left : edge.right;
      const ColumnRef& to = l ? edge.right : edge.left;
      const Discretizer& key = key_discretizers_.at(from.str());

      // Expected matches per source row, conditioned only on the source key column's predicate.
      std::vector<double> weights = key.non_null();
      for (const auto& p : subplan.predicates_on(from.table)) {
        if (p.column == from.column) weights = key.likelihood(p.region);
      }
      card *= fanout(from, to).expected(weights);

      // Fraction of matched target rows passing the target's own filters.
      const ChowLiuTable& target = table_model(to.table);
      double selectivity = table_probability(to.table, subplan.predicates_on(to.table), join_columns(to.table));
      if (const auto k = target.attribute_index(to.column)) {
        const double key_present = target.probability({{*k, target.discretizers[*k].non_null()}});
        selectivity = key_present > 0.0 ? selectivity / key_present : 0.0;
      }
      card *= std::min(1.0, selectivity);
      reached.push_back(to.table);
      used[e] = true;
      grew = true;
    }
  }
  return std::max(0.0, card);
}

namespace {

void write_discretizer(BinaryWriter& w, const Discretizer& d) {
  w.f64s(d.lo);
  w.f64s(d.hi);
  w.f64s(d.distinct);
  w.u64(d.discrete ? 1 : 0);
}

Discretizer read_discretizer(BinaryReader& in) {
  Discretizer d;
  d.lo = in.f64s();
  d.hi = in.f64s();
  d.distinct = in.f64s();
  d.discrete = in.u64() != 0;
  return d;
}

void write_ref(BinaryWriter& w, const ColumnRef& ref) {
  w.str(ref.table);
  w.str(ref.column);
}

ColumnRef read_ref(BinaryReader& in) {
  ColumnRef ref;
  ref.table = in.str();
  ref.column = in.str();
  return ref;
}

constexpr uint64_t kNoParent = ~uint64_t{0};

}  // namespace

void ChowLiuEstimator::serialize(std::ostream& out) const {
  BinaryWriter w(out);
  w.u64(tables_.size());
  for (const auto& [name, t] : tables_) {
    w.str(name);
    w.f64(t.rows);
    w.u64(t.attributes.size());
    for (std::size_t i = 0; i < t.attributes.size(); ++i) {
      w.str(t.attributes[i]);
      write_discretizer(w, t.discretizers[i]);
      w.u64(t.parent[i] ? *t.parent[i] : kNoParent);
      w.f64s(t.cpt[i]);
    }
    w.f64s(t.mutual_information);
  }
  w.u64(key_discretizers_.size());
  for (const auto& [key, d] : key_discretizers_) {
    w.str(key);
    write_discretizer(w, d);
  }
  w.u64(fanouts_.size());
  for (const auto& [refs, table] : fanouts_) {
    write_ref(w, table.from);
    write_ref(w, table.to);
    w.u64(table.counts.size());
    for (const auto& state : table.counts) {
      std::vector<uint64_t> flat;
      for (const auto& [fanout, count] : state) {
        flat.push_back(fanout);
        flat.push_back(count);
      }
      w.u64s(flat);
    }
  }
}

std::unique_ptr<ChowLiuEstimator> ChowLiuEstimator::deserialize(BinaryReader& in) {
  auto model = std::make_unique<ChowLiuEstimator>();
  const uint64_t tables = in.u64();
  for (uint64_t k = 0; k < tables; ++k) {
    ChowLiuTable& t = model->tables_[in.str()];
    t.rows = in.f64();
    const uint64_t n = in.u64();
    for (uint64_t i = 0; i < n; ++i) {
      t.attributes.push_back(in.str());
      t.discretizers.push_back(read_discretizer(in));
      const uint64_t p = in.u64();
      t.parent.push_back(p == kNoParent ? std::nullopt : std::optional<std::size_t>(p));
      t.cpt.push_back(in.f64s());
    }
    t.mutual_information = in.f64s();
  }
  const uint64_t keys = in.u64();
  for (uint64_t k = 0; k < keys; ++k) {
    std::string key = in.str();
    model->key_discretizers_[key] = read_discretizer(in);
  }
  const uint64_t fanouts = in.u64();
  for (uint64_t k = 0; k < fanouts; ++k) {
    FanoutTable table;
    table.from = read_ref(in);
    table.to = read_ref(in);
    table.counts.resize(in.u64());
    for (auto& state : table.counts) {
      const auto flat = in.u64s();
      if (flat.size() % 2 != 0) fail(ErrorCode::kIo, "corrupt fanout table");
      for (std::size_t i = 0; i < flat.size(); i += 2) state[flat[i]] = flat[i + 1];
    }
    model->fanouts_[{table.from, table.to}] = std::move(table);
  }
  return model;
}

}  // namespace cardbench
