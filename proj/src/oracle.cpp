#include "cardbench/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <unordered_map>

#include "cardbench/csv.hpp"
#include "cardbench/error.hpp"
#include "cardbench/parallel.hpp"

namespace cardbench {

double CardinalityMap::at(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) fail(ErrorCode::kIncompleteCardinalityMap, "no cardinality for '" + key + "' in " + parent);
  return it->second;
}

RowFilter::RowFilter(const TableData& table, std::span<const Predicate> predicates,
                     std::span<const std::string> non_null_columns) {
  for (const auto& p : predicates) {
    if (p.table == table.name()) checks_.emplace_back(&table.column(p.column), p.region);
  }
  for (const auto& name : non_null_columns) keys_.push_back(&table.column(name));
}

namespace {

std::vector<std::string> subplan_join_columns(const SubPlanQuery& subplan, const std::string& table) {
  std::vector<std::string> columns;
  for (const auto& edge : subplan.join_edges) {
    if (edge.touches(table)) columns.push_back(edge.side(table).column);
  }
  return columns;
}

}  // namespace

RowFilter::RowFilter(const Catalog& catalog, const SubPlanQuery& subplan, const std::string& table)
    : RowFilter(catalog.table(table), subplan.predicates, subplan_join_columns(subplan, table)) {}

std::vector<uint32_t> filter_table(const Catalog& catalog, const std::string& table_name,
                                   std::span<const Predicate> predicates,
                                   std::span<const std::string> non_null_columns) {
  const TableData& table = catalog.table(table_name);
  const RowFilter filter(table, predicates, non_null_columns);
  std::vector<uint32_t> rows;
  for (std::size_t row = 0; row < table.rows(); ++row) {
    if (filter.matches(row)) rows.push_back(static_cast<uint32_t>(row));
  }
  return rows;
}

std::vector<uint32_t> filter_subplan_table(const Catalog& catalog, const SubPlanQuery& subplan,
                                           const std::string& table) {
  return filter_table(catalog, table, subplan.predicates, subplan_join_columns(subplan, table));
}

namespace {

using Tuple = std::vector<double>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept {
    uint64_t h = 0x9e3779b97f4a7c15ULL ^ t.size();
    for (const double v : t) {
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

using GroupMap = std::unordered_map<Tuple, uint64_t, TupleHash>;

uint64_t checked_mul(uint64_t a, uint64_t b, const std::string& context) {
  uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) fail(ErrorCode::kResourceLimit, "64-bit count overflow in " + context);
  return out;
}

uint64_t checked_add(uint64_t a, uint64_t b, const std::string& context) {
  uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) fail(ErrorCode::kResourceLimit, "64-bit count overflow in " + context);
  return out;
}

}  // namespace

uint64_t execute_count(const SubPlanQuery& subplan, const Catalog& catalog, const OracleOptions& options) {
  const std::string context = subplan.parent + "/" + subplan.key();
  const std::size_t n = subplan.tables.size();
  std::vector<std::vector<uint32_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = filter_subplan_table(catalog, subplan, subplan.tables[i]);
  if (n == 1) return rows[0].size();

  auto index_of = [&](const std::string& table) {
    return static_cast<std::size_t>(std::lower_bound(subplan.tables.begin(), subplan.tables.end(), table) -
                                    subplan.tables.begin());
  };

  // Greedy order: smallest filtered table first, then the smallest adjacent table.
  std::vector<bool> joined(n, false);
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (rows[i].size() < rows[start].size()) start = i;
  }
  joined[start] = true;

  // Columns of joined tables that still have an edge to an unjoined table.
  auto needed_slots = [&] {
    std::vector<ColumnRef> slots;
    for (const auto& edge : subplan.join_edges) {
      const bool l = joined[index_of(edge.left.table)];
      const bool r = joined[index_of(edge.right.table)];
      if (l != r) {
        const ColumnRef& inside = l ? edge.left : edge.right;
        if (std::find(slots.begin(), slots.end(), inside) == slots.end()) slots.push_back(inside);
      }
    }
    std::sort(slots.begin(), slots.end());
    return slots;
  };

  std::vector<ColumnRef> slots = needed_slots();
  GroupMap groups;
  {
    const TableData& table = catalog.table(subplan.tables[start]);
    std::vector<const Column*> columns;
    for (const auto& s : slots) columns.push_back(&table.column(s.column));
    Tuple tuple(columns.size());
    for (const uint32_t row : rows[start]) {
      for (std::size_t c = 0; c < columns.size(); ++c) tuple[c] = columns[c]->join_key(row);
      ++groups[tuple];
    }
  }

  for (std::size_t step = 1; step < n; ++step) {
    // Pick the smallest unjoined table adjacent to the joined set.
    std::optional<std::size_t> pick;
    const JoinEdge* via = nullptr;
    for (const auto& edge : subplan.join_edges) {
      const auto l = index_of(edge.left.table);
      const auto r = index_of(edge.right.table);
      if (joined[l] == joined[r]) continue;
      const std::size_t candidate = joined[l] ? r : l;
      if (!pick || rows[candidate].size() < rows[*pick].size() ||
          (rows[candidate].size() == rows[*pick].size() && candidate < *pick)) {
        pick = candidate;
        via = &edge;
      }
    }
    if (!pick) fail(ErrorCode::kDisconnectedJoinGraph, context);
    const std::size_t t = *pick;
    const std::string& t_name = subplan.tables[t];
    const ColumnRef& inner_col = via->side(t_name);
    const ColumnRef& outer_col = via->other_side(t_name);
    const auto outer_slot = static_cast<std::size_t>(
        std::find(slots.begin(), slots.end(), outer_col) - slots.begin());

    joined[t] = true;
    const std::vector<ColumnRef> next_slots = needed_slots();

    // Build side: t's rows grouped by join key, carrying the t-columns that stay needed.
    const TableData& table = catalog.table(t_name);
    const Column& key_column = table.column(inner_col.column);
    std::vector<std::size_t> t_slot_positions;  // positions in next_slots filled from t
    std::vector<const Column*> t_columns;
    std::vector<std::pair<std::size_t, std::size_t>> carried;  // (old slot, new slot)
    for (std::size_t j = 0; j < next_slots.size(); ++j) {
      if (next_slots[j].table == t_name) {
        t_slot_positions.push_back(j);
        t_columns.push_back(&table.column(next_slots[j].column));
      } else {
        const auto old = static_cast<std::size_t>(std::find(slots.begin(), slots.end(), next_slots[j]) - slots.begin());
        carried.emplace_back(old, j);
      }
    }
    std::unordered_map<double, GroupMap> build;
    {
      Tuple projection(t_columns.size());
      for (const uint32_t row : rows[t]) {
        for (std::size_t c = 0; c < t_columns.size(); ++c) projection[c] = t_columns[c]->join_key(row);
        ++build[key_column.join_key(row)][projection];
      }
    }

    GroupMap next;
    Tuple out(next_slots.size());
    for (const auto& [tuple, count] : groups) {
      const auto hit = build.find(tuple[outer_slot]);
      if (hit == build.end()) continue;
      for (const auto& [old, pos] : carried) out[pos] = tuple[old];
      for (const auto& [projection, inner_count] : hit->second) {
        for (std::size_t c = 0; c < projection.size(); ++c) out[t_slot_positions[c]] = projection[c];
        auto& cell = next[out];
        cell = checked_add(cell, checked_mul(count, inner_count, context), context);
      }
      if (next.size() > options.max_intermediate_rows) {
        fail(ErrorCode::kResourceLimit, context + ": intermediate exceeds " +
                                            std::to_string(options.max_intermediate_rows) + " rows");
      }
    }
    groups = std::move(next);
    slots = next_slots;
    if (groups.empty()) return 0;
  }

  uint64_t total = 0;
  for (const auto& [tuple, count] : groups) total = checked_add(total, count, context);
  return total;
}

TrueCardCache::TrueCardCache(std::filesystem::path path, uint64_t catalog_fingerprint)
    : path_(std::move(path)), fingerprint_(catalog_fingerprint) {
  if (!std::filesystem::exists(path_)) return;
  const std::string text = read_file(path_.string());
  const std::string expected = fmt::format("# fingerprint={:016x}", fingerprint_);
  if (text.compare(0, expected.size(), expected) != 0) {
    dirty_ = true;  // stale cache from another catalog: rewritten on save
    return;
  }
  const auto body = text.substr(std::min(text.size(), text.find('\n') + 1));
  const auto rows = parse_csv(body);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 3 || !row[0] || !row[1] || !row[2]) {
      fail(ErrorCode::kIo, path_.string() + ": malformed cache row " + std::to_string(i));
    }
    uint64_t value = 0;
    const std::string& cell = *row[2];
    const auto parsed = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (parsed.ec != std::errc() || parsed.ptr != cell.data() + cell.size()) {
      fail(ErrorCode::kIo, path_.string() + ": bad cardinality '" + cell + "'");
    }
    entries_[{*row[0], *row[1]}] = value;
  }
}

bool TrueCardCache::lookup(const std::string& query_id, const std::string& key, uint64_t& out) const {
  const auto it = entries_.find({query_id, key});
  if (it == entries_.end()) return false;
  out = it->second;
  return true;
}

void TrueCardCache::insert(const std::string& query_id, const std::string& key, uint64_t value) {
  auto [it, inserted] = entries_.emplace(std::make_pair(query_id, key), value);
  if (inserted || it->second != value) {
    it->second = value;
    dirty_ = true;
  }
}

void TrueCardCache::save() {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << fmt::format("# fingerprint={:016x}\n", fingerprint_);
    out << "query_id,subplan_key,cardinality\n";
    for (const auto& [id, value] : entries_) {
      out << csv_field(id.first) << ',' << csv_field(id.second) << ',' << value << '\n';
    }
    if (!out) fail(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path_);
  dirty_ = false;
}

CardinalityMap true_cardinalities(const SubPlanSpace& space, const Catalog& catalog, const OracleOptions& options,
                                  TrueCardCache* cache) {
  CardinalityMap map;
  map.parent = space.parent;
  map.provenance = "true";
  std::vector<uint64_t> counts(space.entries.size(), 0);
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < space.entries.size(); ++i) {
    if (!cache || !cache->lookup(space.parent, space.entries[i].key(), counts[i])) missing.push_back(i);
  }
  parallel_for(missing.size(), options.workers, [&](std::size_t m) {
    const auto& entry = space.entries[missing[m]];
    try {
      counts[missing[m]] = execute_count(entry, catalog, options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kResourceLimit) throw;
      fail(ErrorCode::kResourceLimit, "sub-plan " + entry.parent + ":" + entry.key() + ": " + e.message());
    }
  });
  for (std::size_t i = 0; i < space.entries.size(); ++i) {
    map.values[space.entries[i].key()] = static_cast<double>(counts[i]);
  }
  if (cache) {
    for (const auto m : missing) cache->insert(space.parent, space.entries[m].key(), counts[m]);
  }
  return map;
}

}  // namespace cardbench
