#include "cardbench/planner.hpp"

#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <map>

#include "cardbench/error.hpp"
#include "cardbench/text.hpp"

namespace cardbench {

void CostParams::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::kInvalidArgument, fmt::format("cost parameter {} must be positive", field));
  };
  positive(seq_page_cost, "seq_page_cost");
  positive(cpu_tuple_cost, "cpu_tuple_cost");
  positive(cpu_operator_cost, "cpu_operator_cost");
  positive(sort_factor, "sort_factor");
  positive(rows_per_page, "rows_per_page");
  if (!(hash_probe_factor >= 0.0) || !std::isfinite(hash_probe_factor)) {
    fail(ErrorCode::kInvalidArgument, "cost parameter hash_probe_factor must be non-negative");
  }
}

std::string_view join_op_name(JoinOp op) {
  switch (op) {
    case JoinOp::kHash: return "HashJoin";
    case JoinOp::kMerge: return "MergeJoin";
    case JoinOp::kNestedLoop: return "NestedLoop";
  }
  return "?";
}

double scan_cost(double rows, std::size_t predicates, const CostParams& p) {
  return rows / p.rows_per_page * p.seq_page_cost + rows * p.cpu_tuple_cost +
         rows * static_cast<double>(predicates) * p.cpu_operator_cost;
}

double join_cost(JoinOp op, double left_cost, double right_cost, double l, double r, double out,
                 const CostParams& p) {
  double local = 0.0;
  switch (op) {
    case JoinOp::kHash:
      local = r * (p.cpu_operator_cost + p.cpu_tuple_cost) + l * p.cpu_operator_cost + out * p.cpu_tuple_cost +
              p.hash_probe_factor * out * p.cpu_operator_cost;
      break;
    case JoinOp::kMerge:
      local = p.sort_factor * (l * std::log2(1.0 + l) + r * std::log2(1.0 + r)) * p.cpu_operator_cost +
              (l + r) * p.cpu_operator_cost + out * p.cpu_tuple_cost;
      break;
    case JoinOp::kNestedLoop:
      local = l * r * p.cpu_operator_cost + out * p.cpu_tuple_cost;
      break;
  }
  return left_cost + right_cost + local;
}

namespace {

constexpr JoinOp kOps[] = {JoinOp::kHash, JoinOp::kMerge, JoinOp::kNestedLoop};

std::size_t predicate_count(const Query& query, const std::string& table) {
  std::size_t n = 0;
  for (const auto& p : query.predicates) n += p.table == table ? 1 : 0;
  return n;
}

// The unique query edge with one endpoint in each mask; sub-plans are trees.
const JoinEdge* crossing_edge(const Query& query, TableMask a, TableMask b) {
  for (const auto& edge : query.join_edges) {
    const TableMask l = TableMask{1} << query.table_index(edge.left.table);
    const TableMask r = TableMask{1} << query.table_index(edge.right.table);
    if (((l & a) && (r & b)) || ((l & b) && (r & a))) return &edge;
  }
  return nullptr;
}

}  // namespace

PhysicalPlan optimize(const Query& query, const CardinalityMap& cards, const CostParams& params) {
  const std::size_t n = query.tables.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "cannot plan an empty query");
  if (n > 31) fail(ErrorCode::kResourceLimit, "too many tables to plan: " + std::to_string(n));

  PhysicalPlan plan;
  plan.query_id = query.id;
  const SubPlanSpace space = enumerate_subplans(query);
  std::map<TableMask, int> best;

  // Entries come ordered by size, so both children of a mask are planned before it.
  for (const auto& entry : space.entries) {
    const double rows = cards.at(entry.key());
    if (entry.tables.size() == 1) {
      PlanNode scan;
      scan.table = entry.tables.front();
      scan.predicates = predicate_count(query, scan.table);
      scan.mask = entry.mask;
      scan.key = entry.key();
      scan.rows = rows;
      scan.cost = scan_cost(rows, scan.predicates, params);
      plan.nodes.push_back(std::move(scan));
      best[entry.mask] = static_cast<int>(plan.nodes.size() - 1);
      continue;
    }
    std::optional<PlanNode> chosen;
    for (TableMask left = (entry.mask - 1) & entry.mask; left != 0; left = (left - 1) & entry.mask) {
      const TableMask right = entry.mask ^ left;
      const auto l = best.find(left);
      const auto r = best.find(right);
      if (l == best.end() || r == best.end()) continue;  // a side is disconnected
      const JoinEdge* edge = crossing_edge(query, left, right);
      if (!edge) continue;
      const PlanNode& ln = plan.nodes[static_cast<std::size_t>(l->second)];
      const PlanNode& rn = plan.nodes[static_cast<std::size_t>(r->second)];
      for (const JoinOp op : kOps) {
        const double cost = join_cost(op, ln.cost, rn.cost, ln.rows, rn.rows, rows, params);
        const bool better =
            !chosen || cost < chosen->cost ||
            (cost == chosen->cost &&
             std::pair(join_op_name(op), std::string_view(ln.key)) <
                 std::pair(join_op_name(chosen->op),
                           std::string_view(plan.nodes[static_cast<std::size_t>(chosen->left)].key)));
        if (!better) continue;
        PlanNode join;
        join.is_scan = false;
        join.op = op;
        join.edge = *edge;
        join.left = l->second;
        join.right = r->second;
        join.mask = entry.mask;
        join.key = entry.key();
        join.rows = rows;
        join.cost = cost;
        chosen = std::move(join);
      }
    }
    if (!chosen) fail(ErrorCode::kDisconnectedJoinGraph, query.id + ": no join for " + entry.key());
    plan.nodes.push_back(std::move(*chosen));
    best[entry.mask] = static_cast<int>(plan.nodes.size() - 1);
  }

  // Keep only the nodes reachable from the root, children first.
  const int full = best.at(space.entries.back().mask);
  PhysicalPlan out;
  out.query_id = query.id;
  std::function<int(int)> copy = [&](int index) {
    PlanNode node = plan.nodes[static_cast<std::size_t>(index)];
    if (!node.is_scan) {
      node.left = copy(node.left);
      node.right = copy(node.right);
    }
    out.nodes.push_back(std::move(node));
    return static_cast<int>(out.nodes.size() - 1);
  };
  out.root = copy(full);
  return out;
}

PhysicalPlan recost(const PhysicalPlan& plan, const CardinalityMap& cards, const CostParams& params) {
  PhysicalPlan out = plan;
  // Children precede parents, so one forward pass suffices.
  for (auto& node : out.nodes) {
    node.rows = cards.at(node.key);
    if (node.is_scan) {
      node.cost = scan_cost(node.rows, node.predicates, params);
    } else {
      const PlanNode& l = out.nodes[static_cast<std::size_t>(node.left)];
      const PlanNode& r = out.nodes[static_cast<std::size_t>(node.right)];
      node.cost = join_cost(node.op, l.cost, r.cost, l.rows, r.rows, node.rows, params);
    }
  }
  return out;
}

double cost_plan(const PhysicalPlan& plan, const CardinalityMap& cards, const CostParams& params) {
  return recost(plan, cards, params).cost();
}

double ppc(const Query& query, const CardinalityMap& estimated, const CardinalityMap& truth,
           const CostParams& params) {
  return cost_plan(optimize(query, estimated, params), truth, params);
}

std::string format_plan(const PhysicalPlan& plan) {
  std::string out;
  std::function<void(int, int)> emit = [&](int index, int depth) {
    const PlanNode& node = plan.nodes[static_cast<std::size_t>(index)];
    out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
    if (depth > 0) out += "-> ";
    if (node.is_scan) {
      out += fmt::format("SeqScan {} [{}] rows={} cost={:.4f} filters={}\n", node.table, node.key,
                         format_number(node.rows), node.cost, node.predicates);
      return;
    }
    out += fmt::format("{} [{}] rows={} cost={:.4f} on {}\n", join_op_name(node.op), node.key,
                       format_number(node.rows), node.cost, node.edge.str());
    emit(node.left, depth + 1);
    emit(node.right, depth + 1);
  };
  if (plan.root >= 0) emit(plan.root, 0);
  return out;
}

std::optional<std::string> first_divergence(const PhysicalPlan& a, const PhysicalPlan& b) {
  std::function<std::optional<std::string>(int, int)> walk = [&](int ia, int ib) -> std::optional<std::string> {
    const PlanNode& x = a.nodes[static_cast<std::size_t>(ia)];
    const PlanNode& y = b.nodes[static_cast<std::size_t>(ib)];
    auto label = [](const PhysicalPlan& p, const PlanNode& node) {
      if (node.is_scan) return fmt::format("SeqScan [{}]", node.key);
      return fmt::format("{} [{}] = [{}] x [{}]", join_op_name(node.op), node.key,
                         p.nodes[static_cast<std::size_t>(node.left)].key,
                         p.nodes[static_cast<std::size_t>(node.right)].key);
    };
    const std::string lx = label(a, x);
    const std::string ly = label(b, y);
    if (lx != ly) return fmt::format("{} vs {}", lx, ly);
    if (x.is_scan) return std::nullopt;
    if (auto d = walk(x.left, y.left)) return d;
    return walk(x.right, y.right);
  };
  return walk(a.root, b.root);
}

}  // namespace cardbench
