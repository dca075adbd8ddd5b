#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cardbench/binary_io.hpp"
#include "cardbench/estimator.hpp"

namespace cardbench {

// Equi-depth binning that never splits a value; one bin per value when the column has few values.
// The last state is reserved for null.
struct Discretizer {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> distinct;
  bool discrete = false;

  static Discretizer build(const Column& column, std::size_t bins);
  std::size_t bins() const { return lo.size(); }
  std::size_t states() const { return lo.size() + 1; }
  std::size_t null_state() const { return lo.size(); }
  std::size_t state_of(const Column& column, std::size_t row) const;
  // Per-state fraction of rows inside the region; the null state is 0.
  std::vector<double> likelihood(const Region& region) const;
  // 1 for every non-null state, 0 for the null state.
  std::vector<double> non_null() const;
};

// Distribution of per-row match counts along one directed join edge, per state of the source column.
struct FanoutTable {
  ColumnRef from;
  ColumnRef to;
  // counts[state] maps a fanout value to the number of source rows with that state and fanout.
  std::vector<std::map<uint64_t, uint64_t>> counts;

  // E[fanout | source state weighted by `weights`]; 0 when the weights cover no rows.
  double expected(const std::vector<double>& weights) const;
};

// Tree-shaped Bayesian network over one table's modeled columns.
struct ChowLiuTable {
  double rows = 0.0;
  std::vector<std::string> attributes;  // modeled columns, catalog order
  std::vector<Discretizer> discretizers;
  std::vector<std::optional<std::size_t>> parent;  // attribute 0 is the root
  // cpt[i][p * states(i) + x] = Pr(A_i = x | A_parent = p); the root stores its marginal.
  std::vector<std::vector<double>> cpt;
  std::vector<double> mutual_information;  // upper triangle, row-major over (i < j)

  std::optional<std::size_t> attribute_index(const std::string& column) const;
  // Pr(every attribute falls in its likelihood vector); attributes without a vector are unconstrained.
  double probability(const std::map<std::size_t, std::vector<double>>& evidence) const;
  double mi(std::size_t i, std::size_t j) const;
};

class ChowLiuEstimator final : public Estimator {
 public:
  static std::unique_ptr<ChowLiuEstimator> build(const Catalog& catalog, std::size_t bins,
                                                 const std::vector<ColumnRef>& exclude, std::size_t workers = 1);
  static std::unique_ptr<ChowLiuEstimator> deserialize(BinaryReader& in);

  std::string_view name() const override { return "chow_liu"; }
  double estimate(const SubPlanQuery& subplan, uint64_t seed) const override;
  void serialize(std::ostream& out) const override;

  const ChowLiuTable& table_model(const std::string& table) const;
  const FanoutTable& fanout(const ColumnRef& from, const ColumnRef& to) const;

  // Pr_T(predicates on the table, plus non-null for `non_null` columns).
  double table_probability(const std::string& table, const std::vector<Predicate>& predicates,
                           const std::vector<std::string>& non_null) const;

 private:
  std::map<std::string, ChowLiuTable> tables_;
  std::map<std::string, Discretizer> key_discretizers_;  // "<table>.<column>" for fanout sources
  std::map<std::pair<ColumnRef, ColumnRef>, FanoutTable> fanouts_;
};

// Maximum spanning tree by Kruskal over weights w[i][j]; ties go to the smaller (i, j).
// Returns parent pointers for a tree rooted at 0.
std::vector<std::optional<std::size_t>> max_spanning_tree(const std::vector<std::vector<double>>& weights);

}  // namespace cardbench
