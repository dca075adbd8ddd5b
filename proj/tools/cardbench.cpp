#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cardbench/bench.hpp"
#include "cardbench/catalog.hpp"
#include "cardbench/config.hpp"
#include "cardbench/csv.hpp"
#include "cardbench/error.hpp"
#include "cardbench/estimator.hpp"
#include "cardbench/hash.hpp"
#include "cardbench/metrics.hpp"
#include "cardbench/synthetic.hpp"
#include "cardbench/text.hpp"
#include "cardbench/workloadgen.hpp"

namespace fs = std::filesystem;
using namespace cardbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 2;
constexpr int kExitInput = 3;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

struct CatalogArgs {
  std::string schema;
  std::string data;
};

void add_catalog_options(CLI::App* cmd, CatalogArgs& args) {
  cmd->add_option("--schema", args.schema, "Schema file")->required();
  cmd->add_option("--data", args.data, "Directory holding <table>.csv files")->required();
}

// Layering: defaults < config file < environment < explicit flags.
struct CommonArgs {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::size_t> workers;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Config file (key = value under [section] headers)");
  cmd->add_option("--seed", args.seed, "Base random seed");
  cmd->add_option("--workers", args.workers, "Worker threads");
}

BenchConfig resolve_config(const CommonArgs& args) {
  BenchConfig config = args.config.empty() ? BenchConfig{} : load_config(args.config);
  apply_environment(config);
  if (args.seed) config.seed = *args.seed;
  if (args.workers) config.workers = *args.workers;
  config.workers = std::max<std::size_t>(1, config.workers);
  return config;
}

std::vector<WorkloadEntry> load_workload(const std::string& path) { return parse_workload(read_file(path)); }

// ---- synth ----
struct SynthArgs {
  std::string out_dir;
  uint64_t seed = 0;
  double scale = 1.0;
  double skew = 1.1;
};

int run_synth(const SynthArgs& a) {
  const Catalog catalog = make_stats_like_catalog({a.seed, a.scale, a.skew});
  const fs::path dir(a.out_dir);
  write_catalog(catalog, dir / "schema.txt", dir / "data");
  std::cout << fmt::format("wrote {} tables to {}\n", catalog.tables().size(), dir.string());
  return kExitOk;
}

// ---- gen ----
struct GenArgs {
  CatalogArgs catalog;
  CommonArgs common;
  std::string out;
  std::string manifest;
  std::size_t max_tables = 5;
  std::size_t limit = 70;
  std::size_t per_template = 2;
  double sel_min = 0.05;
  double sel_max = 1.0;
  std::size_t max_predicates = 2;
};

int run_gen(const GenArgs& a) {
  const BenchConfig config = resolve_config(a.common);
  const Catalog catalog = load_catalog(a.catalog.schema, a.catalog.data);
  const auto templates = enumerate_templates(catalog, a.max_tables, a.limit, config.seed);
  GenerationOptions options;
  options.per_template = a.per_template;
  options.min_selectivity = a.sel_min;
  options.max_selectivity = a.sel_max;
  options.max_predicate_columns = a.max_predicates;
  options.seed = config.seed;
  options.workers = config.workers;
  options.oracle = config.oracle;
  const GeneratedWorkload workload = generate_queries(templates, catalog, options);
  write_text(a.out, format_workload(workload.queries));
  const std::string manifest = a.manifest.empty() ? a.out + ".manifest.csv" : a.manifest;
  write_text(manifest, format_manifest(workload.manifest));
  std::cout << fmt::format("{} templates, {} queries -> {} (manifest {})\n", templates.size(),
                           workload.queries.size(), a.out, manifest);
  return kExitOk;
}

// ---- truecards ----
struct TrueCardsArgs {
  CatalogArgs catalog;
  CommonArgs common;
  std::string workload;
  std::string out;
  bool verify = false;
};

int run_truecards(const TrueCardsArgs& a) {
  const BenchConfig config = resolve_config(a.common);
  const Catalog catalog = load_catalog(a.catalog.schema, a.catalog.data);
  TrueCardCache cache(a.out, catalog.fingerprint());
  const std::size_t before = cache.size();
  OracleOptions oracle = config.oracle;
  oracle.workers = config.workers;
  std::size_t entries = 0;
  std::size_t mismatches = 0;
  for (const auto& entry : load_workload(a.workload)) {
    const Query query = parse_query(entry.sql, catalog, entry.id);
    const SubPlanSpace space = enumerate_subplans(query);
    const CardinalityMap truth = true_cardinalities(space, catalog, oracle, &cache);
    entries += space.entries.size();
    if (!a.verify) continue;
    for (const auto& sub : space.entries) {
      const auto direct = static_cast<double>(execute_count(sub, catalog, oracle));
      if (direct != truth.at(sub.key())) {
        ++mismatches;
        std::cerr << fmt::format("mismatch {}/{}: cache {} vs oracle {}\n", query.id, sub.key(),
                                 truth.at(sub.key()), direct);
      }
    }
  }
  if (cache.dirty()) cache.save();
  std::cout << fmt::format("{} sub-plans, {} newly computed, cache {}\n", entries, cache.size() - before, a.out);
  if (a.verify) std::cout << fmt::format("verify: {} mismatch(es)\n", mismatches);
  return mismatches == 0 ? kExitOk : kExitInvariant;
}

// ---- bench ----
struct BenchArgs {
  CatalogArgs catalog;
  CommonArgs common;
  std::string workload;
  std::string methods;
  std::string out = "bench_out";
  std::string cache;
};

int run_bench(const BenchArgs& a) {
  BenchConfig config = resolve_config(a.common);
  if (!a.methods.empty()) {
    config.methods.clear();
    std::stringstream list(a.methods);
    for (std::string m; std::getline(list, m, ',');) {
      if (!trim(m).empty()) config.methods.emplace_back(trim(m));
    }
  }
  if (config.methods.empty()) config.methods.assign(std::begin(kMethodNames), std::end(kMethodNames));
  const Catalog catalog = load_catalog(a.catalog.schema, a.catalog.data);
  const auto workload = load_workload(a.workload);
  std::optional<TrueCardCache> cache;
  if (!a.cache.empty()) cache.emplace(a.cache, catalog.fingerprint());
  const BenchmarkReport report = run_benchmark(catalog, workload, config, cache ? &*cache : nullptr);
  if (cache && cache->dirty()) cache->save();

  const fs::path out(a.out);
  write_text(out / "report.json", report_json(report).dump(2) + "\n");
  write_text(out / "report.csv", report_csv(report));
  write_text(out / "timings.json", timings_json(report).dump(2) + "\n");
  const std::string text = report_text(report);
  write_text(out / "report.txt", text);
  std::cout << text;
  return report.violations.empty() ? kExitOk : kExitInvariant;
}

// ---- explain ----
struct ExplainArgs {
  CatalogArgs catalog;
  CommonArgs common;
  std::string query;
  std::string query_file;
  std::string method = "indep_hist";
  std::string model;
  double scale_root = 1.0;
};

std::string side_by_side(const std::string& left, const std::string& right, const std::string& left_title,
                         const std::string& right_title) {
  auto lines = [](const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
  };
  const auto l = lines(left);
  const auto r = lines(right);
  std::size_t width = left_title.size();
  for (const auto& s : l) width = std::max(width, s.size());
  std::string out = fmt::format("{:<{}}  |  {}\n", left_title, width, right_title);
  for (std::size_t i = 0; i < std::max(l.size(), r.size()); ++i) {
    out += fmt::format("{:<{}}  |  {}\n", i < l.size() ? l[i] : "", width, i < r.size() ? r[i] : "");
  }
  return out;
}

int run_explain(const ExplainArgs& a) {
  const BenchConfig config = resolve_config(a.common);
  const Catalog catalog = load_catalog(a.catalog.schema, a.catalog.data);
  std::string sql = a.query;
  std::string id = "q";
  if (!a.query_file.empty()) {
    const auto entries = load_workload(a.query_file);
    if (entries.empty()) fail(ErrorCode::kEmptyInput, a.query_file + " holds no query");
    sql = entries.front().sql;
    id = entries.front().id;
  }
  if (sql.empty()) fail(ErrorCode::kInvalidArgument, "explain needs --query or --query-file");
  const Query query = parse_query(sql, catalog, id);
  const SubPlanSpace space = enumerate_subplans(query);
  OracleOptions oracle = config.oracle;
  oracle.workers = config.workers;
  CardinalityMap truth = true_cardinalities(space, catalog, oracle);
  for (auto& [key, value] : truth.values) value = floor_estimate(value);

  std::unique_ptr<Estimator> estimator;
  if (!a.model.empty()) {
    std::ifstream in(a.model, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open " + a.model);
    estimator = load_estimator(in, catalog);
  } else {
    EstimatorConfig ec = config.estimator;
    ec.seed = config.seed;
    ec.workers = config.workers;
    estimator = build_estimator(a.method, catalog, ec);
  }
  CardinalityMap estimated = estimate_space(*estimator, space, derive_seed(config.seed, a.method + "/" + id));
  const std::string root_key = space.entries.back().key();
  estimated.values[root_key] = floor_estimate(estimated.values[root_key] * a.scale_root);

  const PhysicalPlan est_plan = optimize(query, estimated, config.cost);
  const PhysicalPlan true_plan = optimize(query, truth, config.cost);
  const double est_cost = cost_plan(est_plan, truth, config.cost);
  const double best_cost = cost_plan(true_plan, truth, config.cost);
  std::cout << side_by_side(format_plan(est_plan), format_plan(true_plan),
                            fmt::format("plan under {} estimates", estimator->name()), "plan under true cardinalities");
  std::cout << "\nsub-plan cardinalities (estimate / truth / Q-Error):\n";
  for (const auto& sub : space.entries) {
    const std::string key = sub.key();
    std::cout << fmt::format("  {:<40} {:>14} {:>14} {:>10.3f}\n", key, format_number(estimated.at(key)),
                             format_number(truth.at(key)), q_error(estimated.at(key), truth.at(key)));
  }
  std::cout << fmt::format("\ntrue cost of estimated plan: {:.4f}\ntrue cost of optimal plan:   {:.4f}\n", est_cost,
                           best_cost);
  std::cout << fmt::format("P-Error: {}\n", format_number(est_cost / best_cost));
  const auto divergence = first_divergence(est_plan, true_plan);
  std::cout << "first divergence: " << (divergence ? *divergence : "none") << "\n";
  return kExitOk;
}

// ---- train ----
struct TrainArgs {
  CatalogArgs catalog;
  CommonArgs common;
  std::string method;
  std::string out;
};

int run_train(const TrainArgs& a) {
  const BenchConfig config = resolve_config(a.common);
  const Catalog catalog = load_catalog(a.catalog.schema, a.catalog.data);
  EstimatorConfig ec = config.estimator;
  ec.seed = config.seed;
  ec.workers = config.workers;
  const auto estimator = build_estimator(a.method, catalog, ec);
  std::ofstream out(a.out, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + a.out);
  save_estimator(*estimator, catalog, out);
  std::cout << fmt::format("{}: built in {:.3f}s, {} bytes -> {}\n", estimator->name(),
                           estimator->build_stats().build_seconds, estimator->build_stats().model_bytes, a.out);
  return kExitOk;
}

// ---- inspect ----
int run_inspect(const CatalogArgs& a) {
  const Catalog catalog = load_catalog(a.schema, a.data);
  std::cout << fmt::format("fingerprint {:016x}\n", catalog.fingerprint());
  for (const auto& [name, table] : catalog.tables()) {
    std::cout << fmt::format("\ntable {} ({} rows)\n", name, table.rows());
    for (const auto& column : table.columns()) {
      const ColumnMeta& m = column.meta();
      const std::string range = m.has_bounds ? fmt::format("[{}, {}]", column.render_value(m.min),
                                                           column.render_value(m.max))
                                             : std::string("-");
      std::cout << fmt::format("  {:<24} {:<12} distinct={:<8} nulls={:<8} range={}{}\n", m.name,
                               column_kind_name(m.kind), m.domain_size, m.null_count, range,
                               catalog.is_join_column({name, m.name}) ? "  join" : "");
    }
  }
  std::cout << "\njoin edges\n";
  for (const auto& edge : catalog.join_graph().edges) {
    std::cout << fmt::format("  {} ({})\n", edge.str(), key_role_name(edge.role));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardinality-estimation benchmark: estimators, DP planner, Q-Error and P-Error"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic eight-table catalog");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory (schema.txt and data/)")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--scale", synth.scale, "Row-count multiplier");
  synth_cmd->add_option("--skew", synth.skew, "Zipf exponent of foreign keys");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate join templates and a query workload");
  add_catalog_options(gen_cmd, gen.catalog);
  add_common_options(gen_cmd, gen.common);
  gen_cmd->add_option("--out", gen.out, "Workload file")->required();
  gen_cmd->add_option("--manifest", gen.manifest, "Manifest CSV (default <out>.manifest.csv)");
  gen_cmd->add_option("--max-tables", gen.max_tables, "Largest template");
  gen_cmd->add_option("--templates", gen.limit, "Template count");
  gen_cmd->add_option("--per-template", gen.per_template, "Queries per template (1-4)");
  gen_cmd->add_option("--sel-min", gen.sel_min, "Lowest per-predicate selectivity");
  gen_cmd->add_option("--sel-max", gen.sel_max, "Highest per-predicate selectivity");
  gen_cmd->add_option("--max-predicates", gen.max_predicates, "Predicated columns per table");

  TrueCardsArgs tc;
  auto* tc_cmd = app.add_subcommand("truecards", "Compute and cache true sub-plan cardinalities");
  add_catalog_options(tc_cmd, tc.catalog);
  add_common_options(tc_cmd, tc.common);
  tc_cmd->add_option("--workload", tc.workload, "Workload file")->required();
  tc_cmd->add_option("--out", tc.out, "Cache file")->required();
  tc_cmd->add_flag("--verify", tc.verify, "Recount every sub-plan and compare with the cache");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run estimators, plan, and score a workload");
  add_catalog_options(bench_cmd, bench.catalog);
  add_common_options(bench_cmd, bench.common);
  bench_cmd->add_option("--workload", bench.workload, "Workload file")->required();
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods (default: all)");
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench_cmd->add_option("--cache", bench.cache, "True-cardinality cache file");

  ExplainArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "Compare the estimated and true plans of one query");
  add_catalog_options(explain_cmd, explain.catalog);
  add_common_options(explain_cmd, explain.common);
  explain_cmd->add_option("--query", explain.query, "SQL text");
  explain_cmd->add_option("--query-file", explain.query_file, "Workload file; its first query is used");
  explain_cmd->add_option("--method", explain.method, "Estimation method");
  explain_cmd->add_option("--model", explain.model, "Saved model file instead of building one");
  explain_cmd->add_option("--scale-root", explain.scale_root, "Multiply the full-query estimate by this factor");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Build one estimator and save its model file");
  add_catalog_options(train_cmd, train.catalog);
  add_common_options(train_cmd, train.common);
  train_cmd->add_option("--method", train.method, "Estimation method")->required();
  train_cmd->add_option("--out", train.out, "Model file")->required();

  CatalogArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print catalog statistics");
  add_catalog_options(inspect_cmd, inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*gen_cmd) return run_gen(gen);
    if (*tc_cmd) return run_truecards(tc);
    if (*bench_cmd) return run_bench(bench);
    if (*explain_cmd) return run_explain(explain);
    if (*train_cmd) return run_train(train);
    if (*inspect_cmd) return run_inspect(inspect);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvariantViolation ? kExitInvariant : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
