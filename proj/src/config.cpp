#include "cardbench/config.hpp"

#include <charconv>
#include <cstdlib>
#include <functional>

#include "cardbench/csv.hpp"
#include "cardbench/error.hpp"
#include "cardbench/text.hpp"

namespace cardbench {

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = std::string(trim(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kInvalidArgument, "config line " + std::to_string(line_no) + ": bad section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kInvalidArgument, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) fail(ErrorCode::kInvalidArgument, "config line " + std::to_string(line_no) + ": empty key");
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  const auto v = parse_number(value);
  if (!v) fail(ErrorCode::kInvalidArgument, "config " + key + ": not a number: '" + value + "'");
  return *v;
}

uint64_t to_unsigned(const std::string& key, const std::string& value) {
  uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(ErrorCode::kInvalidArgument, "config " + key + ": not a non-negative integer: '" + value + "'");
  }
  return out;
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const std::size_t end = std::min(value.find(',', pos), value.size());
    const std::string item(trim(value.substr(pos, end - pos)));
    if (!item.empty()) out.push_back(item);
    pos = end + 1;
  }
  return out;
}

}  // namespace

void apply_config(const std::map<std::string, std::string>& entries, BenchConfig& c) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto size = [](std::size_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = static_cast<std::size_t>(to_unsigned(k, v)); };
  };
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_double(k, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"estimator.hist_buckets", size(c.estimator.hist_buckets)},
      {"estimator.mcv_k", size(c.estimator.mcv_k)},
      {"estimator.sample_size", size(c.estimator.sample_size)},
      {"estimator.wj_walks", size(c.estimator.wj_walks)},
      {"estimator.wj_root", [&](const std::string&, const std::string& v) { c.estimator.wj_root = v; }},
      {"estimator.chow_liu_bins", size(c.estimator.chow_liu_bins)},
      {"estimator.chow_liu_exclude",
       [&](const std::string& k, const std::string& v) {
         c.estimator.chow_liu_exclude.clear();
         for (const auto& item : to_list(v)) {
           const auto dot = item.find('.');
           if (dot == std::string::npos) fail(ErrorCode::kInvalidArgument, "config " + k + ": expected table.column");
           c.estimator.chow_liu_exclude.push_back({item.substr(0, dot), item.substr(dot + 1)});
         }
       }},
      {"cost.seq_page_cost", real(c.cost.seq_page_cost)},
      {"cost.cpu_tuple_cost", real(c.cost.cpu_tuple_cost)},
      {"cost.cpu_operator_cost", real(c.cost.cpu_operator_cost)},
      {"cost.sort_factor", real(c.cost.sort_factor)},
      {"cost.rows_per_page", real(c.cost.rows_per_page)},
      {"cost.hash_probe_factor", real(c.cost.hash_probe_factor)},
      {"bench.seed", [&](const std::string& k, const std::string& v) { c.seed = to_unsigned(k, v); }},
      {"bench.workers", size(c.workers)},
      {"bench.methods", [&](const std::string&, const std::string& v) { c.methods = to_list(v); }},
      {"oracle.max_intermediate_rows",
       [&](const std::string& k, const std::string& v) { c.oracle.max_intermediate_rows = to_unsigned(k, v); }},
  };
  for (const auto& [key, value] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    it->second(key, value);
  }
  c.cost.validate();
}

void apply_environment(BenchConfig& config) {
  if (const char* seed = std::getenv("CARDBENCH_SEED"); seed && *seed) {
    config.seed = to_unsigned("CARDBENCH_SEED", seed);
  }
  if (const char* workers = std::getenv("CARDBENCH_WORKERS"); workers && *workers) {
    config.workers = static_cast<std::size_t>(to_unsigned("CARDBENCH_WORKERS", workers));
  }
}

BenchConfig load_config(const std::filesystem::path& path) {
  BenchConfig config;
  apply_config(parse_config_text(read_file(path.string())), config);
  return config;
}

}  // namespace cardbench
