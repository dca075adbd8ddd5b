#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cardbench/bench.hpp"

namespace cardbench {

// TOML-like `key = value` lines grouped under `[section]` headers; `#` starts a comment. Keys are
// returned as "section.key". Quoted values lose their quotes.
std::map<std::string, std::string> parse_config_text(std::string_view text);

// Applies recognized keys to `config`; unknown keys and malformed values raise InvalidArgument.
// Sections: [estimator], [cost], [bench], [oracle].
void apply_config(const std::map<std::string, std::string>& entries, BenchConfig& config);

// Applies CARDBENCH_SEED and CARDBENCH_WORKERS when set.
void apply_environment(BenchConfig& config);

BenchConfig load_config(const std::filesystem::path& path);

}  // namespace cardbench
