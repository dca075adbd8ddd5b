#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cardbench {

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

// Strict parse of the whole string (surrounding blanks allowed).
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split_words(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace cardbench
