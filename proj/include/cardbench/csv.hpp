#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cardbench {

using CsvRow = std::vector<std::optional<std::string>>;

// RFC-4180 reader. An unquoted empty field is returned as nullopt; a quoted empty field as "".
// Accepts LF or CRLF line endings; a trailing newline does not produce an extra row.
std::vector<CsvRow> parse_csv(std::string_view text);

// Quotes the field when it contains a delimiter, quote, or line break.
std::string csv_field(std::string_view field);

std::string read_file(const std::string& path);

}  // namespace cardbench
