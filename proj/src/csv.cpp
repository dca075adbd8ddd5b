#include "cardbench/csv.hpp"

#include <fstream>
#include <sstream>

#include "cardbench/error.hpp"

namespace cardbench {

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;       // current field started with a quote
  bool in_quotes = false;    // inside a quoted section
  bool field_started = false;
  bool row_started = false;

  auto end_field = [&] {
    if (!quoted && field.empty()) {
      row.emplace_back(std::nullopt);
    } else {
      row.emplace_back(std::move(field));
    }
    field.clear();
    quoted = false;
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) fail(ErrorCode::kIo, "stray quote inside unquoted CSV field at byte " + std::to_string(i));
        quoted = true;
        in_quotes = true;
        field_started = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        row_started = true;
        break;
    }
  }
  if (in_quotes) fail(ErrorCode::kIo, "unterminated quoted CSV field");
  if (row_started || field_started || !row.empty()) end_row();
  return rows;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace cardbench
