#include "packetvision/csv.hpp"

#include "packetvision/error.hpp"

namespace packetvision::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += escape(fields[i]);
  }
  return line;
}

Table parse(std::string_view text, const std::vector<std::string>& expected_header) {
  Table table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(record_line) + ": " + what);
  };
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (table.header.empty()) {
        if (record != expected_header) fail("unexpected header");
        table.header = std::move(record);
      } else {
        if (record.size() != table.header.size()) {
          fail("expected " + std::to_string(table.header.size()) + " fields, got " +
               std::to_string(record.size()));
        }
        table.rows.push_back(std::move(record));
        table.line_numbers.push_back(record_line);
      }
    }
    record.clear();
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
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) fail("stray quote");
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        if (field_was_quoted) fail("characters after closing quote");
        field.push_back(c);
    }
  }
  if (in_quotes) fail("unterminated quoted field");
  if (!field.empty() || !record.empty() || field_was_quoted) end_record();
  if (table.header.empty()) {
    record_line = 1;
    fail("missing header");
  }
  return table;
}

}  // namespace packetvision::csv
