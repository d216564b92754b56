#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace packetvision::csv {

/// Minimal RFC 4180 handling: fields containing a comma, quote or line
/// break are quoted; quotes inside are doubled.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for diagnostics.
  std::vector<std::size_t> line_numbers;
};

/// Parses text whose first record must equal `expected_header` exactly.
/// Blank lines are skipped. Throws MalformedCsv.
Table parse(std::string_view text, const std::vector<std::string>& expected_header);

}  // namespace packetvision::csv
