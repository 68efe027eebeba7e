#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nf::csv {

/// Splits one logical CSV line into fields. Double-quoted fields may contain
/// commas and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_line(std::string_view line);

/// Reads the next non-empty line (CR stripped). Returns nullopt at EOF.
std::optional<std::string> next_line(std::istream& in);

/// Quotes a field only when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Full-string parse of a decimal or 0x-prefixed hex number.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

}  // namespace nf::csv
