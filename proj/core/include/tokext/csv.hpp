#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokext::csv {

using Row = std::vector<std::string>;

// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Appends `row` terminated by CRLF.
void append_row(std::string& out, const Row& row);

// Parses RFC 4180 text. Accepts CRLF or bare LF record separators. Throws
// Error(kParseError) on an unterminated quote.
std::vector<Row> parse(std::string_view text);

// Shortest representation that round-trips.
std::string format_double(double value);
std::string format_fixed(double value, int decimals);
std::string format_optional(const std::optional<double>& value);

std::optional<double> parse_double(std::string_view field);

}  // namespace tokext::csv
