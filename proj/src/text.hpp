#pragma once

// Internal text helpers shared by the file-format readers and writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affectcouple::text {

std::string_view trim(std::string_view s) noexcept;

std::vector<std::string> split(std::string_view s, char sep);

/// One CSV record (no embedded newlines). Double-quoted fields may contain
/// separators and "" escapes.
std::vector<std::string> split_csv(std::string_view line);

/// Quotes a field only when it needs it.
std::string csv_field(std::string_view field);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Finite decimal number, whole field consumed.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest text that reads back to the same double.
std::string format_number(double v);

/// Fixed notation with at most `digits` fractional digits, trailing zeros
/// removed.
std::string format_fixed(double v, int digits);

/// Reads one line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

}  // namespace affectcouple::text
