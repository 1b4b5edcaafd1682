#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epicast::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
std::string format_doubles(std::span<const double> v, char sep = ',');

/// Fixed-point rendering for human-facing tables.
std::string format_fixed(double v, int decimals);

double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int(std::string_view s, std::string_view what);
std::uint64_t parse_uint(std::string_view s, std::string_view what);
std::vector<double> parse_doubles(std::string_view s, std::string_view what, char sep = ',');

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string> split(std::string_view s, char sep);

/// Splits one CSV line on commas, strips a trailing CR. No quoting support.
std::vector<std::string> split_csv_line(std::string_view line);

/// Ordered `key=value` text. Blank lines and lines starting with `#` are ignored.
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& kv);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace epicast::text
