#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent parsing and formatting helpers shared by the file formats.
namespace ghznet {

std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split_on(std::string_view text, char sep);
std::string_view strip_comment(std::string_view line);
std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Shortest representation that round-trips.
std::string format_double(double v);
/// Fixed 17 significant digits (export format).
std::string format_double17(double v);

} // namespace ghznet
