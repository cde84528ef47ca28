#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ghznet {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Column-ordered result table, exported as CSV or JSON.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    bool operator==(const Table&) const = default;
};

enum class TableFormat
{
    kCsv,
    kJson,
};

TableFormat parse_table_format(std::string_view name);

/// Doubles are written with 17 significant digits and always carry a decimal
/// point or exponent, so integer and real cells stay distinguishable on read-back.
std::string to_csv(const Table& t);
std::string to_json(const Table& t);
std::string render(const Table& t, TableFormat fmt);

Table parse_csv(std::string_view text);
Table parse_json_table(std::string_view text);

/// Writes the table; throws std::runtime_error when the path cannot be written.
void write_table(const Table& t, TableFormat fmt, const std::string& path);

} // namespace ghznet
