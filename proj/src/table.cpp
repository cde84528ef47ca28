#include "ghznet/table.hpp"

#include "ghznet/errors.hpp"
#include "ghznet/text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ghznet {

namespace {

std::string format_real(double v)
{
    std::string s = format_double17(v);
    if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    return s;
}

std::string csv_escape(const std::string& s)
{
    const bool looks_numeric = parse_int(s) || parse_double(s);
    if (!looks_numeric && s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c)
{
    if (auto i = std::get_if<std::int64_t>(&c))
        return std::to_string(*i);
    if (auto d = std::get_if<double>(&c))
        return format_real(*d);
    return csv_escape(std::get<std::string>(c));
}

Cell parse_cell(std::string_view raw, bool quoted)
{
    if (quoted)
        return std::string(raw);
    if (auto i = parse_int(raw))
        return *i;
    if (auto d = parse_double(raw))
        return *d;
    return std::string(raw);
}

// Splits one CSV record starting at `pos`; advances `pos` past the record.
std::vector<Cell> read_record(std::string_view text, std::size_t& pos)
{
    std::vector<Cell> cells;
    std::string field;
    bool quoted = false;
    bool in_quotes = false;
    while (pos <= text.size()) {
        char c = pos < text.size() ? text[pos] : '\n';
        ++pos;
        if (in_quotes) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = quoted = true;
        } else if (c == ',') {
            cells.push_back(parse_cell(field, quoted));
            field.clear();
            quoted = false;
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r')
                field.pop_back();
            cells.push_back(parse_cell(field, quoted));
            break;
        } else {
            field += c;
        }
    }
    return cells;
}

} // namespace

TableFormat parse_table_format(std::string_view name)
{
    if (name == "csv")
        return TableFormat::kCsv;
    if (name == "json")
        return TableFormat::kJson;
    throw ValidationError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

std::string to_csv(const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + csv_escape(t.columns[i]);
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + cell_text(row[i]);
        out += "\n";
    }
    return out;
}

std::string to_json(const Table& t)
{
    // Hand-assembled so doubles keep the same 17-digit text as the CSV export.
    auto quote = [](const std::string& s) { return nlohmann::json(s).dump(); };
    std::string out = "{\n  \"columns\": [";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? ", " : "") + quote(t.columns[i]);
    out += "],\n  \"rows\": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += r ? ",\n    [" : "\n    [";
        const auto& row = t.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += i ? ", " : "";
            const Cell& c = row[i];
            if (auto d = std::get_if<double>(&c); d && !std::isfinite(*d))
                out += "null";
            else if (std::holds_alternative<std::string>(c))
                out += quote(std::get<std::string>(c));
            else
                out += cell_text(c);
        }
        out += "]";
    }
    out += t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

std::string render(const Table& t, TableFormat fmt)
{
    return fmt == TableFormat::kCsv ? to_csv(t) : to_json(t);
}

Table parse_csv(std::string_view text)
{
    Table t;
    std::size_t pos = 0;
    if (text.empty())
        return t;
    for (const Cell& c : read_record(text, pos))
        t.columns.push_back(std::holds_alternative<std::string>(c) ? std::get<std::string>(c)
                                                                   : cell_text(c));
    while (pos < text.size())
        t.rows.push_back(read_record(text, pos));
    return t;
}

Table parse_json_table(std::string_view text)
{
    Table t;
    auto j = nlohmann::json::parse(text);
    for (const auto& c : j.at("columns"))
        t.columns.push_back(c.get<std::string>());
    for (const auto& r : j.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r) {
            if (c.is_number_integer())
                row.emplace_back(c.get<std::int64_t>());
            else if (c.is_number())
                row.emplace_back(c.get<double>());
            else if (c.is_null())
                row.emplace_back(std::nan(""));
            else
                row.emplace_back(c.get<std::string>());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_table(const Table& t, TableFormat fmt, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << render(t, fmt);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace ghznet
