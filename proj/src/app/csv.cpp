#include "wgqed/app/csv.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wgqed::app {

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string quote_field(const std::string &text)
{
    if (text.find_first_of(",\"\r\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::string run_hash, std::vector<std::string> columns)
    : run_hash_(std::move(run_hash)), columns_(std::move(columns))
{
}

void CsvTable::add_row(std::vector<Cell> row)
{
    if (row.size() != columns_.size()) {
        throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const
{
    std::string out = "# run_hash=" + run_hash_ + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out += (i ? "," : "") + quote_field(columns_[i]);
    }
    out += "\n";
    for (const auto &row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ",";
            }
            const Cell &c = row[i];
            if (const auto *d = std::get_if<double>(&c)) {
                out += format_double(*d);
            } else if (const auto *n = std::get_if<long long>(&c)) {
                out += std::to_string(*n);
            } else {
                out += quote_field(std::get<std::string>(c));
            }
        }
        out += "\n";
    }
    return out;
}

} // namespace wgqed::app
