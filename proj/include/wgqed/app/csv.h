#pragma once

#include <string>
#include <variant>
#include <vector>

// CSV text: '# run_hash=...' line, header row, LF endings, 17 significant digits.
namespace wgqed::app {

using Cell = std::variant<double, long long, std::string>;

class CsvTable {
public:
    CsvTable(std::string run_hash, std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::string run_hash_;
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double value);

// RFC 4180 quoting when needed.
std::string quote_field(const std::string &text);

} // namespace wgqed::app
