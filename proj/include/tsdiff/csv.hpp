#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tsdiff::csv {

/// Shortest-safe round-trip text: 17 significant digits.
std::string format_double(double value);

/// Strict parse of a full field (surrounding blanks allowed). Throws invalid-input.
double parse_double(std::string_view field);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Header names plus column-major values.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

std::string to_string(const Table& table);

/// Throws io on unreadable input, invalid-input on malformed rows.
Table parse(std::string_view text);

}  // namespace tsdiff::csv
