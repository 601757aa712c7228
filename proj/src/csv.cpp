#include "tsdiff/csv.hpp"

#include <array>
#include <charconv>
#include <string>

#include "tsdiff/error.hpp"

namespace tsdiff::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error(ErrorKind::range, "cannot format value");
    return std::string(buf.data(), end);
}

double parse_double(std::string_view field) {
    const auto text = trim(field);
    if (!text.empty() && text.front() == '+') return parse_double(text.substr(1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw Error(ErrorKind::invalid_input, "not a number: '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string to_string(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) out += ',';
        out += table.header[c];
    }
    out += '\n';
    const std::size_t rows = table.rows();
    out.reserve(out.size() + rows * table.columns.size() * 24);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += ',';
            out += format_double(table.columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

Table parse(std::string_view text) {
    Table table;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (table.header.empty()) {
            for (auto f : fields) table.header.emplace_back(f);
            table.columns.resize(fields.size());
            continue;
        }
        if (fields.size() != table.header.size())
            throw Error(ErrorKind::invalid_input, "line " + std::to_string(line_no) + ": expected " +
                                                      std::to_string(table.header.size()) + " fields");
        for (std::size_t c = 0; c < fields.size(); ++c) table.columns[c].push_back(parse_double(fields[c]));
    }
    if (table.header.empty()) throw Error(ErrorKind::invalid_input, "CSV has no header row");
    return table;
}

}  // namespace tsdiff::csv
