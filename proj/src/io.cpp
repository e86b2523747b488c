#include "sthygarch/io.hpp"

#include "sthygarch/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sthygarch {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& value) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end && std::isfinite(value);
}

std::size_t pick_column(const std::vector<std::string>& header, const std::string& wanted) {
    auto find = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return static_cast<std::ptrdiff_t>(i);
        }
        return -1;
    };
    if (wanted.empty()) {
        for (const char* name : {"y", "return"}) {
            if (auto i = find(name); i >= 0) return static_cast<std::size_t>(i);
        }
        return 0;
    }
    if (auto i = find(wanted); i >= 0) return static_cast<std::size_t>(i);
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(wanted.data(), wanted.data() + wanted.size(), index);
    if (ec == std::errc() && ptr == wanted.data() + wanted.size() && index < header.size()) return index;
    throw ConfigurationError("column '" + wanted + "' not found in header");
}

} // namespace

std::vector<double> read_returns(std::istream& in, const LoadOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') continue;
        header = split(line, options.delimiter);
        break;
    }
    if (header.empty()) throw ConfigurationError("input has no header row");
    const std::size_t col = pick_column(header, options.column);
    const std::string col_name = trim(header[col]);

    std::vector<std::pair<std::size_t, std::string>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') continue;
        rows.emplace_back(line_no, line);
    }
    // Trailing blank lines are formatting; blank lines inside the data are empty cells.
    while (!rows.empty() && trim(rows.back().second).empty()) rows.pop_back();

    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& [file_line, text] = rows[r];
        const auto cells = split(text, options.delimiter);
        const std::string where = "row " + std::to_string(r + 1) + " (line " + std::to_string(file_line) + ")";
        if (col >= cells.size() || trim(cells[col]).empty()) {
            throw ConfigurationError(where + ": empty value in column '" + col_name + "'");
        }
        double v = 0.0;
        if (!parse_double(trim(cells[col]), v)) {
            throw ConfigurationError(where + ": non-numeric value '" + trim(cells[col]) + "' in column '" +
                                     col_name + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ConfigurationError("input contains no data rows");
    return options.prices ? prices_to_returns(values) : values;
}

std::vector<double> load_returns(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    return read_returns(in, options);
}

std::vector<double> prices_to_returns(std::span<const double> prices) {
    if (prices.size() < 2) throw DomainError("price-to-return conversion needs at least two prices");
    std::vector<double> out;
    out.reserve(prices.size() - 1);
    for (std::size_t t = 0; t < prices.size(); ++t) {
        if (!(prices[t] > 0.0)) {
            throw DomainError("price at row " + std::to_string(t + 1) + " is not positive");
        }
        if (t > 0) out.push_back(100.0 * (std::log(prices[t]) - std::log(prices[t - 1])));
    }
    return out;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace sthygarch
