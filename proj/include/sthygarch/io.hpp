#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sthygarch {

struct LoadOptions {
    // Column name (matched against the header) or zero-based index. Empty picks
    // a column named "y", then "return", then the first column.
    std::string column;
    // Treat the column as prices and convert to 100 * (ln p_t - ln p_{t-1}).
    bool prices = false;
    char delimiter = ',';
};

// Reads one numeric column from a CSV file with a header row. Lines starting
// with '#' are skipped. Errors name the offending data row and file line.
std::vector<double> load_returns(const std::string& path, const LoadOptions& options = {});
std::vector<double> read_returns(std::istream& in, const LoadOptions& options = {});

// Percent log returns; throws DomainError on non-positive prices or fewer than two prices.
std::vector<double> prices_to_returns(std::span<const double> prices);

// Fixed 17-significant-digit rendering, so numbers round-trip and output bytes are stable.
std::string format_number(double value);

} // namespace sthygarch
