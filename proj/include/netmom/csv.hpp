#pragma once

#include <string>
#include <vector>

namespace netmom::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number per row, for diagnostics.
    std::vector<int> line_numbers;

    int column(const std::string& name) const;      // -1 if absent
    int require_column(const std::string& name) const;  // throws DataError
};

// Reads a comma-separated file with a header row. Fields are plain (no
// quoting); surrounding whitespace is trimmed. Blank lines are skipped.
Table read_file(const std::string& path);
Table parse(const std::string& text, const std::string& origin);

// Locale-independent numeric parse; throws DataError with context.
double parse_double(const std::string& field, const std::string& context);

std::string format_double(double v);  // round-trip precision

}  // namespace netmom::csv
