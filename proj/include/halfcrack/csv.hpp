#pragma once

#include <string>
#include <vector>

namespace halfcrack {

/// Numeric CSV with a one-line header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a header column, or -1.
    int column(const std::string& name) const;
};

/// Throws IoError when the file cannot be opened, DomainError on a malformed
/// row (wrong field count or a non-numeric field).
CsvTable read_csv(const std::string& path);

/// Writes with %.17g so values round-trip exactly. Throws IoError on failure.
void write_csv(const std::string& path, const CsvTable& table);

/// Formats one value the way write_csv does.
std::string format_double(double v);

}  // namespace halfcrack
