#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlsrm {

/// Rectangular CSV data: '#' comment lines, a header row, comma-separated cells.
struct Table {
    std::vector<std::string> comments;  // without the leading '#'
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name`; FormatError if absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

/// Shortest round-trip decimal form, independent of the locale.
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const Table& t);
Table read_csv(const std::filesystem::path& path);

/// Writes text to path, creating parent directories. IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nlsrm
