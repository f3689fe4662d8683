#include "nlsrm/table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nlsrm/error.hpp"

namespace nlsrm {

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw FormatError("table has no column \"" + name + "\"");
    return static_cast<std::size_t>(it - columns.begin());
}

bool Table::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

double Table::number(std::size_t row, const std::string& name) const {
    const std::string& cell = rows.at(row).at(column(name));
    double v = 0.0;
    const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || end != cell.data() + cell.size())
        throw FormatError("cell \"" + cell + "\" in column \"" + name + "\" is not a number");
    return v;
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const Table& t) {
    std::string text;
    for (const auto& c : t.comments) text += "# " + c + "\n";
    auto join = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += ',';
            text += cells[i];
        }
        text += '\n';
    };
    join(t.columns);
    for (const auto& r : t.rows) {
        if (r.size() != t.columns.size()) throw FormatError("row width does not match the header in " + path.string());
        join(r);
    }
    write_text(path, text);
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Table t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (!header) {
            t.columns = std::move(cells);
            header = true;
        } else {
            if (cells.size() != t.columns.size())
                throw FormatError(path.string() + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(t.columns.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (!header) throw FormatError(path.string() + ": no header row");
    return t;
}

}  // namespace nlsrm
