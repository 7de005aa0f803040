#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace penreg {

// Fixed "%.10g" formatting keeps repeated runs byte-identical.
inline std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream iss(line);
    while (std::getline(iss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

// Plain CSV, first row header. No quoting support; numeric payloads only.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw std::runtime_error(path + ": ragged row with " + std::to_string(cells.size()) +
                                     " cells, expected " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    return table;
}

inline double parse_double(const std::string& cell) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("not a number: '" + cell + "'");
    }
    while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\t')) ++pos;
    if (pos != cell.size()) throw std::runtime_error("not a number: '" + cell + "'");
    return v;
}

}  // namespace penreg
