#include "genbound/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "genbound/errors.hpp"

namespace genbound {

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

long CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<long>(i);
    return -1;
}

std::vector<std::string> CsvTable::missing(const std::vector<std::string>& required) const {
    std::vector<std::string> out;
    for (const std::string& r : required)
        if (column(r) < 0) out.push_back(r);
    return out;
}

const std::string& CsvTable::cell(std::size_t row, const std::string& name) const {
    const long c = column(name);
    if (c < 0) throw ContractError("csv: no column '" + name + "'");
    return rows.at(row).at(static_cast<std::size_t>(c));
}

double CsvTable::real(std::size_t row, const std::string& name) const {
    const std::string& s = cell(row, name);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw InputError("csv: row " + std::to_string(row + 2) + ", column " + name +
                         ": not a number: '" + s + "'");
    return v;
}

std::string CsvTable::to_text() const {
    std::string out;
    const auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << table.to_text();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    std::size_t number = 0;
    const auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw InputError(path.string() + ":" + std::to_string(number) + ": expected " +
                             std::to_string(t.header.size()) + " cells, found " +
                             std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw InputError(path.string() + ": missing header row");
    return t;
}

} // namespace genbound
