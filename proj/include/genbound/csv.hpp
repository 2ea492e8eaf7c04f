#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace genbound {

// Decimal form with 17 significant digits, enough to round-trip any double.
std::string format_real(double v);

// Comma-separated table. Cells never contain commas or quotes.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index, or -1 when absent.
    long column(const std::string& name) const;
    std::vector<std::string> missing(const std::vector<std::string>& required) const;
    double real(std::size_t row, const std::string& name) const;
    const std::string& cell(std::size_t row, const std::string& name) const;

    std::string to_text() const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Throws InputError on unreadable files and ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

} // namespace genbound
