#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "genbound/csv.hpp"
#include "genbound/errors.hpp"

namespace genbound {

enum class PlotKind { gap_vs_n, bound_vs_empirical, complexity_vs_n };

PlotKind parse_plot_kind(const std::string& s);
std::string to_string(PlotKind kind);

std::vector<std::string> plot_required_columns(PlotKind kind);

// The CSV lacks columns the plot needs.
class SchemaError : public InputError {
public:
    explicit SchemaError(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

// SVG document with log-scaled axes:
//   gap_vs_n            per-row |gap| scatter, per-lambda median line and
//                       median bound_conservative curve, against n
//   bound_vs_empirical  |gap| against bound_conservative with the diagonal
//   complexity_vs_n     estimate scatter, per-series median line and
//                       massart_bound curve, against n
// Scatter points are <circle class="point">, medians
// <polyline class="median">, bound curves <polyline class="bound">.
std::string render_plot(const CsvTable& table, PlotKind kind);

void plot_csv(const std::filesystem::path& csv, PlotKind kind, const std::filesystem::path& out);

} // namespace genbound
