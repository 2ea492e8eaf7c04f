#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "genbound/config.hpp"
#include "genbound/csv.hpp"

namespace genbound {

// A failure while executing an experiment; the message names the failing
// operation and the sweep point.
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& gap_sweep_columns();
const std::vector<std::string>& rademacher_columns();
const std::vector<std::string>& bounds_columns();
const std::vector<std::string>& train_columns();

struct ExperimentTables {
    CsvTable results;
    CsvTable trace; // train experiment only
};

// Computes every row without touching the filesystem. Rows are ordered by
// sweep position, independent of the worker count.
ExperimentTables compute_experiment(const ExperimentConfig& cfg);

struct RunSummary {
    std::filesystem::path results_csv;
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> plots;
    std::size_t rows = 0;
    double wall_seconds = 0.0;
};

// Writes results.csv, meta.json and the configured plots under
// cfg.output_dir.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& config_path);

} // namespace genbound
