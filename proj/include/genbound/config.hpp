#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genbound/classes.hpp"
#include "genbound/dist.hpp"
#include "genbound/errors.hpp"
#include "genbound/gap.hpp"
#include "genbound/optim.hpp"
#include "genbound/rademacher.hpp"

namespace genbound {

// A malformed or invalid configuration. line is 0 when the problem is a
// missing key rather than a particular line.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& field,
                const std::string& message);

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

// Flat `key = value` text: one assignment per line, '#' starts a comment,
// keys are dotted identifiers, list values are comma separated.
class ConfigFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };

    static ConfigFile parse(std::istream& in, const std::string& source);
    static ConfigFile load(const std::filesystem::path& path);

    const std::string& source() const noexcept { return source_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const Entry* find(const std::string& key) const;

    std::string get_string(const std::string& key, const std::optional<std::string>& fallback) const;
    double get_real(const std::string& key, const std::optional<double>& fallback) const;
    std::size_t get_count(const std::string& key, const std::optional<std::size_t>& fallback) const;
    bool get_bool(const std::string& key, const std::optional<bool>& fallback) const;

    std::vector<double> get_reals(const std::string& key,
                                  const std::optional<std::vector<double>>& fallback) const;
    // Items may be inclusive ranges written a..b.
    std::vector<std::uint64_t> get_counts(const std::string& key,
                                          const std::optional<std::vector<std::uint64_t>>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         const std::optional<std::vector<std::string>>& fallback) const;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    std::string source_;
    std::vector<Entry> entries_;
};

enum class ExperimentKind { rademacher, bounds, gap_sweep, train };

std::string to_string(ExperimentKind kind);

// Which estimators a rademacher sweep runs.
enum class RademacherSweepMode { monte_carlo, exact, both };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::gap_sweep;
    std::filesystem::path output_dir;
    std::size_t threads = 0; // 0: hardware concurrency

    std::vector<std::uint64_t> seeds;
    double delta = 0.025;

    std::size_t d_x = 1;
    std::size_t d_z = 1;
    SourceSpec x_source;
    SourceSpec z_source;

    std::size_t disc_width = 1;
    Activation disc_activation = Activation::clamp01;
    std::size_t gen_width = 1;
    Activation gen_activation = Activation::clamp01;

    std::vector<std::uint64_t> n_values;
    std::vector<std::uint64_t> m_values; // empty: m paired with n
    std::vector<double> V_values;
    std::vector<double> lambda_values;
    std::vector<std::uint64_t> widths; // rademacher sweep

    std::size_t holdout = 100000;
    GapMode gap_mode = GapMode::er1;
    OptConfig opt;
    RademacherConfig complexity;

    RademacherSweepMode rademacher_mode = RademacherSweepMode::monte_carlo;
    std::vector<std::uint64_t> grid_levels;
    double work_cap = 1e6;

    double C = 1.0;
    double C1 = 1.0;
    double t = 0.0; // 0: n + 1
    std::size_t delta_grid = 64;
    std::size_t bounds_grid_levels = 3;
    std::optional<double> card_D;
    std::optional<double> card_G;

    bool record_runtime = false;
    std::vector<std::string> plots;

    // Every assignment as written, for the run manifest.
    std::vector<std::pair<std::string, std::string>> echo;

    ClassSpec disc_spec(double V) const;
    ClassSpec gen_spec(double V) const;
    // (n, m) pairs in sweep order.
    std::vector<std::pair<std::size_t, std::size_t>> sample_sizes() const;
};

// Relative output_dir and dataset paths are resolved against base_dir.
ExperimentConfig parse_experiment_config(const ConfigFile& file,
                                         const std::filesystem::path& base_dir);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

} // namespace genbound
