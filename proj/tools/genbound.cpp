#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "genbound/config.hpp"
#include "genbound/experiments.hpp"
#include "genbound/plot.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kBadInput = 2;

int run_command(const std::string& config_path) {
    genbound::ExperimentConfig cfg;
    try {
        cfg = genbound::load_experiment_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "genbound: invalid config: " << e.what() << '\n';
        return kBadInput;
    }
    try {
        const auto summary = genbound::run_experiment(cfg, config_path);
        std::cout << "wrote " << summary.rows << " rows to " << summary.results_csv.string()
                  << " in " << summary.wall_seconds << " s\n";
        for (const auto& p : summary.plots) std::cout << "wrote " << p.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "genbound: run failed: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kOk;
}

int plot_command(const std::string& csv, const std::string& kind_name, const std::string& out) {
    genbound::PlotKind kind;
    try {
        kind = genbound::parse_plot_kind(kind_name);
    } catch (const std::exception& e) {
        std::cerr << "genbound: " << e.what() << '\n';
        return kBadInput;
    }
    try {
        genbound::plot_csv(csv, kind, out);
    } catch (const genbound::InputError& e) {
        std::cerr << "genbound: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "genbound: plot failed: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalization bound experiments for constrained two-layer GANs", "genbound"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file")->required();

    std::string csv_path, kind, out_path;
    auto* plot = app.add_subcommand("plot", "Render an SVG plot from a results CSV");
    plot->add_option("csv", csv_path, "results.csv from a run")->required();
    plot->add_option("--kind", kind, "gap_vs_n, bound_vs_empirical or complexity_vs_n")->required();
    plot->add_option("--out", out_path, "Output SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    if (run->parsed()) return run_command(config_path);
    return plot_command(csv_path, kind, out_path);
}
