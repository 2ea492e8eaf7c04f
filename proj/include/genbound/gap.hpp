#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "genbound/bounds.hpp"
#include "genbound/dist.hpp"
#include "genbound/optim.hpp"
#include "genbound/rademacher.hpp"

namespace genbound {

// er1: trained (D, G) evaluated on training samples vs on a hold-out.
// er2: G fixed at the trained generator; D re-maximized against empirical
//      x with population noise terms vs against population terms only.
enum class GapMode { er1, er2 };

struct GapConfig {
    ClassSpec disc;
    ClassSpec gen;
    SourceSpec px;
    SourceSpec pz;
    std::size_t n = 50;
    std::size_t m = 50;
    double lambda = 0.0;
    double delta = 0.025;
    std::size_t holdout = 100000;
    OptConfig opt;
    RademacherConfig complexity;
    GapMode mode = GapMode::er1;
    std::uint64_t seed = 0;
    // Population draws reuse the training streams (with holdout == n == m
    // both sides then see identical samples).
    bool share_holdout_streams = false;
};

struct GapRecord {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t d_x = 0;
    std::size_t d_z = 0;
    double V = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    double value_empirical = 0.0;
    double value_population = 0.0;
    double gap = 0.0; // value_empirical - value_population
    double rademacher_D = 0.0;
    double rademacher_DG = 0.0;
    double rademacher_G = 0.0;
    double bound_verbatim = 0.0;
    double bound_conservative = 0.0;
    std::uint64_t seed = 0;
    GapMode mode = GapMode::er1;
};

// Stream ids for the training and hold-out draws of one gap measurement.
std::uint64_t train_x_stream(std::uint64_t seed);
std::uint64_t train_z_stream(std::uint64_t seed);
std::uint64_t holdout_x_stream(std::uint64_t seed);
std::uint64_t holdout_z_stream(std::uint64_t seed);

GapRecord measure_gap(const GapConfig& cfg);

std::string to_string(GapMode mode);
GapMode parse_gap_mode(const std::string& s);

} // namespace genbound
