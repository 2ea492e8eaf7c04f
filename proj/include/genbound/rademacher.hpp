#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "genbound/classes.hpp"
#include "genbound/optim.hpp"

namespace genbound {

enum class EstimateMode { monte_carlo, exact_enumeration };

// Estimate of E_tau[ sup_f (2/n) sum_i tau_i f(x_i) ] on a fixed sample.
struct RademacherEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t tau_draws = 0;
    std::size_t restarts = 0;
    std::uint64_t seed = 0;
    EstimateMode mode = EstimateMode::monte_carlo;
    // Mean over draws of (best - worst) restart value: how much the inner
    // sup depends on initialization. Zero in exact mode.
    double restart_spread = 0.0;
};

struct RademacherConfig {
    std::size_t tau_draws = 100;
    OptConfig opt{0.25, 200, 20, 1, 0, 1.0}; // restarts = 20
    std::uint64_t seed = 0;
};

// Monte-Carlo over sign vectors; the inner sup over the continuous class is
// approximated by best-of-restarts projected gradient ascent.
RademacherEstimate empirical_rademacher(const ClassSpec& spec, const Matrix& sample,
                                        const RademacherConfig& cfg);

// Exact expectation over all 2^n sign vectors of the max over class members.
// Refuses when n > 20 or cardinality * 2^n > work_cap.
RademacherEstimate exact_rademacher(const FiniteClass& finite, const Matrix& sample,
                                    double work_cap = 1e6);

// E sup_{D,G} (2/m) sum_j tau_j D(G(z_j)), jointly optimized over both
// classes. With frozen_gen set, only D is optimized and G is held fixed.
RademacherEstimate empirical_rademacher_composition(const ClassSpec& disc_spec,
                                                    const ClassSpec& gen_spec,
                                                    const Matrix& z_sample,
                                                    const RademacherConfig& cfg,
                                                    const std::optional<Generator>& frozen_gen =
                                                        std::nullopt);

std::string to_string(EstimateMode mode);

} // namespace genbound
