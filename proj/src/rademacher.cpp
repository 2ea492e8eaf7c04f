#include "genbound/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genbound {

namespace {

std::vector<double> draw_coefficients(std::uint64_t seed, std::size_t draw, std::size_t n) {
    CounterRng rng(seed, derive_stream("rademacher.tau", draw));
    std::vector<double> c(n);
    const double scale = 2.0 / static_cast<double>(n);
    for (double& v : c) v = scale * rng.sign();
    return c;
}

RademacherEstimate summarize(const std::vector<double>& sups, const std::vector<double>& spreads,
                             const RademacherConfig& cfg) {
    RademacherEstimate e;
    e.tau_draws = sups.size();
    e.restarts = cfg.opt.restarts;
    e.seed = cfg.seed;
    e.mode = EstimateMode::monte_carlo;
    double sum = 0.0;
    for (double s : sups) sum += s;
    e.mean = sum / static_cast<double>(sups.size());
    if (sups.size() > 1) {
        double ss = 0.0;
        for (double s : sups) ss += (s - e.mean) * (s - e.mean);
        const double sd = std::sqrt(ss / static_cast<double>(sups.size() - 1));
        e.std_error = sd / std::sqrt(static_cast<double>(sups.size()));
    }
    double spread = 0.0;
    for (double s : spreads) spread += s;
    e.restart_spread = spread / static_cast<double>(spreads.size());
    return e;
}

void check_config(const RademacherConfig& cfg) {
    if (cfg.tau_draws < 1) throw ContractError("rademacher: tau_draws must be >= 1");
    cfg.opt.validate();
}

} // namespace

RademacherEstimate empirical_rademacher(const ClassSpec& spec, const Matrix& sample,
                                        const RademacherConfig& cfg) {
    spec.validate();
    check_config(cfg);
    if (sample.empty()) throw ContractError("empirical_rademacher: empty sample");
    if (sample.cols() != spec.input_dim)
        throw ContractError("empirical_rademacher: sample dimension does not match class");
    ClassSpec scalar = spec;
    scalar.output_dim = 1;
    scalar.role = Role::discriminator;

    const SampleBatch batch(sample);
    OptConfig opt = cfg.opt;
    opt.seed = cfg.seed;
    std::vector<double> sups;
    std::vector<double> spreads;
    sups.reserve(cfg.tau_draws);
    for (std::size_t t = 0; t < cfg.tau_draws; ++t) {
        const auto coeff = draw_coefficients(cfg.seed, t, sample.rows());
        const MaximizeResult r = maximize_functional(
            scalar, batch, coeff, opt, derive_stream("rademacher.restart", t));
        // The zero function is always a member, so the sup is at least 0.
        sups.push_back(std::max(r.value, 0.0));
        const auto [lo, hi] = std::minmax_element(r.restart_values.begin(), r.restart_values.end());
        spreads.push_back(*hi - *lo);
    }
    return summarize(sups, spreads, cfg);
}

RademacherEstimate exact_rademacher(const FiniteClass& finite, const Matrix& sample,
                                    double work_cap) {
    const std::size_t n = sample.rows();
    if (n == 0) throw ContractError("exact_rademacher: empty sample");
    if (n > 20) {
        throw CapExceeded("exact_rademacher: 2^n sign vectors with n = " + std::to_string(n),
                          std::ldexp(1.0, static_cast<int>(n)), std::ldexp(1.0, 20));
    }
    const double cost = static_cast<double>(finite.cardinality()) * std::ldexp(1.0, static_cast<int>(n));
    if (cost > work_cap) {
        throw CapExceeded("exact_rademacher: |class| * 2^n for |class| = " +
                              std::to_string(finite.cardinality()) + ", n = " + std::to_string(n),
                          cost, work_cap);
    }
    const auto values = finite.member_values(sample);
    const auto& k = kernels::active();
    const std::size_t patterns = std::size_t{1} << n;
    std::vector<double> sign(n);
    double total = 0.0;
    for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
        for (std::size_t i = 0; i < n; ++i) sign[i] = ((pattern >> i) & 1U) ? -1.0 : 1.0;
        total += k.max_signed_sum(values.data(), n, finite.cardinality(), sign.data());
    }
    RademacherEstimate e;
    e.mean = (2.0 / static_cast<double>(n)) * total / static_cast<double>(patterns);
    e.std_error = 0.0;
    e.tau_draws = patterns;
    e.restarts = 0;
    e.mode = EstimateMode::exact_enumeration;
    return e;
}

RademacherEstimate empirical_rademacher_composition(const ClassSpec& disc_spec,
                                                    const ClassSpec& gen_spec,
                                                    const Matrix& z_sample,
                                                    const RademacherConfig& cfg,
                                                    const std::optional<Generator>& frozen_gen) {
    disc_spec.validate();
    gen_spec.validate();
    check_config(cfg);
    if (gen_spec.output_dim != disc_spec.input_dim)
        throw ContractError("composition: generator output_dim must equal disc input_dim");
    if (z_sample.empty()) throw ContractError("composition: empty sample");
    if (z_sample.cols() != gen_spec.input_dim)
        throw ContractError("composition: sample dimension does not match generator");

    if (frozen_gen) {
        const Matrix images =
            eval_generator_batch(*frozen_gen, gen_spec.activation, SampleBatch(z_sample));
        return empirical_rademacher(disc_spec, images, cfg);
    }

    const SampleBatch noise(z_sample);
    const std::size_t m = z_sample.rows();
    std::vector<double> sups;
    std::vector<double> spreads;
    for (std::size_t t = 0; t < cfg.tau_draws; ++t) {
        const auto coeff = draw_coefficients(cfg.seed, t, m);
        const CompositionFunctional objective(disc_spec.activation, gen_spec.activation, noise, coeff);
        const std::uint64_t stream = derive_stream("rademacher.composition", t);
        double best = -std::numeric_limits<double>::infinity();
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < cfg.opt.restarts; ++r) {
            CounterRng rng(cfg.seed, derive_stream(stream, r));
            std::vector<TwoLayerParams> init;
            init.push_back(random_feasible(disc_spec, cfg.opt.init_scale, rng));
            for (std::size_t h = 0; h < gen_spec.output_dim; ++h)
                init.push_back(random_feasible(gen_spec, cfg.opt.init_scale, rng));
            const double v =
                projected_ascent(objective, std::move(init), cfg.opt.step_size, cfg.opt.steps).value;
            best = std::max(best, v);
            worst = std::min(worst, v);
        }
        sups.push_back(std::max(best, 0.0));
        spreads.push_back(best - worst);
    }
    return summarize(sups, spreads, cfg);
}

std::string to_string(EstimateMode mode) {
    return mode == EstimateMode::monte_carlo ? "monte_carlo" : "exact_enumeration";
}

} // namespace genbound
