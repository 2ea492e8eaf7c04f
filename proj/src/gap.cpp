#include "genbound/gap.hpp"

namespace genbound {

std::uint64_t train_x_stream(std::uint64_t seed) { return derive_stream("gap.train_x", seed); }
std::uint64_t train_z_stream(std::uint64_t seed) { return derive_stream("gap.train_z", seed); }
std::uint64_t holdout_x_stream(std::uint64_t seed) { return derive_stream("gap.holdout_x", seed); }
std::uint64_t holdout_z_stream(std::uint64_t seed) { return derive_stream("gap.holdout_z", seed); }

GapRecord measure_gap(const GapConfig& cfg) {
    cfg.disc.validate();
    cfg.gen.validate();
    if (cfg.holdout < 10000) throw ContractError("measure_gap: holdout must be >= 10^4");
    if (cfg.n < 1 || cfg.m < 1) throw ContractError("measure_gap: sample sizes must be >= 1");
    if (cfg.px.dim != cfg.disc.input_dim || cfg.pz.dim != cfg.gen.input_dim)
        throw ContractError("measure_gap: source dimensions do not match class specs");

    const Matrix x = sample(cfg.px, cfg.n, train_x_stream(cfg.seed));
    const Matrix z = sample(cfg.pz, cfg.m, train_z_stream(cfg.seed));
    const std::uint64_t hx = cfg.share_holdout_streams ? train_x_stream(cfg.seed) : holdout_x_stream(cfg.seed);
    const std::uint64_t hz = cfg.share_holdout_streams ? train_z_stream(cfg.seed) : holdout_z_stream(cfg.seed);
    const Matrix x_pop = sample(cfg.px, cfg.holdout, hx);
    const Matrix z_pop = sample(cfg.pz, cfg.holdout, hz);

    OptConfig opt = cfg.opt;
    opt.seed = derive_stream("gap.train", cfg.seed);
    const TrainResult trained = minimax_train(cfg.disc, cfg.gen, x, z, cfg.lambda, opt);

    GapRecord rec;
    rec.n = cfg.n;
    rec.m = cfg.m;
    rec.d_x = cfg.disc.input_dim;
    rec.d_z = cfg.gen.input_dim;
    rec.V = cfg.disc.budget;
    rec.lambda = cfg.lambda;
    rec.delta = cfg.delta;
    rec.seed = cfg.seed;
    rec.mode = cfg.mode;

    if (cfg.mode == GapMode::er1) {
        const Networks nets{trained.d_hat, cfg.disc.activation, trained.g_hat, cfg.gen.activation};
        rec.value_empirical = objective_terms(nets, x, z).value(cfg.lambda);
        rec.value_population = objective_terms(nets, x_pop, z_pop).value(cfg.lambda);
    } else {
        const Generator& g = trained.g_hat;
        const auto emp = maximize_disc(cfg.disc, &g, cfg.gen.activation, x, z_pop, opt, cfg.lambda,
                                       trained.d_hat);
        const auto pop = maximize_disc(cfg.disc, &g, cfg.gen.activation, x_pop, z_pop, opt,
                                       cfg.lambda, trained.d_hat);
        rec.value_empirical = emp.second;
        rec.value_population = pop.second;
    }
    rec.gap = rec.value_empirical - rec.value_population;

    RademacherConfig rc = cfg.complexity;
    rc.seed = derive_stream("gap.complexity", cfg.seed);
    ClassSpec head = cfg.gen;
    head.output_dim = 1;
    head.role = Role::discriminator;
    rec.rademacher_D = empirical_rademacher(cfg.disc, x, rc).mean;

    const double Q_x = cfg.disc.envelope();
    const double Q_z = cfg.gen.envelope();
    const double n = static_cast<double>(cfg.n);
    const double m = static_cast<double>(cfg.m);
    if (cfg.mode == GapMode::er1) {
        rec.rademacher_G = empirical_rademacher(head, z, rc).mean;
        rec.rademacher_DG = empirical_rademacher_composition(cfg.disc, cfg.gen, z, rc).mean;
        rec.bound_verbatim = theorem1_full(rec.rademacher_D, rec.rademacher_DG, rec.rademacher_G,
                                           Q_x, Q_z, cfg.lambda, n, m, cfg.delta,
                                           BoundVariant::verbatim)
                                 .value;
        rec.bound_conservative = theorem1_full(rec.rademacher_D, rec.rademacher_DG,
                                               rec.rademacher_G, Q_x, Q_z, cfg.lambda, n, m,
                                               cfg.delta, BoundVariant::conservative)
                                     .value;
    } else {
        const double b = theorem1_disc(rec.rademacher_D, Q_x, n, cfg.delta).value;
        rec.bound_verbatim = b;
        rec.bound_conservative = b;
    }
    return rec;
}

std::string to_string(GapMode mode) { return mode == GapMode::er1 ? "er1" : "er2"; }

GapMode parse_gap_mode(const std::string& s) {
    if (s == "er1") return GapMode::er1;
    if (s == "er2") return GapMode::er2;
    throw ContractError("unknown gap mode '" + s + "'");
}

} // namespace genbound
