#include "genbound/objective.hpp"

#include <cmath>

namespace genbound {

namespace {

void check_dims(const Networks& nets, std::size_t x_dim, std::size_t z_dim) {
    if (nets.gen.output_dim() != nets.disc.input_dim)
        throw ContractError("objective: generator output_dim " +
                            std::to_string(nets.gen.output_dim()) +
                            " does not match discriminator input_dim " +
                            std::to_string(nets.disc.input_dim));
    if (x_dim != nets.disc.input_dim)
        throw ContractError("objective: x batch dimension does not match discriminator");
    if (nets.gen.input_dim() != z_dim)
        throw ContractError("objective: z batch dimension does not match generator");
}

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

} // namespace

std::uint64_t population_x_stream(std::uint64_t seed) { return derive_stream("objective.px", seed); }
std::uint64_t population_z_stream(std::uint64_t seed) { return derive_stream("objective.pz", seed); }

ObjectiveTerms objective_terms(const Networks& nets, const Matrix& x_batch, const Matrix& z_batch) {
    if (x_batch.empty() || z_batch.empty()) throw ContractError("objective: empty batch");
    check_dims(nets, x_batch.cols(), z_batch.cols());
    const Matrix images = eval_generator_batch(nets.gen, nets.gen_activation, SampleBatch(z_batch));

    ObjectiveTerms t;
    t.real = mean(eval_batch(nets.disc, nets.disc_activation, SampleBatch(x_batch)));
    t.fake = mean(eval_batch(nets.disc, nets.disc_activation, SampleBatch(images)));
    double acc = 0.0;
    for (std::size_t j = 0; j < images.rows(); ++j) {
        double row = 0.0;
        for (double v : images.row(j)) row += v;
        acc += row / static_cast<double>(images.cols());
    }
    t.output = acc / static_cast<double>(images.rows());
    return t;
}

double inner_value_empirical_full(const Networks& nets, double lambda, const Matrix& x_batch,
                                  const Matrix& z_batch) {
    return objective_terms(nets, x_batch, z_batch).value(lambda);
}

double inner_value_empirical_disc(const Networks& nets, const ObjectiveConfig& cfg,
                                  const Matrix& x_batch, const SourceSpec& pz) {
    if (x_batch.empty()) throw ContractError("inner_value_empirical_disc: empty x batch");
    const Matrix z = sample(pz, cfg.mc_samples, population_z_stream(cfg.seed));
    return inner_value_empirical_full(nets, cfg.lambda, x_batch, z);
}

namespace {

struct PhiTerms {
    double real = 0.0;       // E phi(D(x))
    double fake = 0.0;       // E phi(D(G(z)))
    double fake_flip = 0.0;  // E phi(1 - D(G(z)))
    double output = 0.0;     // E mean_k G_k(z)
    double output_phi = 0.0; // E mean_k phi(G_k(z))
};

PhiTerms population_phi_terms(const Networks& nets, const ObjectiveConfig& cfg,
                              const SourceSpec& px, const SourceSpec& pz) {
    if (cfg.mc_samples == 0) throw ContractError("objective: mc_samples must be >= 1");
    const Matrix x = sample(px, cfg.mc_samples, population_x_stream(cfg.seed));
    const Matrix z = sample(pz, cfg.mc_samples, population_z_stream(cfg.seed));
    check_dims(nets, x.cols(), z.cols());
    const Matrix images = eval_generator_batch(nets.gen, nets.gen_activation, SampleBatch(z));
    const auto dx = eval_batch(nets.disc, nets.disc_activation, SampleBatch(x));
    const auto dg = eval_batch(nets.disc, nets.disc_activation, SampleBatch(images));

    PhiTerms t;
    for (double v : dx) t.real += cfg.phi(v);
    for (double v : dg) {
        t.fake += cfg.phi(v);
        t.fake_flip += cfg.phi(1.0 - v);
    }
    const double k = static_cast<double>(images.cols());
    for (std::size_t j = 0; j < images.rows(); ++j) {
        double plain = 0.0;
        double mapped = 0.0;
        for (double v : images.row(j)) {
            plain += v;
            mapped += cfg.phi(v);
        }
        t.output += plain / k;
        t.output_phi += mapped / k;
    }
    const double n = static_cast<double>(x.rows());
    const double m = static_cast<double>(z.rows());
    t.real /= n;
    t.fake /= m;
    t.fake_flip /= m;
    t.output /= m;
    t.output_phi /= m;
    return t;
}

} // namespace

double inner_value_population(const Networks& nets, const ObjectiveConfig& cfg,
                              const SourceSpec& px, const SourceSpec& pz) {
    const PhiTerms t = population_phi_terms(nets, cfg, px, pz);
    return t.real - t.fake - cfg.lambda * t.output;
}

double phi_variant_value(const Networks& nets, const ObjectiveConfig& cfg, const SourceSpec& px,
                         const SourceSpec& pz, ObjectiveVariant variant) {
    const PhiTerms t = population_phi_terms(nets, cfg, px, pz);
    const double eq5 = t.real + t.fake_flip - cfg.lambda * t.output_phi;
    switch (variant) {
    case ObjectiveVariant::eq5:
        return eq5;
    case ObjectiveVariant::eq6:
        return eq5 - 2.0 * cfg.phi(0.5);
    case ObjectiveVariant::eq7:
        return t.real - t.fake - cfg.lambda * t.output;
    }
    return eq5;
}

std::string to_string(ObjectiveVariant v) {
    switch (v) {
    case ObjectiveVariant::eq5:
        return "eq5";
    case ObjectiveVariant::eq6:
        return "eq6";
    case ObjectiveVariant::eq7:
        return "eq7";
    }
    return "?";
}

} // namespace genbound
