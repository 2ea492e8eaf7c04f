#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "genbound/classes.hpp"
#include "genbound/dist.hpp"

namespace genbound {

enum class PhiKind { identity, guarded_log };

// Measuring function phi: identity, or ln(max(x, floor)).
struct Phi {
    PhiKind kind = PhiKind::identity;
    double floor = 1e-6;

    double operator()(double x) const {
        return kind == PhiKind::identity ? x : std::log(x > floor ? x : floor);
    }

    static Phi identity() { return {PhiKind::identity, 1e-6}; }
    static Phi guarded_log(double floor = 1e-6) { return {PhiKind::guarded_log, floor}; }
};

struct ObjectiveConfig {
    double lambda = 0.0;
    Phi phi = Phi::identity();
    std::size_t mc_samples = 10000;
    std::uint64_t seed = 0;
};

// A discriminator and generator with their activations.
struct Networks {
    TwoLayerParams disc;
    Activation disc_activation = Activation::clamp01;
    Generator gen;
    Activation gen_activation = Activation::clamp01;
};

// The three sample means the objective is built from:
//   real   = mean_i D(x_i)
//   fake   = mean_j D(G(z_j))
//   output = mean_j mean_k G_k(z_j)
struct ObjectiveTerms {
    double real = 0.0;
    double fake = 0.0;
    double output = 0.0;

    double value(double lambda) const { return real - fake - lambda * output; }
};

ObjectiveTerms objective_terms(const Networks& nets, const Matrix& x_batch, const Matrix& z_batch);

// (1/n) sum D(x_i) - (1/m) sum D(G(z_j)) - lambda (1/m) sum mean(G(z_j)).
double inner_value_empirical_full(const Networks& nets, double lambda, const Matrix& x_batch,
                                  const Matrix& z_batch);

// As above with the two noise expectations estimated from cfg.mc_samples
// draws of pz.
double inner_value_empirical_disc(const Networks& nets, const ObjectiveConfig& cfg,
                                  const Matrix& x_batch, const SourceSpec& pz);

// Monte-Carlo estimate of E phi(D(x)) - E phi(D(G(z))) - lambda E mean(G(z)).
double inner_value_population(const Networks& nets, const ObjectiveConfig& cfg,
                              const SourceSpec& px, const SourceSpec& pz);

enum class ObjectiveVariant { eq5, eq6, eq7 };

// eq5: E phi(D(x)) + E phi(1 - D(G(z))) - lambda E mean_k phi(G_k(z))
// eq6: eq5 - 2 phi(1/2)
// eq7: inner_value_population
// All three share the same Monte-Carlo draws for a given cfg.seed.
double phi_variant_value(const Networks& nets, const ObjectiveConfig& cfg, const SourceSpec& px,
                         const SourceSpec& pz, ObjectiveVariant variant);

// Stream ids used for the Monte-Carlo draws of an objective evaluation.
std::uint64_t population_x_stream(std::uint64_t seed);
std::uint64_t population_z_stream(std::uint64_t seed);

std::string to_string(ObjectiveVariant v);

} // namespace genbound
