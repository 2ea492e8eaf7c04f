#include "doctest.h"

#include <cmath>
#include <vector>

#include "genbound/objective.hpp"
#include "oracles.hpp"

using namespace genbound;
using oracle::Big;

namespace {

Networks random_networks(std::size_t d_x, std::size_t d_z, std::uint64_t stream,
                         Activation act = Activation::logistic) {
    CounterRng rng(31, stream);
    Networks nets;
    nets.disc_activation = act;
    nets.gen_activation = act;
    nets.disc = random_feasible(ClassSpec::discriminator(d_x, 3, act, 1.0), 1.0, rng);
    const auto gspec = ClassSpec::generator(d_z, d_x, 2, act, 1.0);
    for (std::size_t k = 0; k < d_x; ++k) nets.gen.heads.push_back(random_feasible(gspec, 1.0, rng));
    return nets;
}

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t stream) {
    CounterRng rng(32, stream);
    Matrix m(rows, cols);
    for (double& c : m.data()) c = rng.uniform();
    return m;
}

std::vector<double> row_vec(const Matrix& m, std::size_t r) {
    return {m.row(r).begin(), m.row(r).end()};
}

Big big_eval(const TwoLayerParams& p, const std::vector<double>& x, Activation act) {
    return oracle::big_network(p.first_weights, p.first_bias, p.second_weights, p.second_bias, x,
                               act == Activation::logistic);
}

// Independent re-summation of the empirical objective at 50 digits.
double big_empirical(const Networks& nets, double lambda, const Matrix& x, const Matrix& z) {
    Big real = 0, fake = 0, out = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) real += big_eval(nets.disc, row_vec(x, i), nets.disc_activation);
    for (std::size_t j = 0; j < z.rows(); ++j) {
        std::vector<double> image;
        Big head_sum = 0;
        for (const auto& h : nets.gen.heads) {
            const Big v = big_eval(h, row_vec(z, j), nets.gen_activation);
            head_sum += v;
            image.push_back(static_cast<double>(v));
        }
        fake += big_eval(nets.disc, image, nets.disc_activation);
        out += head_sum / Big(nets.gen.heads.size());
    }
    const Big n(x.rows()), m(z.rows());
    return static_cast<double>(real / n - fake / m - Big(lambda) * out / m);
}

Networks constant_networks(double d_value, double g_value, std::size_t d_x, std::size_t d_z) {
    Networks nets;
    nets.disc = TwoLayerParams::zeros(d_x, 1, 1.0);
    nets.disc.second_bias = d_value;
    const auto gspec = ClassSpec::generator(d_z, d_x, 1, Activation::clamp01, 1.0);
    nets.gen = Generator::zeros(gspec);
    for (auto& h : nets.gen.heads) h.second_bias = g_value;
    return nets;
}

} // namespace

TEST_CASE("population value: trivial examples") {
    const auto px = SourceSpec::beta_product(2, 2, 5, 1);
    const auto pz = SourceSpec::uniform(3, 2);
    ObjectiveConfig cfg{1.0, Phi::identity(), 1000, 3};
    CHECK(inner_value_population(constant_networks(0, 0, 2, 3), cfg, px, pz) == 0.0);

    cfg.lambda = 0.0;
    auto nets = random_networks(2, 3, 1);
    nets.disc = TwoLayerParams::zeros(2, 3, 1.0);
    nets.disc.second_bias = 0.7;
    CHECK(inner_value_population(nets, cfg, px, pz) == 0.0);

    auto bad = random_networks(2, 3, 1);
    bad.gen.heads.pop_back();
    CHECK_THROWS_AS(inner_value_population(bad, cfg, px, pz), ContractError);
}

TEST_CASE("population value agrees with quadrature on d = 1") {
    // D(x) = 0.8 s(x) - 0.3 s(0.5 - 0.5x) + 0.1, G(z) = 0.9 s(0.6 z + 0.2) + 0.05.
    Networks nets;
    nets.disc = TwoLayerParams::zeros(1, 2, 1.0);
    nets.disc.first_weights = {1.0, -0.5};
    nets.disc.first_bias = {0.0, 0.5};
    nets.disc.second_weights = {0.8, -0.3};
    nets.disc.second_bias = 0.1;
    nets.gen.heads.push_back(TwoLayerParams::zeros(1, 1, 1.0));
    auto& g = nets.gen.heads[0];
    g.first_weights = {0.6};
    g.first_bias = {0.2};
    g.second_weights = {0.9};
    g.second_bias = 0.05;
    const double lambda = 0.5;

    for (Activation act : {Activation::clamp01, Activation::logistic}) {
        nets.disc_activation = act;
        nets.gen_activation = act;
        const auto D = [&](double x) { return eval_network(nets.disc, act, std::vector<double>{x}); };
        const auto G = [&](double z) { return eval_network(g, act, std::vector<double>{z}); };
        const auto density = [](double x) { return 30.0 * x * std::pow(1.0 - x, 4); };

        // Midpoint rule on 1000 cells; also second moments for the standard error.
        const int cells = 1000;
        double ex = 0, ex2 = 0, ez = 0, ez2 = 0;
        for (int k = 0; k < cells; ++k) {
            const double u = (k + 0.5) / cells;
            const double fx = D(u);
            ex += fx * density(u) / cells;
            ex2 += fx * fx * density(u) / cells;
            const double fz = D(G(u)) + lambda * G(u);
            ez += fz / cells;
            ez2 += fz * fz / cells;
        }
        const double want = ex - ez;
        const double N = 1e6;
        const double se = std::sqrt((ex2 - ex * ex) / N + (ez2 - ez * ez) / N);

        ObjectiveConfig cfg{lambda, Phi::identity(), 1000000, 17};
        const double got = inner_value_population(nets, cfg, SourceSpec::beta_product(1, 2, 5, 4),
                                                  SourceSpec::uniform(1, 5));
        CHECK(std::abs(got - want) <= 3.0 * se);
    }
}

TEST_CASE("empirical full value: examples and the 50-digit oracle") {
    const Matrix x = random_batch(7, 2, 1);
    const Matrix z = random_batch(5, 3, 2);
    auto zero = constant_networks(0, 0, 2, 3);
    CHECK(inner_value_empirical_full(zero, 2.0, x, z) == 0.0);

    const auto nets = random_networks(2, 3, 7);
    const Matrix x1 = random_batch(1, 2, 3);
    const Matrix z1 = random_batch(1, 3, 4);
    const auto image = eval_generator(nets.gen, nets.gen_activation, z1.row(0));
    const double want1 = eval_network(nets.disc, nets.disc_activation, x1.row(0)) -
                         eval_network(nets.disc, nets.disc_activation, image) -
                         0.3 * (image[0] + image[1]) / 2.0;
    CHECK(inner_value_empirical_full(nets, 0.3, x1, z1) == doctest::Approx(want1).epsilon(1e-15));

    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const auto r = random_networks(2, 3, 100 + trial);
        const Matrix xb = random_batch(40, 2, 200 + trial);
        const Matrix zb = random_batch(30, 3, 300 + trial);
        const double lambda = 0.1 * static_cast<double>(trial % 7);
        CHECK(std::abs(inner_value_empirical_full(r, lambda, xb, zb) -
                       big_empirical(r, lambda, xb, zb)) <= 1e-12);
    }
    CHECK_THROWS_AS(inner_value_empirical_full(nets, 0.0, Matrix(), z), ContractError);
}

TEST_CASE("empirical disc value") {
    const auto pz = SourceSpec::uniform(3, 9);
    ObjectiveConfig cfg{0.4, Phi::identity(), 2000, 11};
    const Matrix x = random_batch(25, 2, 5);
    CHECK(inner_value_empirical_disc(constant_networks(0, 0, 2, 3), cfg, x, pz) == 0.0);

    // Constant batch with a pass-through discriminator: the first term is D(c).
    Networks pass = constant_networks(0, 0, 1, 1);
    pass.disc.first_weights = {1.0};
    pass.disc.second_weights = {1.0};
    const Matrix c(10, 1, 0.4);
    ObjectiveConfig c0{0.0, Phi::identity(), 100, 1};
    CHECK(inner_value_empirical_disc(pass, c0, c, SourceSpec::uniform(1, 1)) == doctest::Approx(0.4).epsilon(1e-15));

    const auto nets = random_networks(2, 3, 8);
    const Matrix z = sample(pz, cfg.mc_samples, population_z_stream(cfg.seed));
    CHECK(std::abs(inner_value_empirical_disc(nets, cfg, x, pz) -
                   inner_value_empirical_full(nets, cfg.lambda, x, z)) <= 1e-12);
    CHECK_THROWS_AS(inner_value_empirical_disc(nets, cfg, Matrix(), pz), ContractError);
}

TEST_CASE("objective variant identities") {
    const auto px = SourceSpec::beta_product(2, 2, 5, 1);
    const auto pz = SourceSpec::uniform(3, 2);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const auto nets = random_networks(2, 3, 500 + trial, trial % 2 ? Activation::clamp01 : Activation::logistic);
        const Phi phi = trial % 3 == 0 ? Phi::identity() : Phi::guarded_log();
        ObjectiveConfig cfg{0.01 * static_cast<double>(trial), phi, 500, trial};
        const double e5 = phi_variant_value(nets, cfg, px, pz, ObjectiveVariant::eq5);
        const double e6 = phi_variant_value(nets, cfg, px, pz, ObjectiveVariant::eq6);
        REQUIRE(std::abs((e5 - e6) - 2.0 * phi(0.5)) <= 1e-12);
        if (phi.kind == PhiKind::identity) {
            const double e7 = phi_variant_value(nets, cfg, px, pz, ObjectiveVariant::eq7);
            REQUIRE(std::abs(e6 - e7) <= 1e-12);
            REQUIRE(e7 == inner_value_population(nets, cfg, px, pz));
        }
    }
}

TEST_CASE("guarded log at the midpoint gives eq6 = 0") {
    const auto nets = constant_networks(0.5, 0.5, 1, 1);
    ObjectiveConfig cfg{0.0, Phi::guarded_log(), 100, 0};
    const double e6 = phi_variant_value(nets, cfg, SourceSpec::uniform(1, 0), SourceSpec::uniform(1, 1),
                                        ObjectiveVariant::eq6);
    const Big half = Big(1) / 2;
    const double want = static_cast<double>(oracle::big_log(half) + oracle::big_log(1 - half) -
                                            2 * oracle::big_log(half));
    CHECK(std::abs(e6 - want) <= 1e-12);
    CHECK(Phi::guarded_log()(0.0) == std::log(1e-6));
}

TEST_CASE("lambda enters affinely with the mean generator output as slope") {
    const auto nets = random_networks(2, 3, 42);
    const Matrix x = random_batch(30, 2, 1);
    const Matrix z = random_batch(20, 3, 2);
    const Matrix images = eval_generator_batch(nets.gen, nets.gen_activation, SampleBatch(z));
    double slope = 0.0;
    for (std::size_t j = 0; j < images.rows(); ++j) slope -= (images(j, 0) + images(j, 1)) / 2.0;
    slope /= static_cast<double>(images.rows());
    const double v0 = inner_value_empirical_full(nets, 0.0, x, z);
    for (double lambda : {0.25, 0.5, 1.0, 3.0}) {
        const double v = inner_value_empirical_full(nets, lambda, x, z);
        CHECK(std::abs(v - (v0 + lambda * slope)) <= 1e-14);
    }
}

TEST_CASE("raising D on real points without touching fake points does not lower the value") {
    // G = 0 maps all noise to the origin; an extra unit s(w.x) vanishes there.
    Networks nets = random_networks(2, 3, 9, Activation::clamp01);
    for (auto& h : nets.gen.heads) h = TwoLayerParams::zeros(3, 2, 1.0);
    nets.disc.second_weights[2] = 0.0;
    const Matrix x = random_batch(30, 2, 3);
    const Matrix z = random_batch(20, 3, 4);
    const double before = inner_value_empirical_full(nets, 0.5, x, z);
    Networks raised = nets;
    raised.disc.first_weights[4] = 0.5;
    raised.disc.first_weights[5] = 0.5;
    raised.disc.first_bias[2] = 0.0;
    raised.disc.second_weights[2] = 0.7;
    CHECK(inner_value_empirical_full(raised, 0.5, x, z) >= before);
}
