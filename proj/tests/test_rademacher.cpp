#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "genbound/bounds.hpp"
#include "genbound/errors.hpp"
#include "genbound/rademacher.hpp"
#include "oracles.hpp"

using namespace genbound;

namespace {

Matrix rows_of(std::size_t cols, std::vector<double> v) {
    const std::size_t rows = v.size() / cols;
    return Matrix(rows, cols, std::move(v));
}

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t stream) {
    CounterRng rng(51, stream);
    Matrix m(rows, cols);
    for (double& c : m.data()) c = rng.uniform();
    return m;
}

RademacherConfig mc(std::size_t draws, std::size_t restarts, std::uint64_t seed = 1) {
    RademacherConfig c;
    c.tau_draws = draws;
    c.opt.restarts = restarts;
    c.opt.steps = 200;
    c.seed = seed;
    return c;
}

// Member value vectors computed pointwise, for the brute-force oracle.
std::vector<std::vector<double>> value_vectors(const FiniteClass& fc, const Matrix& sample) {
    std::vector<std::vector<double>> out(fc.size());
    for (std::size_t k = 0; k < fc.size(); ++k) {
        const auto p = fc.member(k);
        for (std::size_t s = 0; s < sample.rows(); ++s)
            out[k].push_back(eval_network(p, fc.spec().activation, sample.row(s)));
    }
    return out;
}

} // namespace

TEST_CASE("hand enumeration: {f, -f} with values (1, 1) on n = 2") {
    CHECK(oracle::exact_rademacher_bruteforce({{1.0, 1.0}, {-1.0, -1.0}}) == 1.0);
    // A repeated point makes every member's value vector a multiple of (1, 1),
    // so the exact value is max |f(x)| = V (width + 1) = 2.
    const FiniteClass fc(ClassSpec::discriminator(1, 1, Activation::clamp01, 1.0), 3);
    const auto e = exact_rademacher(fc, rows_of(1, {1.0, 1.0}));
    CHECK(e.mean == 2.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.mode == EstimateMode::exact_enumeration);
}

TEST_CASE("zero-only classes give exactly 0") {
    const auto zero = ClassSpec::discriminator(2, 2, Activation::clamp01, 0.0);
    const Matrix x = random_batch(6, 2, 1);
    CHECK(exact_rademacher(FiniteClass(zero, 3), x).mean == 0.0);
    const auto e = empirical_rademacher(zero, x, mc(10, 2));
    CHECK(e.mean == 0.0);
    CHECK(e.std_error == 0.0);

    const auto gen = ClassSpec::generator(2, 2, 2, Activation::clamp01, 1.0);
    const auto zero_gen = ClassSpec::generator(2, 2, 2, Activation::clamp01, 0.0);
    const auto disc = ClassSpec::discriminator(2, 2, Activation::clamp01, 1.0);
    CHECK(empirical_rademacher_composition(zero, gen, x, mc(5, 2)).mean == 0.0);
    // D(G(z)) with G = 0 is the constant D(0); the sup is |sum tau| * max |D(0)| >= 0.
    CHECK(empirical_rademacher_composition(disc, zero_gen, x, mc(5, 2)).mean >= 0.0);
}

TEST_CASE("single point: the estimate is 2 max |f(x)| with no variance") {
    const auto spec = ClassSpec::discriminator(1, 1, Activation::clamp01, 1.0);
    const auto e = empirical_rademacher(spec, rows_of(1, {1.0}), mc(20, 5));
    CHECK(e.mean == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(e.std_error <= 1e-12);
}

TEST_CASE("exact enumeration agrees with the brute-force oracle") {
    struct Case {
        std::size_t d, width, g;
        double V;
        Activation act;
        std::size_t n;
    };
    const std::vector<Case> cases{{1, 1, 3, 1.0, Activation::clamp01, 4},
                                  {1, 1, 5, 2.0, Activation::logistic, 6},
                                  {2, 1, 3, 1.0, Activation::clamp01, 5},
                                  {1, 2, 3, 1.0, Activation::logistic, 4}};
    std::uint64_t stream = 10;
    for (const auto& c : cases) {
        const FiniteClass fc(ClassSpec::discriminator(c.d, c.width, c.act, c.V), c.g);
        const Matrix x = random_batch(c.n, c.d, stream++);
        const double want = oracle::exact_rademacher_bruteforce(value_vectors(fc, x));
        CHECK(std::abs(exact_rademacher(fc, x).mean - want) <= 1e-12 * std::max(1.0, want));
    }
}

TEST_CASE("exact enumeration refuses oversized work with the cost") {
    const FiniteClass fc(ClassSpec::discriminator(1, 1, Activation::clamp01, 1.0), 5);
    CHECK_THROWS_AS(exact_rademacher(fc, random_batch(21, 1, 1), 1e12), CapExceeded);
    try {
        exact_rademacher(fc, random_batch(12, 1, 1));
        FAIL("expected CapExceeded");
    } catch (const CapExceeded& e) {
        CHECK(e.cost() == 325.0 * 4096.0);
        CHECK(e.cap() == 1e6);
    }
}

TEST_CASE("exact value is non-decreasing under grid refinement") {
    for (Activation act : {Activation::clamp01, Activation::logistic}) {
        const auto spec = ClassSpec::discriminator(1, 1, act, 1.0);
        const Matrix x = random_batch(8, 1, 3);
        const double coarse = exact_rademacher(FiniteClass(spec, 3), x).mean;
        const double fine = exact_rademacher(FiniteClass(spec, 5), x).mean;
        const double finer = exact_rademacher(FiniteClass(spec, 9), x, 1e7).mean;
        CHECK(coarse <= fine);
        CHECK(fine <= finer);
    }
}

TEST_CASE("exact value never exceeds the Massart bound") {
    std::uint64_t stream = 100;
    for (std::size_t d : {1u, 2u})
        for (double V : {1.0, 2.0})
            for (std::size_t g : {3u, 5u})
                for (std::size_t n : {4u, 6u}) {
                    const FiniteClass fc(ClassSpec::discriminator(d, 1, Activation::clamp01, V), g);
                    const double e = exact_rademacher(fc, random_batch(n, d, stream++)).mean;
                    CHECK(e >= 0.0);
                    CHECK(e <= massart_bound_disc(V, static_cast<double>(n), static_cast<double>(fc.size())));
                }
}

TEST_CASE("exact value scales linearly with V when unit outputs do not depend on V") {
    // On points in {0,1}^d with a 3-level grid every hidden unit outputs 0 or 1
    // for any V >= 1, so only the second layer scales.
    const Matrix x1 = rows_of(1, {0, 1, 1, 0, 1, 1});
    const Matrix x2 = rows_of(2, {0, 1, 1, 1, 1, 0, 0, 0, 1, 1});
    for (std::size_t width : {1u, 2u}) {
        const double base = exact_rademacher(FiniteClass(ClassSpec::discriminator(1, width, Activation::clamp01, 1.0), 3), x1).mean;
        for (double c : {2.0, 4.0}) {
            const double scaled = exact_rademacher(FiniteClass(ClassSpec::discriminator(1, width, Activation::clamp01, c), 3), x1).mean;
            CHECK(scaled == c * base);
        }
    }
    const double base = exact_rademacher(FiniteClass(ClassSpec::discriminator(2, 1, Activation::clamp01, 1.0), 3), x2).mean;
    CHECK(exact_rademacher(FiniteClass(ClassSpec::discriminator(2, 1, Activation::clamp01, 3.0), 3), x2).mean ==
          doctest::Approx(3.0 * base).epsilon(1e-15));
}

TEST_CASE("Monte-Carlo estimate matches exact enumeration where the grid attains the sup") {
    // On points in {0,1} the vertices of each unit's reachable output set lie
    // on the 5-level grid, so the continuous sup equals the grid sup.
    const Matrix x = rows_of(1, {0, 1, 1, 0, 1, 0});
    for (double V : {1.0, 2.0}) {
        const auto spec = ClassSpec::discriminator(1, 1, Activation::clamp01, V);
        const double exact = exact_rademacher(FiniteClass(spec, 5), x).mean;
        const auto est = empirical_rademacher(spec, x, mc(200, 10, 7));
        CHECK(std::abs(est.mean - exact) <= std::max(0.05 * exact, 3.0 * est.std_error));
    }
}

TEST_CASE("Monte-Carlo estimates are deterministic and non-negative") {
    const auto spec = ClassSpec::discriminator(2, 2, Activation::logistic, 1.0);
    const Matrix x = random_batch(10, 2, 4);
    const auto a = empirical_rademacher(spec, x, mc(20, 3, 9));
    const auto b = empirical_rademacher(spec, x, mc(20, 3, 9));
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean >= 0.0);
    CHECK(a.restart_spread >= 0.0);
    CHECK(a.tau_draws == 20);
    CHECK(a.restarts == 3);
}

TEST_CASE("composition with a frozen pass-through generator reduces to D on the images") {
    const auto disc = ClassSpec::discriminator(2, 2, Activation::clamp01, 1.0);
    const auto gen = ClassSpec::generator(2, 2, 1, Activation::clamp01, 1.0);
    Generator identity = Generator::zeros(gen);
    for (std::size_t h = 0; h < 2; ++h) {
        identity.heads[h].first_weights[h] = 1.0;
        identity.heads[h].second_weights[0] = 1.0;
    }
    const Matrix z = random_batch(12, 2, 5);
    CHECK(eval_generator_batch(identity, Activation::clamp01, SampleBatch(z)) == z);
    const auto cfg = mc(40, 5, 3);
    const auto frozen = empirical_rademacher_composition(disc, gen, z, cfg, identity);
    const auto direct = empirical_rademacher(disc, z, cfg);
    CHECK(std::abs(frozen.mean - direct.mean) <= std::max(0.05 * direct.mean, 3.0 * direct.std_error));

    // Optimizing G as well can only enlarge the class.
    const auto joint = empirical_rademacher_composition(disc, gen, z, cfg);
    CHECK(joint.mean >= 0.0);
    CHECK(joint.mean >= direct.mean - 3.0 * (joint.std_error + direct.std_error));
}
