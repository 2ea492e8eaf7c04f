#include "genbound/bounds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "genbound/errors.hpp"

namespace genbound {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ContractError(what);
}

// Requested accuracy of the entropy integral, and the accuracy below which
// the result is rejected.
constexpr double kQuadratureTarget = 1e-10;
constexpr double kQuadratureTolerance = 1e-6;

// Well inside the required 1e-4 so the value error stays below 1e-9 even for
// small minimizers.
constexpr double kGoldenTolerance = 1e-8;

} // namespace

double BoundReport::input(const std::string& key) const {
    for (const auto& [k, v] : inputs)
        if (k == key) return v;
    throw ContractError("BoundReport '" + name + "' has no input '" + key + "'");
}

double massart_bound_disc(double V, double n, double card) {
    require(n >= 1.0, "massart_bound_disc: n must be >= 1");
    require(V >= 0.0, "massart_bound_disc: V must be >= 0");
    if (!(card >= 1.0)) throw DomainError("massart_bound_disc: class cardinality must be >= 1");
    return 4.0 * V * V * std::sqrt(2.0 * std::log(card)) / n;
}

double lipschitz_entropy_bound(double V, double n, double C1) {
    require(n >= 1.0, "lipschitz_entropy_bound: n must be >= 1");
    require(C1 > 0.0, "lipschitz_entropy_bound: C1 must be > 0");
    return C1 * V * V * V * std::log(2.0 * n + 2.0) / std::sqrt(n);
}

double composition_bound(double V, double m, double card_G) {
    require(m >= 1.0, "composition_bound: m must be >= 1");
    if (!(card_G >= 1.0)) throw DomainError("composition_bound: class cardinality must be >= 1");
    const double v2 = V * V;
    return 2.0 * v2 * v2 * std::sqrt(2.0 * std::log(card_G)) / m;
}

double covering_lipschitz(double eps, double V, double n) {
    require(eps > 0.0, "covering_lipschitz: eps must be > 0");
    require(n >= 1.0, "covering_lipschitz: n must be >= 1");
    const double v3 = V * V * V;
    const double e2 = eps * eps;
    return 50.0 * v3 * v3 * std::log(2.0 * n + 2.0) / (e2 * e2);
}

double covering_nondecreasing(double eps, double V, double n, double t) {
    require(eps > 0.0, "covering_nondecreasing: eps must be > 0");
    require(n >= 1.0, "covering_nondecreasing: n must be >= 1");
    const double arg = 4.0 * std::numbers::e * t * V / (eps * (n + 1.0));
    if (!(arg > 1.0)) return 0.0;
    return 5.0 * V * V * (n + 3.0) / (eps * eps) * std::log(arg);
}

namespace {

// Relative accuracy attainable on [lo, hi] given that abscissae are rounded
// at the scale of |lo| + |hi|: tiny intervals cannot meet a fixed target.
double rounding_floor(double lo, double hi) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(lo) + std::abs(hi)) / (hi - lo);
}

// Boost's error estimate inflates with depth once the integrand is resolved to
// rounding level, so escalate the depth and keep the first estimate that
// meets the target, falling back to the tightest one seen.
template <class F>
std::pair<double, double> integrate_escalating(const F& f, double a, double b, double floor) {
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
    const double target = std::max(kQuadratureTarget, floor);
    double best_value = 0.0;
    double best_error = std::numeric_limits<double>::infinity();
    for (unsigned depth : {0u, 5u, 10u, 15u}) {
        double error = 0.0;
        const double value = Quadrature::integrate(f, a, b, depth, target, &error);
        if (!std::isfinite(value)) continue;
        if (error <= target * std::abs(value)) return {value, error};
        if (error < best_error) {
            best_value = value;
            best_error = error;
        }
    }
    return {best_value, best_error};
}

// Both integrands grow like 1/eps towards 0; dyadic pieces [a, 2a] keep each
// piece mild enough for low-depth quadrature.
template <class F>
std::pair<double, double> integrate_dyadic(const F& f, double lo, double hi) {
    double value = 0.0;
    double error = 0.0;
    for (double a = lo; a < hi;) {
        const double b = hi > 2.0 * a ? 2.0 * a : hi;
        const auto [v, e] = integrate_escalating(f, a, b, rounding_floor(a, b));
        value += v;
        error += e;
        a = b;
    }
    return {value, error};
}

} // namespace

double entropy_integral(CoveringKind kind, double V, double n, double t, double lo, double hi) {
    require(lo > 0.0 && lo <= hi, "entropy_integral: need 0 < lo <= hi");
    if (V == 0.0 || lo == hi) return 0.0;
    std::pair<double, double> result;
    if (kind == CoveringKind::lipschitz) {
        const auto integrand = [&](double eps) { return std::sqrt(covering_lipschitz(eps, V, n)); };
        result = integrate_dyadic(integrand, lo, hi);
    } else {
        // The covering bound vanishes like sqrt(B - eps) at B = 4etV/(n+1) and is
        // clamped to 0 beyond it. The stretch next to B is integrated with
        // eps = top - (top-mid) u^2, which makes the endpoint behaviour smooth.
        const double B = 4.0 * std::numbers::e * t * V / (n + 1.0);
        const double top = std::min(hi, B);
        if (lo >= top) return 0.0;
        const double mid = std::clamp(0.5 * B, lo, top);
        const auto plain = [&](double eps) { return std::sqrt(covering_nondecreasing(eps, V, n, t)); };
        result = mid > lo ? integrate_dyadic(plain, lo, mid) : std::pair<double, double>{0.0, 0.0};
        if (top > mid) {
            const double width = top - mid;
            const auto near_edge = [&](double u) {
                const double eps = top - width * u * u;
                return std::sqrt(covering_nondecreasing(eps, V, n, t)) * 2.0 * width * u;
            };
            const auto [v, e] = integrate_escalating(near_edge, 0.0, 1.0, rounding_floor(mid, top));
            result.first += v;
            result.second += e;
        }
    }
    const auto [value, error] = result;
    const double tolerance = std::max(kQuadratureTolerance, rounding_floor(lo, hi));
    if (!std::isfinite(value) || !(error <= tolerance * std::abs(value))) {
        throw NumericalError("entropy_integral: quadrature did not converge on [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "] (value " +
                             std::to_string(value) + ", error estimate " + std::to_string(error) +
                             ")");
    }
    return value;
}

DudleyResult dudley_bound(CoveringKind kind, double V, double n, double t,
                          std::size_t delta_grid) {
    require(delta_grid >= 8, "dudley_bound: delta_grid must be >= 8");
    require(n >= 1.0, "dudley_bound: n must be >= 1");
    constexpr double upper = 0.5;
    if (V == 0.0) return {0.0, 0.0};

    const double scale = 12.0 / std::sqrt(n);
    const auto objective = [&](double delta) {
        return 4.0 * delta + scale * entropy_integral(kind, V, n, t, delta, upper);
    };

    const double h = upper / static_cast<double>(delta_grid);
    std::size_t best_k = delta_grid;
    double best = objective(upper);
    for (std::size_t k = 1; k < delta_grid; ++k) {
        const double v = objective(h * static_cast<double>(k));
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    DudleyResult result{best, h * static_cast<double>(best_k)};

    // Golden-section refinement on the bracketing grid cells.
    double a = best_k == 1 ? h * 1e-3 : h * static_cast<double>(best_k - 1);
    double b = std::min(upper, h * static_cast<double>(best_k + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > kGoldenTolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fmid = objective(mid);
    if (fmid < result.value) result = {fmid, mid};
    return result;
}

double nondecreasing_closed_form(double C, double V, double n) {
    require(C > 0.0, "nondecreasing_closed_form: C must be > 0");
    require(n >= 1.0, "nondecreasing_closed_form: n must be >= 1");
    return C * V * std::sqrt((n + 3.0) / n * std::log1p(1.0 / n));
}

double concentration_term(double Q, double count, double delta) {
    require(Q >= 0.0, "concentration_term: Q must be >= 0");
    require(count >= 1.0, "concentration_term: count must be >= 1");
    require(delta > 0.0 && delta < 1.0, "concentration_term: delta must be in (0, 1)");
    return 2.0 * Q * std::sqrt(std::log(1.0 / delta) / (2.0 * count));
}

BoundReport theorem1_full(double Rn_D, double Rmn_DG, double Rm_G, double Q_x, double Q_z,
                          double lambda, double n, double m, double delta, BoundVariant variant) {
    require(Rn_D >= 0.0 && Rmn_DG >= 0.0 && Rm_G >= 0.0,
            "theorem1_full: complexities must be >= 0");
    require(lambda >= 0.0, "theorem1_full: lambda must be >= 0");
    const double real_conc = concentration_term(Q_x, n, delta);
    const double fake_conc = (1.0 + lambda) * concentration_term(Q_z, m, delta);
    const double sign = variant == BoundVariant::verbatim ? -1.0 : 1.0;
    BoundReport r;
    r.name = "theorem1_full";
    r.variant = variant;
    r.value = 2.0 * Rn_D + 2.0 * Rmn_DG + sign * 2.0 * Rm_G + real_conc + sign * fake_conc;
    r.inputs = {{"Rn_D", Rn_D}, {"Rmn_DG", Rmn_DG}, {"Rm_G", Rm_G}, {"Q_x", Q_x},
                {"Q_z", Q_z},   {"lambda", lambda}, {"n", n},       {"m", m},
                {"delta", delta}};
    if (variant == BoundVariant::verbatim)
        r.note = "printed signs: generator complexity and noise concentration subtracted";
    return r;
}

BoundReport theorem1_disc(double Rn_D, double Q_x, double n, double delta) {
    require(Rn_D >= 0.0, "theorem1_disc: complexity must be >= 0");
    BoundReport r;
    r.name = "theorem1_disc";
    r.variant = BoundVariant::conservative;
    r.value = 2.0 * Rn_D + concentration_term(Q_x, n, delta);
    r.inputs = {{"Rn_D", Rn_D}, {"Q_x", Q_x}, {"n", n}, {"delta", delta}};
    return r;
}

BoundReport corollary_bounds(Corollary which, const CorollaryInputs& in, BoundVariant variant) {
    const double sign = variant == BoundVariant::verbatim ? -1.0 : 1.0;
    const double gen_factor = in.generator_factor == GeneratorFactor::one_plus_lambda
                                  ? 1.0 + in.lambda
                                  : 1.0 - in.lambda;
    BoundReport r;
    r.name = to_string(which);
    r.variant = variant;
    r.inputs = {{"V", in.V},           {"n", in.n},           {"m", in.m},
                {"card_D", in.card_D}, {"card_G", in.card_G}, {"delta", in.delta},
                {"lambda", in.lambda}, {"Q_x", in.Q_x},       {"Q_z", in.Q_z},
                {"C", in.C},           {"C1", in.C1}};
    switch (which) {
    case Corollary::lip_full:
        r.value = massart_bound_disc(in.V, in.n, in.card_D) +
                  2.0 * composition_bound(in.V, in.n, in.card_G) +
                  concentration_term(in.Q_x, in.n, in.delta) +
                  concentration_term(in.Q_z, in.m, in.delta);
        break;
    case Corollary::lip_entropy:
        r.value = lipschitz_entropy_bound(in.V, in.n, in.C1) +
                  concentration_term(in.Q_x, in.n, in.delta) +
                  sign * gen_factor * concentration_term(in.Q_z, in.m, in.delta);
        r.inputs.emplace_back("generator_factor", gen_factor);
        break;
    case Corollary::lip_disc:
        r.value = massart_bound_disc(in.V, in.n, in.card_D) +
                  concentration_term(in.Q_x, in.n, in.delta);
        break;
    case Corollary::lip_disc_entropy:
        r.value = lipschitz_entropy_bound(in.V, in.n, in.C1) +
                  concentration_term(in.Q_x, in.n, in.delta);
        break;
    case Corollary::nd_disc_3_4:
        // 2 Q_x sqrt(2 ln(1/delta) / n) as printed, i.e. twice concentration_term.
        r.value = nondecreasing_closed_form(in.C, in.V, in.n) +
                  2.0 * concentration_term(in.Q_x, in.n, in.delta);
        r.note = "log argument inverted to (n+1)/n";
        break;
    case Corollary::nd_full_3_5:
        r.value = nondecreasing_closed_form(in.C, in.V, in.n) +
                  concentration_term(in.Q_x, in.n, in.delta) +
                  sign * (1.0 + in.lambda) * concentration_term(in.Q_z, in.m, in.delta);
        r.note = "log argument inverted to (n+1)/n";
        break;
    }
    return r;
}

std::string to_string(BoundVariant v) {
    return v == BoundVariant::verbatim ? "verbatim" : "conservative";
}

std::string to_string(Corollary c) {
    switch (c) {
    case Corollary::lip_full:
        return "lip_full";
    case Corollary::lip_entropy:
        return "lip_entropy";
    case Corollary::lip_disc:
        return "lip_disc";
    case Corollary::lip_disc_entropy:
        return "lip_disc_entropy";
    case Corollary::nd_disc_3_4:
        return "nd_disc_3_4";
    case Corollary::nd_full_3_5:
        return "nd_full_3_5";
    }
    return "?";
}

std::string to_string(CoveringKind k) {
    return k == CoveringKind::lipschitz ? "lipschitz" : "nondecreasing";
}

Corollary parse_corollary(const std::string& s) {
    for (Corollary c : {Corollary::lip_full, Corollary::lip_entropy, Corollary::lip_disc,
                        Corollary::lip_disc_entropy, Corollary::nd_disc_3_4, Corollary::nd_full_3_5})
        if (to_string(c) == s) return c;
    throw ContractError("unknown corollary '" + s + "'");
}

} // namespace genbound
