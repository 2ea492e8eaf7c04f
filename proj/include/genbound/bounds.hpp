#pragma once

#include <string>
#include <utility>
#include <vector>

namespace genbound {

enum class BoundVariant { verbatim, conservative };

// A bound value with every input that produced it.
struct BoundReport {
    std::string name;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
    BoundVariant variant = BoundVariant::conservative;
    std::string note;

    double input(const std::string& key) const;
};

// 4 V^2 sqrt(2 ln card) / n. card = 1 gives 0; card < 1 is an error.
double massart_bound_disc(double V, double n, double card);

// C1 V^3 ln(2n + 2) / sqrt(n).
double lipschitz_entropy_bound(double V, double n, double C1);

// 2 V^4 sqrt(2 ln card_G) / m, indexed by the noise sample size m.
double composition_bound(double V, double m, double card_G);

// Log covering number bound for Lipschitz units: 50 V^6 ln(2n + 2) / eps^4.
double covering_lipschitz(double eps, double V, double n);

// Log covering number bound for non-decreasing units:
//   5 V^2 (n + 3) / eps^2 * ln(4 e t V / (eps (n + 1))),
// clamped to 0 when the logarithm's argument is <= 1.
double covering_nondecreasing(double eps, double V, double n, double t);

enum class CoveringKind { lipschitz, nondecreasing };

struct DudleyResult {
    double value = 0.0;
    double delta = 0.0; // minimizing lower integration limit
};

// int_lo^hi sqrt(log N(eps)) d eps by adaptive Gauss-Kronrod quadrature on
// dyadic pieces. Throws NumericalError when the error estimate exceeds 1e-6
// relative, or the rounding floor of the interval when that is larger.
double entropy_integral(CoveringKind kind, double V, double n, double t, double lo, double hi);

// inf over delta in (0, 1/2] of 4 delta + (12 / sqrt(n)) int_delta^{1/2} sqrt(log N).
// The infimum is located on a uniform delta grid and refined by golden
// section (bracket width 1e-8).
DudleyResult dudley_bound(CoveringKind kind, double V, double n, double t,
                          std::size_t delta_grid = 64);

// C V sqrt((n + 3) / n * ln((n + 1) / n)). The printed form takes
// ln(n / (n + 1)), which is negative; the argument is inverted.
double nondecreasing_closed_form(double C, double V, double n);

// 2 Q sqrt(ln(1/delta) / (2 count)).
double concentration_term(double Q, double count, double delta);

// Two-sample gap bound. verbatim keeps the printed signs
//   2R_D + 2R_DG - 2R_G + 2Q_x sqrt(..n) - 2Q_z(1+lambda) sqrt(..m);
// conservative adds every term.
BoundReport theorem1_full(double Rn_D, double Rmn_DG, double Rm_G, double Q_x, double Q_z,
                          double lambda, double n, double m, double delta, BoundVariant variant);

// Discriminator-only gap bound 2R_D + 2Q_x sqrt(ln(1/delta) / 2n).
BoundReport theorem1_disc(double Rn_D, double Q_x, double n, double delta);

enum class Corollary { lip_full, lip_entropy, lip_disc, lip_disc_entropy, nd_disc_3_4, nd_full_3_5 };

// Generator multiplier in the entropy-form Lipschitz corollary, printed as
// (1 - lambda) there and (1 + lambda) in the theorem it is derived from.
enum class GeneratorFactor { one_plus_lambda, one_minus_lambda };

struct CorollaryInputs {
    double V = 1.0;
    double n = 1.0;
    double m = 1.0;
    double card_D = 1.0;
    double card_G = 1.0;
    double delta = 0.05;
    double lambda = 0.0;
    double Q_x = 0.0;
    double Q_z = 0.0;
    double C = 1.0;
    double C1 = 1.0;
    GeneratorFactor generator_factor = GeneratorFactor::one_plus_lambda;
};

BoundReport corollary_bounds(Corollary which, const CorollaryInputs& in, BoundVariant variant);

std::string to_string(BoundVariant v);
std::string to_string(Corollary c);
std::string to_string(CoveringKind k);
Corollary parse_corollary(const std::string& s);

} // namespace genbound
