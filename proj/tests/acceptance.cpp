// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "genbound/bounds.hpp"
#include "genbound/classes.hpp"
#include "genbound/config.hpp"
#include "genbound/experiments.hpp"
#include "genbound/objective.hpp"
#include "genbound/rademacher.hpp"

#include "bound_oracles.hpp"
#include "oracles.hpp"

using namespace genbound;
using oracle::rel_err;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Largest error seen against a tolerance.
struct Worst {
    double tolerance;
    double worst = 0.0;
    std::size_t checks = 0;
    std::string where;

    void add(double err, const std::string& label) {
        ++checks;
        if (!(err <= worst)) {
            worst = std::isnan(err) ? INFINITY : err;
            where = label;
        }
    }
    bool ok() const { return worst <= tolerance; }
    std::string summary(const std::string& name) const {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s: %zu checks, worst %.3g (tol %.0e%s%s)", name.c_str(),
                      checks, worst, tolerance, ok() ? "" : ", at ", ok() ? "" : where.c_str());
        return buf;
    }
};

double log_uniform(CounterRng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ------------------------------------------------------------- criterion 1

Outcome formula_fidelity() {
    Worst closed{1e-12};
    Worst numeric{1e-6};
    CounterRng rng(1001, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const double V = rng.uniform(0.1, 3.0);
        const double n = std::floor(log_uniform(rng, 1.0, 1e6));
        const double m = std::floor(log_uniform(rng, 1.0, 1e6));
        const double card = std::floor(log_uniform(rng, 1.0, 1e9));
        const double card_G = std::floor(log_uniform(rng, 1.0, 1e9));
        const double C = rng.uniform(0.5, 2.0);
        const double C1 = rng.uniform(0.5, 2.0);
        const double eps = rng.uniform(0.01, 1.0);
        const double t = (n + 1.0) * rng.uniform(1.0, 10.0);
        const double delta = rng.uniform(0.001, 0.999);
        const double Qx = rng.uniform(0.0, 5.0);
        const double Qz = rng.uniform(0.0, 5.0);
        const double lambda = rng.uniform(0.0, 2.0);
        const double RD = rng.uniform(0.0, 2.0);
        const double RDG = rng.uniform(0.0, 2.0);
        const double RG = rng.uniform(0.0, 2.0);
        const std::string at = "trial " + std::to_string(trial);

        closed.add(rel_err(massart_bound_disc(V, n, card), oracle::massart(V, n, card)), "massart " + at);
        closed.add(rel_err(lipschitz_entropy_bound(V, n, C1), oracle::lipschitz_entropy(V, n, C1)),
                   "lipschitz_entropy " + at);
        closed.add(rel_err(composition_bound(V, m, card_G), oracle::composition(V, m, card_G)),
                   "composition " + at);
        closed.add(rel_err(covering_lipschitz(eps, V, n), oracle::cover_lipschitz(eps, V, n)),
                   "covering_lipschitz " + at);
        closed.add(rel_err(covering_nondecreasing(eps, V, n, t), oracle::cover_nondecreasing(eps, V, n, t)),
                   "covering_nondecreasing " + at);
        closed.add(rel_err(nondecreasing_closed_form(C, V, n), oracle::closed_form(C, V, n)),
                   "closed_form " + at);
        closed.add(rel_err(concentration_term(Qx, n, delta), oracle::concentration(Qx, n, delta)),
                   "concentration " + at);

        // The verbatim form cancels; its error is measured against the
        // magnitude of the summed terms.
        const double cons = theorem1_full(RD, RDG, RG, Qx, Qz, lambda, n, m, delta,
                                          BoundVariant::conservative).value;
        const double verb = theorem1_full(RD, RDG, RG, Qx, Qz, lambda, n, m, delta,
                                          BoundVariant::verbatim).value;
        closed.add(rel_err(cons, oracle::theorem1(RD, RDG, RG, Qx, Qz, lambda, n, m, delta, false)),
                   "theorem1 conservative " + at);
        closed.add(std::abs(verb - oracle::theorem1(RD, RDG, RG, Qx, Qz, lambda, n, m, delta, true)) /
                       std::max(cons, 1e-300),
                   "theorem1 verbatim " + at);
        closed.add(rel_err(theorem1_disc(RD, Qx, n, delta).value, oracle::theorem1_disc(RD, Qx, n, delta)),
                   "theorem1_disc " + at);

        CorollaryInputs in;
        in.V = V;
        in.n = n;
        in.m = m;
        in.card_D = card;
        in.card_G = card_G;
        in.delta = delta;
        in.lambda = lambda;
        in.Q_x = Qx;
        in.Q_z = Qz;
        in.C = C;
        in.C1 = C1;
        const double cx = oracle::concentration(Qx, n, delta);
        const double cz = oracle::concentration(Qz, m, delta);
        const double massart = oracle::massart(V, n, card);
        const double entropy = oracle::lipschitz_entropy(V, n, C1);
        const double cf = oracle::closed_form(C, V, n);
        struct Want {
            Corollary which;
            double conservative, verbatim;
        };
        const std::vector<Want> wants{
            {Corollary::lip_full, massart + 2 * oracle::composition(V, n, card_G) + cx + cz,
             massart + 2 * oracle::composition(V, n, card_G) + cx + cz},
            {Corollary::lip_entropy, entropy + cx + (1 + lambda) * cz, entropy + cx - (1 + lambda) * cz},
            {Corollary::lip_disc, massart + cx, massart + cx},
            {Corollary::lip_disc_entropy, entropy + cx, entropy + cx},
            {Corollary::nd_disc_3_4, cf + 2 * cx, cf + 2 * cx},
            {Corollary::nd_full_3_5, cf + cx + (1 + lambda) * cz, cf + cx - (1 + lambda) * cz},
        };
        for (const Want& w : wants) {
            const double c = corollary_bounds(w.which, in, BoundVariant::conservative).value;
            const double v = corollary_bounds(w.which, in, BoundVariant::verbatim).value;
            closed.add(rel_err(c, w.conservative), to_string(w.which) + " conservative " + at);
            closed.add(std::abs(v - w.verbatim) / std::max(c, 1e-300), to_string(w.which) + " verbatim " + at);
        }

        const double Vd = rng.uniform(0.05, 2.0);
        const double nd = std::floor(log_uniform(rng, 4.0, 1e6));
        const double lo = rng.uniform(0.001, 0.4);
        numeric.add(rel_err(entropy_integral(CoveringKind::lipschitz, Vd, nd, nd + 1, lo, 0.5),
                            oracle::integral_lipschitz(Vd, nd, lo, 0.5)),
                    "entropy_integral lipschitz " + at);
        const double nd_int = oracle::integral_nondecreasing(Vd, nd, nd + 1, lo, 0.5);
        numeric.add(nd_int == 0.0 ? std::abs(entropy_integral(CoveringKind::nondecreasing, Vd, nd, nd + 1, lo, 0.5))
                                  : rel_err(entropy_integral(CoveringKind::nondecreasing, Vd, nd, nd + 1, lo, 0.5), nd_int),
                    "entropy_integral nondecreasing " + at);
        numeric.add(rel_err(dudley_bound(CoveringKind::lipschitz, Vd, nd, nd + 1).value,
                            oracle::dudley_lipschitz(Vd, nd)),
                    "dudley lipschitz " + at);
        numeric.add(rel_err(dudley_bound(CoveringKind::nondecreasing, Vd, nd, nd + 1).value,
                            oracle::dudley_nondecreasing(Vd, nd, nd + 1)),
                    "dudley nondecreasing " + at);
    }
    return {closed.ok() && numeric.ok(),
            closed.summary("closed forms") + "; " + numeric.summary("quadrature and dudley")};
}

// ------------------------------------------------------------- criterion 2

Outcome massart_dominance() {
    std::size_t classes = 0;
    std::size_t violations = 0;
    double closest = INFINITY;
    for (std::size_t d : {1, 2})
        for (std::size_t width : {1, 2})
            for (double V : {1.0, 2.0})
                for (std::size_t g : {3, 5})
                    for (std::size_t n : {4, 6, 8}) {
                        const auto spec = ClassSpec::discriminator(d, width, Activation::clamp01, V);
                        const FiniteClass fc(spec, g, 1e9);
                        const Matrix x = sample(SourceSpec::uniform(d, 5), n, derive_stream("accept.c2", classes));
                        const double exact = exact_rademacher(fc, x, 1e9).mean;
                        const double bound = massart_bound_disc(V, static_cast<double>(n),
                                                                static_cast<double>(fc.cardinality()));
                        ++classes;
                        if (!(exact <= bound)) ++violations;
                        closest = std::min(closest, bound / exact);
                    }
    return {classes >= 10 && violations == 0,
            std::to_string(classes) + " classes, " + std::to_string(violations) +
                " violations, smallest bound/exact ratio " + fixed(closest)};
}

// ------------------------------------------------------------- criterion 3

Outcome estimator_consistency() {
    // Points in {0,1}: each unit's reachable output pair spans [0,1]^2, whose
    // vertices lie on the 5-level grid, so the exact grid value is the
    // continuous sup the Monte-Carlo estimator targets.
    struct Instance {
        double V;
        std::size_t width;
        std::vector<double> x;
    };
    const std::vector<Instance> instances{
        {1.0, 1, {0, 1, 1, 0, 1, 0}},
        {2.0, 1, {0, 1, 1, 0, 1, 0}},
        {1.0, 2, {1, 0, 0, 1, 1, 1, 0, 0}},
        {2.0, 2, {1, 0, 0, 1, 1, 1, 0, 0}},
        {1.0, 2, {0, 0, 1, 0, 1, 1, 1, 0, 1, 0}},
    };
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Instance& in = instances[i];
        const auto spec = ClassSpec::discriminator(1, in.width, Activation::clamp01, in.V);
        const Matrix x(in.x.size(), 1, in.x);
        const double exact = exact_rademacher(FiniteClass(spec, 5, 1e9), x, 1e9).mean;
        RademacherConfig rc;
        rc.tau_draws = 500;
        rc.opt.restarts = 20;
        rc.seed = derive_stream("accept.c3", i);
        const auto est = empirical_rademacher(spec, x, rc);
        const double allowed = std::max(0.05 * exact, 3.0 * est.std_error);
        const bool ok = std::abs(est.mean - exact) <= allowed;
        pass = pass && ok;
        detail += (i ? "; " : "") + std::string("#") + std::to_string(i + 1) + " mc " +
                  fixed(est.mean) + " exact " + fixed(exact) + (ok ? "" : " (outside)");
    }
    return {pass, detail};
}

// ------------------------------------------------------------- criterion 4

Outcome gradient_correctness() {
    Worst w{1e-4};
    CounterRng rng(1004, 0);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const std::size_t width = 1 + trial % 5;
        const auto spec = ClassSpec::discriminator(d, width, Activation::logistic, rng.uniform(1.0, 3.0));
        const TwoLayerParams p = random_feasible(spec, 1.0, rng);
        std::vector<double> x(d);
        for (double& c : x) c = rng.uniform();
        const auto g = grad_params(p, Activation::logistic, x).flatten();
        const auto base = p.flatten();
        const auto err = [](double got, double fd) {
            return std::abs(got - fd) / std::max(std::abs(fd), 1e-3);
        };
        for (std::size_t k = 0; k < base.size(); ++k) {
            const auto f = [&](double v) {
                auto flat = base;
                flat[k] = v;
                auto q = p;
                q.assign(flat);
                return eval_network(q, Activation::logistic, x);
            };
            w.add(err(g[k], oracle::central_difference(f, base[k], h)),
                  "trial " + std::to_string(trial) + " param " + std::to_string(k));
        }
        const auto gx = grad_input(p, Activation::logistic, x);
        for (std::size_t i = 0; i < d; ++i) {
            const auto f = [&](double v) {
                auto y = x;
                y[i] = v;
                return eval_network(p, Activation::logistic, y);
            };
            w.add(err(gx[i], oracle::central_difference(f, x[i], h)),
                  "trial " + std::to_string(trial) + " input " + std::to_string(i));
        }
    }
    return {w.ok(), w.summary("relative error vs central differences")};
}

// ------------------------------------------------------------- criterion 5

Outcome projection_correctness() {
    Worst l1{1e-10};
    std::size_t box_mismatches = 0;
    CounterRng rng(1005, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 16);
        const double V = rng.uniform(0.1, 3.0);
        std::vector<double> w(d);
        for (double& c : w) c = rng.uniform(-3.0, 3.0);
        const double bias = rng.uniform(-3.0, 3.0);
        std::vector<double> full{bias};
        full.insert(full.end(), w.begin(), w.end());
        const auto want = oracle::l1_projection_bisection(full, V);
        const auto [pw, pb] = project_first_layer(w, bias, V);
        double err = std::abs(pb - want[0]);
        for (std::size_t i = 0; i < d; ++i) err = std::max(err, std::abs(pw[i] - want[i + 1]));
        l1.add(err, "trial " + std::to_string(trial));

        const auto [bw, bb] = project_second_layer(w, bias, V);
        if (bb != std::clamp(bias, -V, V)) ++box_mismatches;
        for (std::size_t i = 0; i < d; ++i)
            if (bw[i] != std::clamp(w[i], -V, V)) ++box_mismatches;
    }
    return {l1.ok() && box_mismatches == 0,
            l1.summary("l1 vs soft-threshold oracle") + "; box clamp mismatches " +
                std::to_string(box_mismatches)};
}

// ------------------------------------------------------------- criterion 6

Outcome objective_identities() {
    Worst w{1e-12};
    const auto px = SourceSpec::uniform(2, 11);
    const auto pz = SourceSpec::uniform(3, 12);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        CounterRng rng(1006, trial);
        const Activation act = trial % 2 ? Activation::clamp01 : Activation::logistic;
        Networks nets;
        nets.disc_activation = act;
        nets.gen_activation = act;
        nets.disc = random_feasible(ClassSpec::discriminator(2, 3, act, rng.uniform(1.0, 2.0)), 1.0, rng);
        const auto gspec = ClassSpec::generator(3, 2, 2, act, rng.uniform(1.0, 2.0));
        for (int k = 0; k < 2; ++k) nets.gen.heads.push_back(random_feasible(gspec, 1.0, rng));

        for (const Phi phi : {Phi::identity(), Phi::guarded_log()}) {
            ObjectiveConfig cfg{rng.uniform(0.0, 2.0), phi, 1000, trial};
            const double e5 = phi_variant_value(nets, cfg, px, pz, ObjectiveVariant::eq5);
            const double e6 = phi_variant_value(nets, cfg, px, pz, ObjectiveVariant::eq6);
            w.add(std::abs((e5 - e6) - 2.0 * phi(0.5)), "eq5-eq6 trial " + std::to_string(trial));
            if (phi.kind == PhiKind::identity) {
                const double e7 = phi_variant_value(nets, cfg, px, pz, ObjectiveVariant::eq7);
                w.add(std::abs(e6 - e7), "eq6-eq7 trial " + std::to_string(trial));
            }
        }
    }
    return {w.ok(), w.summary("identity residuals")};
}

// ------------------------------------------------------- criteria 7, 8, 10

const char* const kSweepConfig = R"(experiment = gap_sweep
output_dir = sweep
seeds = 0..19
delta = 0.025
data.d_x = 2
data.d_z = 2
disc.width = 4
gen.width = 4
sweep.n = 50, 200, 400
sweep.V = 1
sweep.lambda = 0, 0.5
gap.holdout = 100000
gap.mode = er1
complexity.tau_draws = 50
complexity.restarts = 5
complexity.steps = 100
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

struct SweepRuns {
    CsvTable first;
    std::string first_bytes;
    std::string second_bytes;
    double first_seconds = 0.0;
};

SweepRuns run_sweep_twice() {
    const auto root = std::filesystem::temp_directory_path() /
                      ("genbound_acceptance_" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    SweepRuns out;
    for (int run = 0; run < 2; ++run) {
        const auto dir = root / ("run" + std::to_string(run));
        std::filesystem::create_directories(dir);
        {
            std::ofstream cfg(dir / "sweep.cfg");
            cfg << kSweepConfig;
        }
        const auto start = std::chrono::steady_clock::now();
        const ExperimentConfig cfg = load_experiment_config(dir / "sweep.cfg");
        const RunSummary s = run_experiment(cfg, dir / "sweep.cfg");
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (run == 0) {
            out.first_seconds = secs;
            out.first = read_csv(s.results_csv);
            out.first_bytes = slurp(s.results_csv);
        } else {
            out.second_bytes = slurp(s.results_csv);
        }
    }
    std::filesystem::remove_all(root);
    return out;
}

Outcome gap_dominance(const SweepRuns& runs) {
    const CsvTable& t = runs.first;
    std::size_t total = 0;
    std::size_t held = 0;
    double worst_margin = INFINITY;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double n = t.real(r, "n");
        if (n != 50.0 && n != 200.0) continue;
        ++total;
        const double gap = t.real(r, "gap");
        const double bound = t.real(r, "bound_conservative");
        if (gap <= bound) ++held;
        worst_margin = std::min(worst_margin, bound - gap);
    }
    const double rate = total ? static_cast<double>(held) / static_cast<double>(total) : 0.0;
    const bool timely = runs.first_seconds < 1800.0;
    return {total == 80 && rate >= 0.95 && timely,
            std::to_string(held) + "/" + std::to_string(total) + " runs with gap <= bound_conservative (" +
                fixed(100.0 * rate) + "%), smallest margin " + fixed(worst_margin) +
                ", sweep wall time " + fixed(runs.first_seconds) + " s"};
}

Outcome gap_decay(const SweepRuns& runs) {
    const CsvTable& t = runs.first;
    bool pass = true;
    std::string detail;
    for (double lambda : {0.0, 0.5}) {
        std::vector<double> small, large;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.real(r, "lambda") != lambda) continue;
            const double n = t.real(r, "n");
            if (n == 50.0) small.push_back(std::abs(t.real(r, "gap")));
            if (n == 400.0) large.push_back(std::abs(t.real(r, "gap")));
        }
        const bool ok = small.size() == 20 && large.size() == 20 && median(large) < median(small);
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + std::string("lambda ") + fixed(lambda) +
                  ": median |gap| n=50 " + fixed(small.empty() ? NAN : median(small)) + ", n=400 " +
                  fixed(large.empty() ? NAN : median(large));
    }
    return {pass, detail};
}

Outcome reproducibility(const SweepRuns& runs) {
    const bool same = !runs.first_bytes.empty() && runs.first_bytes == runs.second_bytes;
    return {same, std::to_string(runs.first.rows.size()) + " rows, " +
                      std::to_string(runs.first_bytes.size()) + " bytes, " +
                      (same ? "identical" : "different")};
}

// ------------------------------------------------------------- criterion 9

Outcome dudley_sanity() {
    const std::vector<double> ns{4, 16, 64, 256, 1024};
    std::vector<double> d, ratio;
    bool finite = true;
    bool monotone = true;
    for (double n : ns) {
        const double v = dudley_bound(CoveringKind::nondecreasing, 1.0, n, n + 1.0).value;
        finite = finite && std::isfinite(v);
        if (!d.empty() && v > d.back()) monotone = false;
        d.push_back(v);
        ratio.push_back(nondecreasing_closed_form(1.0, 1.0, n) / v);
    }
    // The fitted constant is the largest c with c * dudley <= closed form on
    // the grid; stability asks that no grid point allows more than twice it.
    const double c = *std::min_element(ratio.begin(), ratio.end());
    const double spread = *std::max_element(ratio.begin(), ratio.end()) / c;
    const bool stable = spread <= 2.0;
    std::string values;
    for (std::size_t i = 0; i < ns.size(); ++i)
        values += (i ? ", " : "") + fixed(ns[i]) + ":" + fixed(d[i]);
    return {finite && monotone && stable,
            std::string("dudley {") + values + "}; finite " + (finite ? "yes" : "no") +
                ", non-increasing " + (monotone ? "yes" : "no") + ", fitted constant " + fixed(c) +
                ", closed-form/dudley ratio spread x" + fixed(spread) + " (limit x2)"};
}

// ------------------------------------------------------------------ driver

struct Criterion {
    int id;
    std::string name;
    double limit_seconds; // 0: no runtime limit of its own
    std::function<Outcome()> run;
};

} // namespace

int main() {
    std::optional<SweepRuns> sweep;
    const auto sweep_runs = [&]() -> const SweepRuns& {
        if (!sweep) sweep = run_sweep_twice();
        return *sweep;
    };

    const std::vector<Criterion> criteria{
        {1, "formula fidelity", 10, formula_fidelity},
        {2, "Massart dominance on enumerated classes", 120, massart_dominance},
        {3, "Monte-Carlo estimator consistency", 300, estimator_consistency},
        {4, "gradient correctness", 10, gradient_correctness},
        {5, "projection correctness", 0, projection_correctness},
        {6, "objective identities", 0, objective_identities},
        {7, "gap dominance at desk scale", 0, [&] { return gap_dominance(sweep_runs()); }},
        {8, "gap decay from n=50 to n=400", 0, [&] { return gap_decay(sweep_runs()); }},
        {9, "Dudley evaluator sanity", 0, dudley_sanity},
        {10, "end-to-end reproducibility", 0, [&] { return reproducibility(sweep_runs()); }},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
            o.pass = false;
            o.detail += "; exceeded " + fixed(c.limit_seconds) + " s";
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
