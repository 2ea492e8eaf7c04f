#include "genbound/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "genbound/bounds.hpp"
#include "genbound/gap.hpp"
#include "genbound/kernels.hpp"
#include "genbound/plot.hpp"

#ifndef GENBOUND_VERSION
#define GENBOUND_VERSION "0.0.0"
#endif

namespace genbound {

namespace {

using Row = std::vector<std::string>;

std::string fmt(double v) { return format_real(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

// Runs job(i) for i in [0, count) on a pool of workers and returns the
// results in index order. The first failure by index is rethrown.
template <class R>
std::vector<R> parallel_map(std::size_t count, std::size_t threads,
                            const std::function<R(std::size_t)>& job) {
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

template <class F>
auto named(const std::string& operation, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(operation + ": " + e.what());
    }
}

// Cardinality of the grid class without enumerating it: a zero cap always
// refuses and reports the count.
double grid_cardinality(const ClassSpec& spec, std::size_t grid_levels) {
    try {
        return static_cast<double>(FiniteClass(spec, grid_levels, 0.0).cardinality());
    } catch (const CapExceeded& e) {
        return e.cost();
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

// ---------------------------------------------------------------- gap_sweep

struct GapJob {
    std::size_t n, m;
    double V, lambda;
    std::uint64_t seed;
};

std::vector<Row> run_gap_sweep(const ExperimentConfig& cfg) {
    std::vector<GapJob> jobs;
    for (const auto& [n, m] : cfg.sample_sizes())
        for (double V : cfg.V_values)
            for (double lambda : cfg.lambda_values)
                for (std::uint64_t seed : cfg.seeds) jobs.push_back({n, m, V, lambda, seed});

    return parallel_map<Row>(jobs.size(), cfg.threads, [&](std::size_t i) {
        const GapJob& j = jobs[i];
        GapConfig g;
        g.disc = cfg.disc_spec(j.V);
        g.gen = cfg.gen_spec(j.V);
        g.px = cfg.x_source;
        g.pz = cfg.z_source;
        g.n = j.n;
        g.m = j.m;
        g.lambda = j.lambda;
        g.delta = cfg.delta;
        g.holdout = cfg.holdout;
        g.opt = cfg.opt;
        g.complexity = cfg.complexity;
        g.mode = cfg.gap_mode;
        g.seed = j.seed;
        const auto start = std::chrono::steady_clock::now();
        const GapRecord r = named("measure_gap (n=" + std::to_string(j.n) + ", m=" +
                                      std::to_string(j.m) + ", V=" + fmt(j.V) + ", lambda=" +
                                      fmt(j.lambda) + ", seed=" + std::to_string(j.seed) + ")",
                                  [&] { return measure_gap(g); });
        const std::string runtime = cfg.record_runtime ? fmt(elapsed_ms(start)) : "0";
        return Row{to_string(r.mode),       fmt(r.seed),
                   fmt(std::uint64_t(r.n)), fmt(std::uint64_t(r.m)),
                   fmt(std::uint64_t(r.d_x)), fmt(std::uint64_t(r.d_z)),
                   fmt(r.V),                fmt(r.lambda),
                   fmt(r.delta),            fmt(r.value_empirical),
                   fmt(r.value_population), fmt(r.gap),
                   fmt(r.rademacher_D),     fmt(r.rademacher_DG),
                   fmt(r.rademacher_G),     fmt(r.bound_verbatim),
                   fmt(r.bound_conservative), runtime};
    });
}

// --------------------------------------------------------------- rademacher

struct RademacherJob {
    std::uint64_t seed;
    std::size_t n;
    double V;
    std::size_t width;
};

std::vector<Row> run_rademacher(const ExperimentConfig& cfg) {
    std::vector<RademacherJob> jobs;
    for (std::uint64_t seed : cfg.seeds)
        for (std::uint64_t n : cfg.n_values)
            for (double V : cfg.V_values)
                for (std::uint64_t width : cfg.widths) jobs.push_back({seed, n, V, width});

    const bool run_mc = cfg.rademacher_mode != RademacherSweepMode::exact;
    const bool run_exact = cfg.rademacher_mode != RademacherSweepMode::monte_carlo;

    const auto rows = parallel_map<std::vector<Row>>(jobs.size(), cfg.threads, [&](std::size_t i) {
        const RademacherJob& j = jobs[i];
        const std::string where = " (seed=" + std::to_string(j.seed) + ", n=" +
                                  std::to_string(j.n) + ", V=" + fmt(j.V) + ", width=" +
                                  std::to_string(j.width) + ")";
        const ClassSpec spec =
            ClassSpec::discriminator(cfg.d_x, j.width, cfg.disc_activation, j.V);
        const Matrix x = named("sample" + where, [&] {
            return sample(cfg.x_source, j.n, derive_stream("rademacher.sample", j.seed));
        });

        std::optional<RademacherEstimate> mc;
        if (run_mc) {
            RademacherConfig rc = cfg.complexity;
            rc.seed = derive_stream("rademacher.mc", j.seed);
            mc = named("empirical_rademacher" + where,
                       [&] { return empirical_rademacher(spec, x, rc); });
        }
        std::vector<Row> out;
        const auto emit = [&](std::size_t g, const RademacherEstimate& e) {
            const double massart =
                massart_bound_disc(j.V, static_cast<double>(j.n), grid_cardinality(spec, g));
            out.push_back({fmt(j.seed), fmt(std::uint64_t(j.n)), fmt(j.V),
                           fmt(std::uint64_t(j.width)), fmt(std::uint64_t(g)), to_string(e.mode),
                           fmt(e.mean), fmt(e.std_error), fmt(massart),
                           e.mean <= massart ? "1" : "0"});
        };
        for (std::uint64_t g : cfg.grid_levels) {
            if (mc) emit(g, *mc);
            if (run_exact) {
                const auto e = named("exact_rademacher" + where + " grid_levels=" + std::to_string(g),
                                     [&] {
                                         const FiniteClass fc(spec, g, cfg.work_cap);
                                         return exact_rademacher(fc, x, cfg.work_cap);
                                     });
                emit(g, e);
            }
        }
        return out;
    });
    std::vector<Row> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return flat;
}

// ------------------------------------------------------------------- bounds

std::vector<Row> run_bounds(const ExperimentConfig& cfg) {
    std::vector<std::tuple<std::size_t, std::size_t, double, double>> jobs;
    for (const auto& [n, m] : cfg.sample_sizes())
        for (double V : cfg.V_values)
            for (double lambda : cfg.lambda_values) jobs.emplace_back(n, m, V, lambda);

    const auto rows = parallel_map<std::vector<Row>>(jobs.size(), cfg.threads, [&](std::size_t i) {
        const auto [n_count, m_count, V, lambda] = jobs[i];
        const double n = static_cast<double>(n_count);
        const double m = static_cast<double>(m_count);
        const ClassSpec disc = cfg.disc_spec(V);
        ClassSpec head = cfg.gen_spec(V);
        head.output_dim = 1;
        head.role = Role::discriminator;
        const double card_D = cfg.card_D ? *cfg.card_D : grid_cardinality(disc, cfg.bounds_grid_levels);
        const double card_G = cfg.card_G ? *cfg.card_G : grid_cardinality(head, cfg.bounds_grid_levels);
        const double Q_x = disc.envelope();
        const double Q_z = cfg.gen_spec(V).envelope();
        const double t = cfg.t > 0.0 ? cfg.t : n + 1.0;
        const std::string where = " (n=" + fmt(n) + ", m=" + fmt(m) + ", V=" + fmt(V) +
                                  ", lambda=" + fmt(lambda) + ")";

        std::vector<Row> out;
        const auto emit = [&](const std::string& name, const std::string& variant, double value) {
            out.push_back({name, variant, fmt(value), fmt(V), fmt(n), fmt(m), fmt(lambda),
                           fmt(cfg.delta), fmt(card_D), fmt(card_G), fmt(Q_x), fmt(Q_z),
                           fmt(cfg.C), fmt(cfg.C1), fmt(t)});
        };
        named("bounds" + where, [&] {
            emit("massart_bound_disc", "none", massart_bound_disc(V, n, card_D));
            emit("lipschitz_entropy_bound", "none", lipschitz_entropy_bound(V, n, cfg.C1));
            emit("composition_bound", "none", composition_bound(V, m, card_G));
            emit("nondecreasing_closed_form", "none", nondecreasing_closed_form(cfg.C, V, n));
            emit("dudley_lipschitz", "none",
                 dudley_bound(CoveringKind::lipschitz, V, n, t, cfg.delta_grid).value);
            emit("dudley_nondecreasing", "none",
                 dudley_bound(CoveringKind::nondecreasing, V, n, t, cfg.delta_grid).value);
            emit("concentration_x", "none", concentration_term(Q_x, n, cfg.delta));
            emit("concentration_z", "none", concentration_term(Q_z, m, cfg.delta));
            CorollaryInputs in;
            in.V = V;
            in.n = n;
            in.m = m;
            in.card_D = card_D;
            in.card_G = card_G;
            in.delta = cfg.delta;
            in.lambda = lambda;
            in.Q_x = Q_x;
            in.Q_z = Q_z;
            in.C = cfg.C;
            in.C1 = cfg.C1;
            for (Corollary c : {Corollary::lip_full, Corollary::lip_entropy, Corollary::lip_disc,
                                Corollary::lip_disc_entropy, Corollary::nd_disc_3_4,
                                Corollary::nd_full_3_5})
                for (BoundVariant v : {BoundVariant::verbatim, BoundVariant::conservative})
                    emit(to_string(c), to_string(v), corollary_bounds(c, in, v).value);
            return 0;
        });
        return out;
    });
    std::vector<Row> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return flat;
}

// -------------------------------------------------------------------- train

struct TrainRows {
    Row result;
    std::vector<Row> trace;
};

ExperimentTables run_train(const ExperimentConfig& cfg) {
    std::vector<GapJob> jobs;
    for (const auto& [n, m] : cfg.sample_sizes())
        for (double V : cfg.V_values)
            for (double lambda : cfg.lambda_values)
                for (std::uint64_t seed : cfg.seeds) jobs.push_back({n, m, V, lambda, seed});

    const auto rows = parallel_map<TrainRows>(jobs.size(), cfg.threads, [&](std::size_t i) {
        const GapJob& j = jobs[i];
        const Matrix x = sample(cfg.x_source, j.n, train_x_stream(j.seed));
        const Matrix z = sample(cfg.z_source, j.m, train_z_stream(j.seed));
        OptConfig opt = cfg.opt;
        opt.seed = derive_stream("gap.train", j.seed);
        const TrainResult r = named(
            "minimax_train (n=" + std::to_string(j.n) + ", m=" + std::to_string(j.m) + ", V=" +
                fmt(j.V) + ", lambda=" + fmt(j.lambda) + ", seed=" + std::to_string(j.seed) + ")",
            [&] {
                return minimax_train(cfg.disc_spec(j.V), cfg.gen_spec(j.V), x, z, j.lambda, opt);
            });
        TrainRows out;
        out.result = {fmt(j.seed),   fmt(std::uint64_t(j.n)),      fmt(std::uint64_t(j.m)),
                      fmt(std::uint64_t(cfg.d_x)), fmt(std::uint64_t(cfg.d_z)), fmt(j.V),
                      fmt(j.lambda), fmt(r.value),
                      fmt(r.trace.empty() ? r.value : r.trace.front().value),
                      fmt(std::uint64_t(cfg.opt.steps)), fmt(std::uint64_t(cfg.opt.restarts))};
        for (const TracePoint& p : r.trace)
            out.trace.push_back({fmt(j.seed), fmt(std::uint64_t(j.n)), fmt(std::uint64_t(j.m)),
                                 fmt(j.V), fmt(j.lambda), fmt(std::uint64_t(p.step)),
                                 fmt(p.value)});
        return out;
    });
    ExperimentTables t;
    t.results.header = train_columns();
    t.trace.header = {"seed", "n", "m", "V", "lambda", "step", "value"};
    for (const auto& r : rows) {
        t.results.rows.push_back(r.result);
        t.trace.rows.insert(t.trace.rows.end(), r.trace.begin(), r.trace.end());
    }
    return t;
}

nlohmann::ordered_json source_json(const SourceSpec& s) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    j["dim"] = s.dim;
    j["seed"] = s.seed;
    if (s.kind == SourceKind::independent_beta) {
        j["alpha"] = s.alpha;
        j["beta"] = s.beta;
    }
    if (s.kind == SourceKind::fixed_dataset) j["path"] = s.path;
    return j;
}

// Every effective setting, defaults included, so any row can be recomputed
// from the manifest alone.
nlohmann::ordered_json resolved_settings(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["delta"] = cfg.delta;
    j["x_source"] = source_json(cfg.x_source);
    j["z_source"] = source_json(cfg.z_source);
    j["disc"] = {{"width", cfg.disc_width}, {"activation", std::string(to_string(cfg.disc_activation))}};
    j["gen"] = {{"width", cfg.gen_width}, {"activation", std::string(to_string(cfg.gen_activation))}};
    j["sweep"] = {{"n", cfg.n_values}, {"m", cfg.m_values}, {"V", cfg.V_values},
                  {"lambda", cfg.lambda_values}, {"width", cfg.widths}};
    j["gap"] = {{"holdout", cfg.holdout}, {"mode", to_string(cfg.gap_mode)}};
    j["opt"] = {{"step_size", cfg.opt.step_size}, {"steps", cfg.opt.steps},
                {"restarts", cfg.opt.restarts}, {"inner_disc_steps", cfg.opt.inner_disc_steps},
                {"init_scale", cfg.opt.init_scale}};
    j["complexity"] = {{"tau_draws", cfg.complexity.tau_draws},
                       {"restarts", cfg.complexity.opt.restarts},
                       {"steps", cfg.complexity.opt.steps},
                       {"step_size", cfg.complexity.opt.step_size}};
    j["rademacher"] = {{"grid_levels", cfg.grid_levels}, {"work_cap", cfg.work_cap}};
    j["bounds"] = {{"C", cfg.C}, {"C1", cfg.C1}, {"t", cfg.t}, {"delta_grid", cfg.delta_grid},
                   {"grid_levels", cfg.bounds_grid_levels}};
    return j;
}

} // namespace

const std::vector<std::string>& gap_sweep_columns() {
    static const std::vector<std::string> c = {
        "experiment",   "seed",         "n",          "m",           "d_x",
        "d_z",          "V",            "lambda",     "delta",       "value_empirical",
        "value_population", "gap",      "rademacher_D", "rademacher_DG", "rademacher_G",
        "bound_verbatim", "bound_conservative", "runtime_ms"};
    return c;
}

const std::vector<std::string>& rademacher_columns() {
    static const std::vector<std::string> c = {"seed",     "n",         "V",
                                               "width",    "grid_levels", "mode",
                                               "estimate", "std_error", "massart_bound",
                                               "dominance_ok"};
    return c;
}

const std::vector<std::string>& bounds_columns() {
    static const std::vector<std::string> c = {"name",  "variant", "value", "V",     "n",
                                               "m",     "lambda",  "delta", "card_D", "card_G",
                                               "Q_x",   "Q_z",     "C",     "C1",    "t"};
    return c;
}

const std::vector<std::string>& train_columns() {
    static const std::vector<std::string> c = {"seed", "n", "m", "d_x", "d_z", "V", "lambda",
                                               "value", "first_value", "steps", "restarts"};
    return c;
}

ExperimentTables compute_experiment(const ExperimentConfig& cfg) {
    ExperimentTables t;
    switch (cfg.experiment) {
    case ExperimentKind::gap_sweep:
        t.results.header = gap_sweep_columns();
        t.results.rows = run_gap_sweep(cfg);
        break;
    case ExperimentKind::rademacher:
        t.results.header = rademacher_columns();
        t.results.rows = run_rademacher(cfg);
        break;
    case ExperimentKind::bounds:
        t.results.header = bounds_columns();
        t.results.rows = run_bounds(cfg);
        break;
    case ExperimentKind::train:
        t = run_train(cfg);
        break;
    }
    return t;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& config_path) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentTables tables = compute_experiment(cfg);

    RunSummary s;
    named("write outputs", [&] {
        std::filesystem::create_directories(cfg.output_dir);
        s.results_csv = cfg.output_dir / "results.csv";
        write_csv(s.results_csv, tables.results);
        if (cfg.experiment == ExperimentKind::train) write_csv(cfg.output_dir / "trace.csv", tables.trace);
        for (const std::string& p : cfg.plots) {
            const PlotKind kind = parse_plot_kind(p);
            const auto out = cfg.output_dir / (p + ".svg");
            std::ofstream f(out, std::ios::binary);
            f << render_plot(tables.results, kind);
            if (!f) throw std::runtime_error("cannot write " + out.string());
            s.plots.push_back(out);
        }
        return 0;
    });
    s.rows = tables.results.rows.size();
    s.wall_seconds = elapsed_ms(start) / 1000.0;

    nlohmann::ordered_json meta;
    meta["artifact"] = "genbound";
    meta["version"] = GENBOUND_VERSION;
    meta["experiment"] = to_string(cfg.experiment);
    meta["config_path"] = config_path.string();
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.echo) echo[k] = v;
    meta["config"] = echo;
    meta["resolved"] = resolved_settings(cfg);
    meta["seeds"] = cfg.seeds;
    meta["kernels"] = std::string(kernels::active().name);
    meta["rows"] = s.rows;
    meta["results"] = "results.csv";
    std::vector<std::string> plot_names;
    for (const auto& p : s.plots) plot_names.push_back(p.filename().string());
    meta["plots"] = plot_names;
    meta["wall_seconds"] = s.wall_seconds;
    s.manifest = cfg.output_dir / "meta.json";
    named("write manifest", [&] {
        std::ofstream f(s.manifest, std::ios::binary);
        f << meta.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + s.manifest.string());
        return 0;
    });
    return s;
}

} // namespace genbound
