#include "genbound/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace genbound {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    for (std::size_t i = 0; i < key.size(); ++i) {
        const char c = key[i];
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '_' || (c == '.' && key[i - 1] != '.');
        if (!ok) return false;
    }
    return true;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string_view rest = value;
    while (true) {
        const auto comma = rest.find(',');
        items.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return items;
}

std::optional<double> to_real(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_count(const std::string& s) {
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc() && ptr == end) return v;
    // Allow integral values written in floating form, e.g. 1e5.
    const auto r = to_real(s);
    if (r && *r >= 0.0 && *r < 1.8e19 && std::floor(*r) == *r) return static_cast<std::uint64_t>(*r);
    return std::nullopt;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "experiment", "output_dir", "threads", "seeds", "delta",
        "data.d_x", "data.d_z",
        "data.x.source", "data.x.alpha", "data.x.beta", "data.x.path", "data.x.seed",
        "data.z.source", "data.z.alpha", "data.z.beta", "data.z.path", "data.z.seed",
        "disc.width", "disc.activation", "gen.width", "gen.activation",
        "sweep.n", "sweep.m", "sweep.V", "sweep.lambda", "sweep.width",
        "gap.holdout", "gap.mode",
        "opt.step_size", "opt.steps", "opt.restarts", "opt.inner_disc_steps", "opt.init_scale",
        "complexity.tau_draws", "complexity.restarts", "complexity.steps", "complexity.step_size",
        "rademacher.mode", "rademacher.grid_levels", "rademacher.work_cap",
        "bounds.C", "bounds.C1", "bounds.t", "bounds.delta_grid", "bounds.grid_levels",
        "bounds.card_D", "bounds.card_G",
        "output.record_runtime", "output.plots",
    };
    return keys;
}

} // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& field,
                         const std::string& message)
    : InputError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                 (field.empty() ? std::string() : ": " + field) + ": " + message),
      line_(line), field_(field) {}

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source) {
    ConfigFile file;
    file.source_ = source;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(std::string_view(raw).substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source, line, "", "expected 'key = value', got '" + text + "'");
        Entry e{trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)),
                line};
        if (!valid_key(e.key)) throw ConfigError(source, line, e.key, "malformed key");
        if (e.value.empty()) throw ConfigError(source, line, e.key, "empty value");
        if (const Entry* prev = file.find(e.key))
            throw ConfigError(source, line, e.key,
                              "duplicate key (first set on line " + std::to_string(prev->line) + ")");
        file.entries_.push_back(std::move(e));
    }
    return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
    return parse(in, path.string());
}

const ConfigFile::Entry* ConfigFile::find(const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

void ConfigFile::fail(const std::string& key, const std::string& message) const {
    const Entry* e = find(key);
    throw ConfigError(source_, e ? e->line : 0, key, message);
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::optional<std::string>& fallback) const {
    if (const Entry* e = find(key)) return e->value;
    if (!fallback) fail(key, "required key is missing");
    return *fallback;
}

double ConfigFile::get_real(const std::string& key, const std::optional<double>& fallback) const {
    const Entry* e = find(key);
    if (!e) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    const auto v = to_real(e->value);
    if (!v) fail(key, "expected a real number, got '" + e->value + "'");
    return *v;
}

std::size_t ConfigFile::get_count(const std::string& key,
                                  const std::optional<std::size_t>& fallback) const {
    const Entry* e = find(key);
    if (!e) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    const auto v = to_count(e->value);
    if (!v) fail(key, "expected a non-negative integer, got '" + e->value + "'");
    return static_cast<std::size_t>(*v);
}

bool ConfigFile::get_bool(const std::string& key, const std::optional<bool>& fallback) const {
    const Entry* e = find(key);
    if (!e) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail(key, "expected true or false, got '" + e->value + "'");
}

std::vector<double> ConfigFile::get_reals(const std::string& key,
                                          const std::optional<std::vector<double>>& fallback) const {
    const Entry* e = find(key);
    if (!e) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    std::vector<double> out;
    for (const std::string& item : split_list(e->value)) {
        const auto v = to_real(item);
        if (!v) fail(key, "expected a list of real numbers, got item '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<std::uint64_t> ConfigFile::get_counts(
    const std::string& key, const std::optional<std::vector<std::uint64_t>>& fallback) const {
    const Entry* e = find(key);
    if (!e) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    std::vector<std::uint64_t> out;
    for (const std::string& item : split_list(e->value)) {
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const auto lo = to_count(trim(std::string_view(item).substr(0, dots)));
            const auto hi = to_count(trim(std::string_view(item).substr(dots + 2)));
            if (!lo || !hi || *lo > *hi) fail(key, "malformed range '" + item + "'");
            if (*hi - *lo >= 1000000) fail(key, "range '" + item + "' is too long");
            for (std::uint64_t v = *lo; v <= *hi; ++v) out.push_back(v);
            continue;
        }
        const auto v = to_count(item);
        if (!v) fail(key, "expected a list of non-negative integers, got item '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<std::string> ConfigFile::get_strings(
    const std::string& key, const std::optional<std::vector<std::string>>& fallback) const {
    const Entry* e = find(key);
    if (!e) {
        if (!fallback) fail(key, "required key is missing");
        return *fallback;
    }
    std::vector<std::string> out = split_list(e->value);
    for (const std::string& item : out)
        if (item.empty()) fail(key, "empty list item");
    return out;
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::rademacher:
        return "rademacher";
    case ExperimentKind::bounds:
        return "bounds";
    case ExperimentKind::gap_sweep:
        return "gap_sweep";
    case ExperimentKind::train:
        return "train";
    }
    return "?";
}

ClassSpec ExperimentConfig::disc_spec(double V) const {
    return ClassSpec::discriminator(d_x, disc_width, disc_activation, V);
}

ClassSpec ExperimentConfig::gen_spec(double V) const {
    return ClassSpec::generator(d_z, d_x, gen_width, gen_activation, V);
}

std::vector<std::pair<std::size_t, std::size_t>> ExperimentConfig::sample_sizes() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::uint64_t n : n_values) {
        if (m_values.empty()) {
            out.emplace_back(n, n);
        } else {
            for (std::uint64_t m : m_values) out.emplace_back(n, m);
        }
    }
    return out;
}

namespace {

SourceSpec parse_source(const ConfigFile& f, const std::string& prefix, std::size_t dim,
                        const std::filesystem::path& base_dir) {
    const std::string kind_key = prefix + ".source";
    const std::string kind = f.get_string(kind_key, "uniform");
    const auto seed = static_cast<std::uint64_t>(f.get_count(prefix + ".seed", 0));
    if (kind == "uniform") return SourceSpec::uniform(dim, seed);
    if (kind == "beta") {
        const double a = f.get_real(prefix + ".alpha", 2.0);
        const double b = f.get_real(prefix + ".beta", 5.0);
        if (!(a > 0.0)) f.fail(prefix + ".alpha", "must be positive");
        if (!(b > 0.0)) f.fail(prefix + ".beta", "must be positive");
        return SourceSpec::beta_product(dim, a, b, seed);
    }
    if (kind == "dataset") {
        std::filesystem::path p = f.get_string(prefix + ".path", std::nullopt);
        if (p.is_relative()) p = (base_dir / p).lexically_normal();
        return SourceSpec::dataset(p.string(), dim, seed);
    }
    f.fail(kind_key, "unknown source '" + kind + "' (expected uniform, beta or dataset)");
}

Activation parse_activation_key(const ConfigFile& f, const std::string& key) {
    const std::string s = f.get_string(key, "clamp01");
    if (s == "clamp01") return Activation::clamp01;
    if (s == "logistic") return Activation::logistic;
    f.fail(key, "unknown activation '" + s + "' (expected clamp01 or logistic)");
}

void require_nonempty(const ConfigFile& f, const std::string& key, std::size_t size) {
    if (size == 0) f.fail(key, "list must not be empty");
}

} // namespace

ExperimentConfig parse_experiment_config(const ConfigFile& f, const std::filesystem::path& base_dir) {
    for (const auto& e : f.entries())
        if (!known_keys().count(e.key)) throw ConfigError(f.source(), e.line, e.key, "unknown key");

    ExperimentConfig c;
    const std::string kind = f.get_string("experiment", std::nullopt);
    if (kind == "rademacher") c.experiment = ExperimentKind::rademacher;
    else if (kind == "bounds") c.experiment = ExperimentKind::bounds;
    else if (kind == "gap_sweep") c.experiment = ExperimentKind::gap_sweep;
    else if (kind == "train") c.experiment = ExperimentKind::train;
    else f.fail("experiment", "unknown experiment '" + kind + "' (expected rademacher, bounds, gap_sweep or train)");

    c.output_dir = f.get_string("output_dir", std::nullopt);
    if (c.output_dir.is_relative()) c.output_dir = (base_dir / c.output_dir).lexically_normal();
    c.threads = f.get_count("threads", 0);

    c.seeds = f.get_counts("seeds", std::vector<std::uint64_t>{0});
    require_nonempty(f, "seeds", c.seeds.size());
    {
        std::vector<std::uint64_t> sorted = c.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            f.fail("seeds", "seeds must be distinct");
    }
    c.delta = f.get_real("delta", 0.025);
    if (!(c.delta > 0.0 && c.delta < 1.0)) f.fail("delta", "must lie in (0, 1)");

    c.d_x = f.get_count("data.d_x", 1);
    c.d_z = f.get_count("data.d_z", 1);
    if (c.d_x == 0) f.fail("data.d_x", "must be >= 1");
    if (c.d_z == 0) f.fail("data.d_z", "must be >= 1");
    c.x_source = parse_source(f, "data.x", c.d_x, base_dir);
    c.z_source = parse_source(f, "data.z", c.d_z, base_dir);

    c.disc_width = f.get_count("disc.width", 1);
    c.gen_width = f.get_count("gen.width", 1);
    if (c.disc_width == 0) f.fail("disc.width", "must be >= 1");
    if (c.gen_width == 0) f.fail("gen.width", "must be >= 1");
    c.disc_activation = parse_activation_key(f, "disc.activation");
    c.gen_activation = parse_activation_key(f, "gen.activation");

    c.n_values = f.get_counts("sweep.n", std::nullopt);
    require_nonempty(f, "sweep.n", c.n_values.size());
    for (auto n : c.n_values)
        if (n == 0) f.fail("sweep.n", "sample sizes must be >= 1");
    if (f.find("sweep.m")) {
        c.m_values = f.get_counts("sweep.m", std::nullopt);
        for (auto m : c.m_values)
            if (m == 0) f.fail("sweep.m", "sample sizes must be >= 1");
    }
    c.V_values = f.get_reals("sweep.V", std::vector<double>{1.0});
    require_nonempty(f, "sweep.V", c.V_values.size());
    for (double V : c.V_values)
        if (!(V >= 0.0)) f.fail("sweep.V", "budgets must be >= 0");
    c.lambda_values = f.get_reals("sweep.lambda", std::vector<double>{0.0});
    require_nonempty(f, "sweep.lambda", c.lambda_values.size());
    c.widths = f.get_counts("sweep.width", std::vector<std::uint64_t>{c.disc_width});
    for (auto w : c.widths)
        if (w == 0) f.fail("sweep.width", "widths must be >= 1");

    c.holdout = f.get_count("gap.holdout", 100000);
    if (c.experiment == ExperimentKind::gap_sweep && c.holdout < 10000)
        f.fail("gap.holdout", "must be >= 10000");
    const std::string mode = f.get_string("gap.mode", "er1");
    if (mode == "er1") c.gap_mode = GapMode::er1;
    else if (mode == "er2") c.gap_mode = GapMode::er2;
    else f.fail("gap.mode", "unknown mode '" + mode + "' (expected er1 or er2)");

    c.opt.step_size = f.get_real("opt.step_size", c.opt.step_size);
    c.opt.steps = f.get_count("opt.steps", c.opt.steps);
    c.opt.restarts = f.get_count("opt.restarts", c.opt.restarts);
    c.opt.inner_disc_steps = f.get_count("opt.inner_disc_steps", c.opt.inner_disc_steps);
    c.opt.init_scale = f.get_real("opt.init_scale", c.opt.init_scale);
    try {
        c.opt.validate();
    } catch (const ContractError& e) {
        throw ConfigError(f.source(), 0, "opt", e.what());
    }

    c.complexity.tau_draws = f.get_count("complexity.tau_draws", c.complexity.tau_draws);
    c.complexity.opt.restarts = f.get_count("complexity.restarts", c.complexity.opt.restarts);
    c.complexity.opt.steps = f.get_count("complexity.steps", c.complexity.opt.steps);
    c.complexity.opt.step_size = f.get_real("complexity.step_size", c.complexity.opt.step_size);
    if (c.complexity.tau_draws < 2) f.fail("complexity.tau_draws", "must be >= 2");
    try {
        c.complexity.opt.validate();
    } catch (const ContractError& e) {
        throw ConfigError(f.source(), 0, "complexity", e.what());
    }

    const std::string rmode = f.get_string("rademacher.mode", "monte_carlo");
    if (rmode == "monte_carlo") c.rademacher_mode = RademacherSweepMode::monte_carlo;
    else if (rmode == "exact") c.rademacher_mode = RademacherSweepMode::exact;
    else if (rmode == "both") c.rademacher_mode = RademacherSweepMode::both;
    else f.fail("rademacher.mode", "unknown mode '" + rmode + "' (expected monte_carlo, exact or both)");
    c.grid_levels = f.get_counts("rademacher.grid_levels", std::vector<std::uint64_t>{3});
    require_nonempty(f, "rademacher.grid_levels", c.grid_levels.size());
    for (auto g : c.grid_levels)
        if (g < 3 || g % 2 == 0) f.fail("rademacher.grid_levels", "grid levels must be odd and >= 3");
    c.work_cap = f.get_real("rademacher.work_cap", 1e6);
    if (!(c.work_cap > 0.0)) f.fail("rademacher.work_cap", "must be positive");

    c.C = f.get_real("bounds.C", 1.0);
    c.C1 = f.get_real("bounds.C1", 1.0);
    c.t = f.get_real("bounds.t", 0.0);
    if (!(c.C > 0.0)) f.fail("bounds.C", "must be positive");
    if (!(c.C1 > 0.0)) f.fail("bounds.C1", "must be positive");
    if (c.t < 0.0) f.fail("bounds.t", "must be >= 0 (0 selects n + 1)");
    c.delta_grid = f.get_count("bounds.delta_grid", 64);
    if (c.delta_grid < 8) f.fail("bounds.delta_grid", "must be >= 8");
    c.bounds_grid_levels = f.get_count("bounds.grid_levels", 3);
    if (c.bounds_grid_levels < 3 || c.bounds_grid_levels % 2 == 0)
        f.fail("bounds.grid_levels", "grid levels must be odd and >= 3");
    if (f.find("bounds.card_D")) {
        c.card_D = f.get_real("bounds.card_D", std::nullopt);
        if (*c.card_D < 1.0) f.fail("bounds.card_D", "must be >= 1");
    }
    if (f.find("bounds.card_G")) {
        c.card_G = f.get_real("bounds.card_G", std::nullopt);
        if (*c.card_G < 1.0) f.fail("bounds.card_G", "must be >= 1");
    }

    c.record_runtime = f.get_bool("output.record_runtime", false);
    c.plots = f.get_strings("output.plots", std::vector<std::string>{});
    for (const std::string& p : c.plots) {
        if (p != "gap_vs_n" && p != "bound_vs_empirical" && p != "complexity_vs_n")
            f.fail("output.plots", "unknown plot kind '" + p + "'");
        const auto needs = p == "complexity_vs_n" ? ExperimentKind::rademacher : ExperimentKind::gap_sweep;
        if (c.experiment != needs)
            f.fail("output.plots", "plot kind '" + p + "' needs a " + to_string(needs) + " experiment");
    }

    for (const auto& e : f.entries()) c.echo.emplace_back(e.key, e.value);
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const ConfigFile file = ConfigFile::load(path);
    return parse_experiment_config(file, path.parent_path().empty() ? "." : path.parent_path());
}

} // namespace genbound
