#include "genbound/classes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace genbound {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ContractError(what);
}

void check_shape(const TwoLayerParams& p) {
    require(p.first_weights.size() == p.width * p.input_dim &&
                p.first_bias.size() == p.width && p.second_weights.size() == p.width,
            "TwoLayerParams: inconsistent shape");
}

} // namespace

// ------------------------------------------------------------------ ClassSpec

void ClassSpec::validate() const {
    require(input_dim >= 1, "ClassSpec: input_dim must be >= 1");
    require(width >= 1, "ClassSpec: width must be >= 1");
    require(output_dim >= 1, "ClassSpec: output_dim must be >= 1");
    require(std::isfinite(budget) && (budget == 0.0 || budget >= 1.0),
            "ClassSpec: budget must be 0 (zero-only class) or >= 1");
    require(role == Role::generator || output_dim == 1,
            "ClassSpec: discriminator output_dim must be 1");
}

ClassSpec ClassSpec::discriminator(std::size_t input_dim, std::size_t width, Activation act,
                                   double budget) {
    ClassSpec s{input_dim, width, act, budget, 1, Role::discriminator};
    s.validate();
    return s;
}

ClassSpec ClassSpec::generator(std::size_t noise_dim, std::size_t output_dim, std::size_t width,
                               Activation act, double budget) {
    ClassSpec s{noise_dim, width, act, budget, output_dim, Role::generator};
    s.validate();
    return s;
}

// ------------------------------------------------------------- TwoLayerParams

TwoLayerParams TwoLayerParams::zeros(std::size_t input_dim, std::size_t width, double budget) {
    TwoLayerParams p;
    p.input_dim = input_dim;
    p.width = width;
    p.first_weights.assign(width * input_dim, 0.0);
    p.first_bias.assign(width, 0.0);
    p.second_weights.assign(width, 0.0);
    p.second_bias = 0.0;
    p.budget = budget;
    return p;
}

std::vector<double> TwoLayerParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    flat.insert(flat.end(), first_weights.begin(), first_weights.end());
    flat.insert(flat.end(), first_bias.begin(), first_bias.end());
    flat.insert(flat.end(), second_weights.begin(), second_weights.end());
    flat.push_back(second_bias);
    return flat;
}

void TwoLayerParams::assign(std::span<const double> flat) {
    require(flat.size() == parameter_count(), "TwoLayerParams::assign: size mismatch");
    auto it = flat.begin();
    std::copy_n(it, first_weights.size(), first_weights.begin());
    it += static_cast<std::ptrdiff_t>(first_weights.size());
    std::copy_n(it, width, first_bias.begin());
    it += static_cast<std::ptrdiff_t>(width);
    std::copy_n(it, width, second_weights.begin());
    it += static_cast<std::ptrdiff_t>(width);
    second_bias = *it;
}

void TwoLayerParams::add_scaled(double alpha, const TwoLayerParams& other) {
    require(other.width == width && other.input_dim == input_dim,
            "TwoLayerParams::add_scaled: shape mismatch");
    for (std::size_t i = 0; i < first_weights.size(); ++i)
        first_weights[i] += alpha * other.first_weights[i];
    for (std::size_t u = 0; u < width; ++u) {
        first_bias[u] += alpha * other.first_bias[u];
        second_weights[u] += alpha * other.second_weights[u];
    }
    second_bias += alpha * other.second_bias;
}

TwoLayerParams TwoLayerParams::negated() const {
    TwoLayerParams n = *this;
    for (double& w : n.second_weights) w = -w;
    n.second_bias = -n.second_bias;
    return n;
}

bool TwoLayerParams::feasible(double tol) const {
    const double slack = budget * (1.0 + tol) + tol;
    for (std::size_t u = 0; u < width; ++u) {
        double l1 = std::abs(first_bias[u]);
        for (double w : unit_weights(u)) l1 += std::abs(w);
        if (l1 > slack) return false;
        if (std::abs(second_weights[u]) > slack) return false;
    }
    return std::abs(second_bias) <= slack;
}

bool TwoLayerParams::all_finite() const {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(first_weights.begin(), first_weights.end(), finite) &&
           std::all_of(first_bias.begin(), first_bias.end(), finite) &&
           std::all_of(second_weights.begin(), second_weights.end(), finite) &&
           std::isfinite(second_bias);
}

Generator Generator::zeros(const ClassSpec& spec) {
    Generator g;
    g.heads.assign(spec.output_dim, TwoLayerParams::zeros(spec.input_dim, spec.width, spec.budget));
    return g;
}

// ------------------------------------------------------------------ pointwise

double eval_unit(std::span<const double> weights, double bias, Activation act,
                 std::span<const double> x) {
    require(weights.size() == x.size(), "eval_unit: weights and x differ in dimension");
    double pre = bias;
    for (std::size_t i = 0; i < x.size(); ++i) pre += weights[i] * x[i];
    return activate(act, pre);
}

double eval_network(const TwoLayerParams& params, Activation act, std::span<const double> x) {
    check_shape(params);
    require(x.size() == params.input_dim, "eval_network: x has wrong dimension");
    double out = params.second_bias;
    for (std::size_t u = 0; u < params.width; ++u)
        out += params.second_weights[u] * eval_unit(params.unit_weights(u), params.first_bias[u], act, x);
    return out;
}

std::vector<double> eval_generator(const Generator& g, Activation act, std::span<const double> z) {
    std::vector<double> out;
    out.reserve(g.heads.size());
    for (const auto& head : g.heads) out.push_back(eval_network(head, act, z));
    return out;
}

TwoLayerParams grad_params(const TwoLayerParams& params, Activation act,
                           std::span<const double> x) {
    check_shape(params);
    require(x.size() == params.input_dim, "grad_params: x has wrong dimension");
    TwoLayerParams g = TwoLayerParams::zeros(params.input_dim, params.width, params.budget);
    for (std::size_t u = 0; u < params.width; ++u) {
        const auto w = params.unit_weights(u);
        double pre = params.first_bias[u];
        for (std::size_t i = 0; i < x.size(); ++i) pre += w[i] * x[i];
        const double upstream = params.second_weights[u] * activate_slope(act, pre);
        g.second_weights[u] = activate(act, pre);
        g.first_bias[u] = upstream;
        auto gw = g.unit_weights(u);
        for (std::size_t i = 0; i < x.size(); ++i) gw[i] = upstream * x[i];
    }
    g.second_bias = 1.0;
    return g;
}

std::vector<double> grad_input(const TwoLayerParams& params, Activation act,
                               std::span<const double> x) {
    check_shape(params);
    require(x.size() == params.input_dim, "grad_input: x has wrong dimension");
    std::vector<double> g(params.input_dim, 0.0);
    for (std::size_t u = 0; u < params.width; ++u) {
        const auto w = params.unit_weights(u);
        double pre = params.first_bias[u];
        for (std::size_t i = 0; i < x.size(); ++i) pre += w[i] * x[i];
        const double upstream = params.second_weights[u] * activate_slope(act, pre);
        for (std::size_t i = 0; i < x.size(); ++i) g[i] += upstream * w[i];
    }
    return g;
}

// ---------------------------------------------------------------- projections

std::pair<std::vector<double>, double> project_first_layer(std::span<const double> weights,
                                                           double bias, double budget) {
    require(budget > 0.0, "project_first_layer: budget must be > 0");
    std::vector<double> v;
    v.reserve(weights.size() + 1);
    v.push_back(bias);
    v.insert(v.end(), weights.begin(), weights.end());

    double l1 = 0.0;
    for (double c : v) l1 += std::abs(c);
    // Rounding slack of the l1 sum, so a projected vector maps to itself.
    const double slack = static_cast<double>(v.size() + 1) * std::numeric_limits<double>::epsilon();
    if (l1 <= budget * (1.0 + slack)) return {std::vector<double>(weights.begin(), weights.end()), bias};

    // Sort-based threshold search for the simplex projection of |v|.
    std::vector<double> mags(v.size());
    std::transform(v.begin(), v.end(), mags.begin(), [](double c) { return std::abs(c); });
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double prefix = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < mags.size(); ++j) {
        prefix += mags[j];
        const double candidate = (prefix - budget) / static_cast<double>(j + 1);
        if (mags[j] - candidate > 0.0) theta = candidate;
    }
    for (double& c : v) {
        const double mag = std::max(std::abs(c) - theta, 0.0);
        c = std::copysign(mag, c);
    }
    return {std::vector<double>(v.begin() + 1, v.end()), v.front()};
}

std::pair<std::vector<double>, double> project_second_layer(std::span<const double> weights,
                                                            double bias, double budget) {
    require(budget > 0.0, "project_second_layer: budget must be > 0");
    std::vector<double> w(weights.begin(), weights.end());
    for (double& c : w) c = std::clamp(c, -budget, budget);
    return {std::move(w), std::clamp(bias, -budget, budget)};
}

void project(TwoLayerParams& params) {
    check_shape(params);
    if (params.budget == 0.0) {
        params = TwoLayerParams::zeros(params.input_dim, params.width, 0.0);
        return;
    }
    for (std::size_t u = 0; u < params.width; ++u) {
        auto [w, b] = project_first_layer(params.unit_weights(u), params.first_bias[u], params.budget);
        std::copy(w.begin(), w.end(), params.unit_weights(u).begin());
        params.first_bias[u] = b;
    }
    auto [w2, b2] = project_second_layer(params.second_weights, params.second_bias, params.budget);
    params.second_weights = std::move(w2);
    params.second_bias = b2;
}

TwoLayerParams random_feasible(const ClassSpec& spec, double scale, CounterRng& rng) {
    TwoLayerParams p = TwoLayerParams::zeros(spec.input_dim, spec.width, spec.budget);
    const double r = scale * spec.budget;
    for (double& c : p.first_weights) c = rng.uniform(-r, r);
    for (double& c : p.first_bias) c = rng.uniform(-r, r);
    for (double& c : p.second_weights) c = rng.uniform(-r, r);
    p.second_bias = rng.uniform(-r, r);
    project(p);
    return p;
}

// -------------------------------------------------------------- batched forms

SampleBatch::SampleBatch(const Matrix& rows)
    : count_(rows.rows()), dim_(rows.cols()), data_(rows.rows() * rows.cols()), rows_(rows) {
    for (std::size_t s = 0; s < count_; ++s)
        for (std::size_t i = 0; i < dim_; ++i) data_[i * count_ + s] = rows(s, i);
}

void forward(const TwoLayerParams& params, Activation act, const SampleBatch& batch,
             ForwardCache& cache, bool with_slopes, const kernels::KernelTable& k) {
    check_shape(params);
    require(batch.dim() == params.input_dim, "forward: batch dimension mismatch");
    const std::size_t n = batch.size();
    cache.unit_values.resize(params.width * n);
    if (with_slopes)
        cache.unit_slopes.resize(params.width * n);
    else
        cache.unit_slopes.clear();
    cache.output.assign(n, params.second_bias);
    const double* xt = batch.feature(0);
    for (std::size_t u = 0; u < params.width; ++u) {
        double* values = cache.unit_values.data() + u * n;
        double* slopes = with_slopes ? cache.unit_slopes.data() + u * n : nullptr;
        k.unit_forward(params.first_weights.data() + u * params.input_dim, params.input_dim,
                       params.first_bias[u], xt, n, n, act, values, slopes);
        k.accumulate_scaled(params.second_weights[u], values, cache.output.data(), n);
    }
}

std::vector<double> eval_batch(const TwoLayerParams& params, Activation act,
                               const SampleBatch& batch, const kernels::KernelTable& k) {
    ForwardCache cache;
    forward(params, act, batch, cache, false, k);
    return std::move(cache.output);
}

Matrix eval_generator_batch(const Generator& g, Activation act, const SampleBatch& noise,
                            const kernels::KernelTable& k) {
    Matrix out(noise.size(), g.output_dim());
    ForwardCache cache;
    for (std::size_t h = 0; h < g.output_dim(); ++h) {
        forward(g.heads[h], act, noise, cache, false, k);
        for (std::size_t s = 0; s < noise.size(); ++s) out(s, h) = cache.output[s];
    }
    return out;
}

TwoLayerParams weighted_gradient(const TwoLayerParams& params, const SampleBatch& batch,
                                 const ForwardCache& cache, std::span<const double> coeff,
                                 const kernels::KernelTable& k) {
    const std::size_t n = batch.size();
    require(coeff.size() == n, "weighted_gradient: coefficient count mismatch");
    require(cache.unit_slopes.size() == params.width * n,
            "weighted_gradient: forward cache lacks slopes");
    TwoLayerParams g = TwoLayerParams::zeros(params.input_dim, params.width, params.budget);
    std::vector<double> upstream(n);
    for (std::size_t u = 0; u < params.width; ++u) {
        const double* values = cache.unit_values.data() + u * n;
        const double* slopes = cache.unit_slopes.data() + u * n;
        g.second_weights[u] = k.dot(coeff.data(), values, n);
        for (std::size_t s = 0; s < n; ++s) upstream[s] = coeff[s] * slopes[s];
        const double w = params.second_weights[u];
        g.first_bias[u] = w * std::accumulate(upstream.begin(), upstream.end(), 0.0);
        auto gw = g.unit_weights(u);
        for (std::size_t i = 0; i < params.input_dim; ++i)
            gw[i] = w * k.dot(upstream.data(), batch.feature(i), n);
    }
    g.second_bias = std::accumulate(coeff.begin(), coeff.end(), 0.0);
    return g;
}

Matrix input_gradients(const TwoLayerParams& params, const ForwardCache& cache,
                       std::size_t count) {
    require(cache.unit_slopes.size() == params.width * count,
            "input_gradients: forward cache lacks slopes");
    Matrix g(count, params.input_dim);
    for (std::size_t u = 0; u < params.width; ++u) {
        const double* slopes = cache.unit_slopes.data() + u * count;
        const auto w = params.unit_weights(u);
        for (std::size_t s = 0; s < count; ++s) {
            const double upstream = params.second_weights[u] * slopes[s];
            if (upstream == 0.0) continue;
            for (std::size_t i = 0; i < params.input_dim; ++i) g(s, i) += upstream * w[i];
        }
    }
    return g;
}

// --------------------------------------------------------------- FiniteClass

FiniteClass::FiniteClass(const ClassSpec& spec, std::size_t grid_levels, double cap)
    : spec_(spec) {
    spec_.validate();
    require(grid_levels >= 3 && grid_levels % 2 == 1,
            "enumerate_finite_class: grid_levels must be odd and >= 3");
    half_levels_ = (grid_levels - 1) / 2;
    const int h = static_cast<int>(half_levels_);
    for (int j = -h; j <= h; ++j) grid_.push_back(spec_.budget * j / h);

    // Unit tuples (bias, w_1..w_d) as signed offsets with sum |j| <= h.
    const std::size_t coords = spec_.input_dim + 1;
    std::vector<int> tuple(coords, -h);
    while (true) {
        int l1 = 0;
        for (int j : tuple) l1 += std::abs(j);
        if (l1 <= h) unit_tuples_.push_back(tuple);
        bool done = true;
        for (std::size_t c = coords; c-- > 0;) {
            if (tuple[c] < h) {
                ++tuple[c];
                done = false;
                break;
            }
            tuple[c] = -h;
        }
        if (done) break;
    }

    const double g = static_cast<double>(grid_levels);
    const double second = std::pow(g, static_cast<double>(spec_.width + 1));
    const double first = std::pow(static_cast<double>(unit_tuples_.size()),
                                  static_cast<double>(spec_.width));
    const double total = first * second;
    if (total > cap) {
        throw CapExceeded("enumerate_finite_class: cardinality " + std::to_string(total), total,
                          cap);
    }
    second_count_ = static_cast<std::size_t>(second);
    cardinality_ = static_cast<std::size_t>(total);
}

TwoLayerParams FiniteClass::member(std::size_t k) const {
    require(k < cardinality_, "FiniteClass::member: index out of range");
    const std::size_t g = grid_.size();
    TwoLayerParams p = TwoLayerParams::zeros(spec_.input_dim, spec_.width, spec_.budget);
    std::size_t q = k % second_count_;
    std::size_t c = k / second_count_;
    const auto value = [&](int offset) { return grid_[static_cast<std::size_t>(offset) + half_levels_]; };
    for (std::size_t u = 0; u < spec_.width; ++u) {
        p.second_weights[u] = grid_[q % g];
        q /= g;
    }
    p.second_bias = grid_[q % g];
    for (std::size_t u = 0; u < spec_.width; ++u) {
        const auto& t = unit_tuples_[c % unit_tuples_.size()];
        c /= unit_tuples_.size();
        p.first_bias[u] = value(t[0]);
        auto w = p.unit_weights(u);
        for (std::size_t i = 0; i < spec_.input_dim; ++i) w[i] = value(t[i + 1]);
    }
    return p;
}

std::optional<std::size_t> FiniteClass::index_of(const TwoLayerParams& p) const {
    if (p.width != spec_.width || p.input_dim != spec_.input_dim) return std::nullopt;
    const auto grid_index = [&](double v) -> std::optional<std::size_t> {
        const auto it = std::find(grid_.begin(), grid_.end(), v);
        if (it == grid_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - grid_.begin());
    };
    const std::size_t g = grid_.size();
    std::size_t q = 0;
    std::size_t radix = 1;
    for (std::size_t u = 0; u <= spec_.width; ++u) {
        const double v = u < spec_.width ? p.second_weights[u] : p.second_bias;
        const auto idx = grid_index(v);
        if (!idx) return std::nullopt;
        q += *idx * radix;
        radix *= g;
    }
    std::size_t c = 0;
    radix = 1;
    for (std::size_t u = 0; u < spec_.width; ++u) {
        std::vector<int> t(spec_.input_dim + 1);
        for (std::size_t i = 0; i <= spec_.input_dim; ++i) {
            const double v = i == 0 ? p.first_bias[u] : p.unit_weights(u)[i - 1];
            const auto idx = grid_index(v);
            if (!idx) return std::nullopt;
            t[i] = static_cast<int>(*idx) - static_cast<int>(half_levels_);
        }
        const auto it = std::find(unit_tuples_.begin(), unit_tuples_.end(), t);
        if (it == unit_tuples_.end()) return std::nullopt;
        c += static_cast<std::size_t>(it - unit_tuples_.begin()) * radix;
        radix *= unit_tuples_.size();
    }
    return c * second_count_ + q;
}

std::vector<double> FiniteClass::member_values(const Matrix& sample) const {
    require(sample.cols() == spec_.input_dim, "FiniteClass::member_values: dimension mismatch");
    const std::size_t n = sample.rows();
    const std::size_t g = grid_.size();
    const std::size_t tuples = unit_tuples_.size();

    // Hidden-unit outputs for each feasible tuple at each sample point.
    std::vector<double> unit(tuples * n);
    std::vector<double> w(spec_.input_dim);
    for (std::size_t t = 0; t < tuples; ++t) {
        const auto& tuple = unit_tuples_[t];
        for (std::size_t i = 0; i < spec_.input_dim; ++i)
            w[i] = grid_[static_cast<std::size_t>(tuple[i + 1] + static_cast<int>(half_levels_))];
        const double b = grid_[static_cast<std::size_t>(tuple[0] + static_cast<int>(half_levels_))];
        for (std::size_t s = 0; s < n; ++s) unit[t * n + s] = eval_unit(w, b, spec_.activation, sample.row(s));
    }

    std::vector<double> values(n * cardinality_);
    std::vector<std::size_t> tuple_of(spec_.width);
    std::vector<std::size_t> second_of(spec_.width + 1);
    for (std::size_t k = 0; k < cardinality_; ++k) {
        std::size_t q = k % second_count_;
        std::size_t c = k / second_count_;
        for (std::size_t u = 0; u <= spec_.width; ++u) {
            second_of[u] = q % g;
            q /= g;
        }
        for (std::size_t u = 0; u < spec_.width; ++u) {
            tuple_of[u] = c % tuples;
            c /= tuples;
        }
        for (std::size_t s = 0; s < n; ++s) {
            double v = grid_[second_of[spec_.width]];
            for (std::size_t u = 0; u < spec_.width; ++u)
                v += grid_[second_of[u]] * unit[tuple_of[u] * n + s];
            values[s * cardinality_ + k] = v;
        }
    }
    return values;
}

} // namespace genbound
