#include "genbound/optim.hpp"

#include <cmath>
#include <string>

namespace genbound {

void OptConfig::validate() const {
    if (!(step_size > 0.0)) throw ContractError("OptConfig: step_size must be > 0");
    if (steps < 1) throw ContractError("OptConfig: steps must be >= 1");
    if (restarts < 1) throw ContractError("OptConfig: restarts must be >= 1");
    if (inner_disc_steps < 1) throw ContractError("OptConfig: inner_disc_steps must be >= 1");
    if (!(init_scale > 0.0 && init_scale <= 1.0))
        throw ContractError("OptConfig: init_scale must be in (0, 1]");
}

// ----------------------------------------------------------- projected_ascent

AscentResult projected_ascent(const AscentObjective& objective, std::vector<TwoLayerParams> init,
                              double step_size, std::size_t steps) {
    for (auto& b : init) project(b);
    AscentResult r;
    r.blocks = std::move(init);
    std::vector<TwoLayerParams> grads;
    r.value = objective.evaluate(r.blocks, &grads);
    r.trace.push_back({0, r.value});

    // Step sizes below this cannot move any coefficient of a budget-1 class.
    const double min_step = step_size * 1e-12;
    double eta = step_size;
    std::vector<TwoLayerParams> candidate;
    std::vector<TwoLayerParams> candidate_grads;
    for (std::size_t step = 1; step <= steps && eta >= min_step; ++step) {
        for (const auto& g : grads) {
            if (!g.all_finite())
                throw NumericalError("projected_ascent: non-finite gradient at step " +
                                     std::to_string(step));
        }
        candidate = r.blocks;
        for (std::size_t b = 0; b < candidate.size(); ++b) {
            candidate[b].add_scaled(eta, grads[b]);
            project(candidate[b]);
        }
        const double value = objective.evaluate(candidate, &candidate_grads);
        if (!std::isfinite(value))
            throw NumericalError("projected_ascent: non-finite objective at step " +
                                 std::to_string(step));
        if (value >= r.value) {
            r.blocks.swap(candidate);
            grads.swap(candidate_grads);
            r.value = value;
            r.trace.push_back({step, value});
            eta = std::min(eta * 1.5, step_size);
        } else {
            eta *= 0.5;
        }
    }
    return r;
}

// ------------------------------------------------------------ LinearFunctional

LinearFunctional::LinearFunctional(Activation act, const SampleBatch& points,
                                   std::span<const double> coeff)
    : act_(act), points_(points), coeff_(coeff) {
    if (coeff.size() != points.size())
        throw ContractError("LinearFunctional: one coefficient per point required");
}

double LinearFunctional::evaluate(std::span<const TwoLayerParams> blocks,
                                  std::vector<TwoLayerParams>* grads) const {
    const auto& k = kernels::active();
    ForwardCache cache;
    forward(blocks[0], act_, points_, cache, grads != nullptr, k);
    const double value = k.dot(coeff_.data(), cache.output.data(), points_.size());
    if (grads) {
        grads->resize(1);
        (*grads)[0] = weighted_gradient(blocks[0], points_, cache, coeff_, k);
    }
    return value;
}

// ------------------------------------------------------- CompositionFunctional

CompositionFunctional::CompositionFunctional(Activation disc_act, Activation gen_act,
                                             const SampleBatch& noise,
                                             std::span<const double> coeff)
    : disc_act_(disc_act), gen_act_(gen_act), noise_(noise), coeff_(coeff) {
    if (coeff.size() != noise.size())
        throw ContractError("CompositionFunctional: one coefficient per point required");
}

double CompositionFunctional::evaluate(std::span<const TwoLayerParams> blocks,
                                       std::vector<TwoLayerParams>* grads) const {
    const auto& k = kernels::active();
    const TwoLayerParams& disc = blocks[0];
    const std::size_t heads = blocks.size() - 1;
    if (heads != disc.input_dim)
        throw ContractError("CompositionFunctional: generator heads must match disc input_dim");
    const std::size_t m = noise_.size();

    std::vector<ForwardCache> head_cache(heads);
    Matrix images(m, heads);
    for (std::size_t h = 0; h < heads; ++h) {
        forward(blocks[h + 1], gen_act_, noise_, head_cache[h], grads != nullptr, k);
        for (std::size_t j = 0; j < m; ++j) images(j, h) = head_cache[h].output[j];
    }
    const SampleBatch image_batch(images);
    ForwardCache disc_cache;
    forward(disc, disc_act_, image_batch, disc_cache, grads != nullptr, k);
    const double value = k.dot(coeff_.data(), disc_cache.output.data(), m);
    if (grads) {
        grads->resize(blocks.size());
        (*grads)[0] = weighted_gradient(disc, image_batch, disc_cache, coeff_, k);
        const Matrix dx = input_gradients(disc, disc_cache, m);
        std::vector<double> head_coeff(m);
        for (std::size_t h = 0; h < heads; ++h) {
            for (std::size_t j = 0; j < m; ++j) head_coeff[j] = coeff_[j] * dx(j, h);
            (*grads)[h + 1] = weighted_gradient(blocks[h + 1], noise_, head_cache[h], head_coeff, k);
        }
    }
    return value;
}

// ------------------------------------------------------------- maximization

MaximizeResult maximize_functional(const ClassSpec& spec, const SampleBatch& points,
                                   std::span<const double> coeff, const OptConfig& cfg,
                                   std::uint64_t stream,
                                   const std::optional<TwoLayerParams>& warm_start) {
    cfg.validate();
    if (points.dim() != spec.input_dim)
        throw ContractError("maximize_functional: points do not match class input_dim");
    const LinearFunctional objective(spec.activation, points, coeff);

    MaximizeResult best;
    bool have_best = false;
    const auto consider = [&](AscentResult r) {
        best.restart_values.push_back(r.value);
        if (!have_best || r.value > best.value) {
            best.params = std::move(r.blocks[0]);
            best.value = r.value;
            best.trace = std::move(r.trace);
            have_best = true;
        }
    };
    if (warm_start) {
        consider(projected_ascent(objective, {*warm_start}, cfg.step_size, cfg.steps));
    }
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        CounterRng rng(cfg.seed, derive_stream(stream, r));
        consider(projected_ascent(objective, {random_feasible(spec, cfg.init_scale, rng)},
                                  cfg.step_size, cfg.steps));
    }
    return best;
}

namespace {

// Points and coefficients of the D-dependent part of the empirical
// objective: +1/n at each x_i, -1/m at each generated point.
struct DiscProblem {
    Matrix points;
    std::vector<double> coeff;
    double constant = 0.0; // -lambda * mean generator output
};

DiscProblem disc_problem(const Matrix& x_batch, const Matrix& generated, double output_term,
                         double lambda) {
    if (x_batch.empty() || generated.empty())
        throw ContractError("maximize_disc: empty batch");
    if (x_batch.cols() != generated.cols())
        throw ContractError("maximize_disc: generated points do not match x dimension");
    const std::size_t n = x_batch.rows();
    const std::size_t m = generated.rows();
    DiscProblem p;
    p.points = Matrix(n + m, x_batch.cols());
    p.coeff.resize(n + m);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(x_batch.row(i).begin(), x_batch.row(i).end(), p.points.row(i).begin());
        p.coeff[i] = 1.0 / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < m; ++j) {
        std::copy(generated.row(j).begin(), generated.row(j).end(), p.points.row(n + j).begin());
        p.coeff[n + j] = -1.0 / static_cast<double>(m);
    }
    p.constant = -lambda * output_term;
    return p;
}

double mean_output(const Matrix& images) {
    double acc = 0.0;
    for (std::size_t j = 0; j < images.rows(); ++j) {
        double row = 0.0;
        for (double v : images.row(j)) row += v;
        acc += row / static_cast<double>(images.cols());
    }
    return acc / static_cast<double>(images.rows());
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

} // namespace

std::pair<TwoLayerParams, double> maximize_disc(const ClassSpec& disc_spec,
                                                const Generator* fixed_gen,
                                                Activation gen_activation,
                                                const Matrix& x_batch, const Matrix& z_batch,
                                                const OptConfig& cfg, double lambda,
                                                const std::optional<TwoLayerParams>& warm_start) {
    Matrix generated;
    double output_term = 0.0;
    if (fixed_gen) {
        if (fixed_gen->output_dim() != disc_spec.input_dim)
            throw ContractError("maximize_disc: generator output_dim does not match disc input_dim");
        generated = eval_generator_batch(*fixed_gen, gen_activation, SampleBatch(z_batch));
        output_term = mean_output(generated);
    } else {
        generated = z_batch;
    }
    const DiscProblem problem = disc_problem(x_batch, generated, output_term, lambda);
    const SampleBatch points(problem.points);
    const MaximizeResult r = maximize_functional(disc_spec, points, problem.coeff, cfg,
                                                 derive_stream("maximize_disc", cfg.seed), warm_start);

    // Re-evaluate as real - fake - lambda * output so the value matches the
    // objective evaluators exactly.
    const double real = mean_of(eval_batch(r.params, disc_spec.activation, SampleBatch(x_batch)));
    const double fake = mean_of(eval_batch(r.params, disc_spec.activation, SampleBatch(generated)));
    return {r.params, real - fake + problem.constant};
}

// ------------------------------------------------------------------ minimax

TrainResult minimax_train(const ClassSpec& disc_spec, const ClassSpec& gen_spec,
                          const Matrix& x_batch, const Matrix& z_batch, double lambda,
                          const OptConfig& cfg) {
    cfg.validate();
    disc_spec.validate();
    gen_spec.validate();
    if (gen_spec.output_dim != disc_spec.input_dim)
        throw ContractError("minimax_train: generator output_dim must equal disc input_dim");
    if (x_batch.empty() || z_batch.empty()) throw ContractError("minimax_train: empty batch");
    if (x_batch.cols() != disc_spec.input_dim || z_batch.cols() != gen_spec.input_dim)
        throw ContractError("minimax_train: batch dimensions do not match class specs");

    const auto& k = kernels::active();
    const std::size_t m = z_batch.rows();
    const std::size_t heads = gen_spec.output_dim;
    const SampleBatch noise(z_batch);

    CounterRng init_rng(cfg.seed, derive_stream("minimax.init", 0));
    TwoLayerParams disc = random_feasible(disc_spec, cfg.init_scale, init_rng);
    Generator gen;
    for (std::size_t h = 0; h < heads; ++h)
        gen.heads.push_back(random_feasible(gen_spec, cfg.init_scale, init_rng));

    const auto objective_value = [&](const TwoLayerParams& d, const Generator& g) {
        return inner_value_empirical_full({d, disc_spec.activation, g, gen_spec.activation}, lambda,
                                          x_batch, z_batch);
    };

    TrainResult result;
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        // Discriminator: a few monotone ascent steps against the current G.
        {
            const Matrix generated = eval_generator_batch(gen, gen_spec.activation, noise, k);
            const DiscProblem problem = disc_problem(x_batch, generated, 0.0, lambda);
            const SampleBatch points(problem.points);
            const LinearFunctional f(disc_spec.activation, points, problem.coeff);
            auto warm = projected_ascent(f, {disc}, cfg.step_size, cfg.inner_disc_steps);
            // clamp01 discriminators can stall where every slope is zero, which
            // also freezes G; a fresh draw each round gets them out.
            CounterRng fresh_rng(cfg.seed, derive_stream("minimax.fresh", step));
            auto fresh = projected_ascent(f, {random_feasible(disc_spec, cfg.init_scale, fresh_rng)},
                                          cfg.step_size, cfg.inner_disc_steps);
            disc = std::move(fresh.value > warm.value ? fresh.blocks[0] : warm.blocks[0]);
        }
        // Generator: one projected descent step on the empirical objective.
        {
            std::vector<ForwardCache> head_cache(heads);
            Matrix images(m, heads);
            for (std::size_t h = 0; h < heads; ++h) {
                forward(gen.heads[h], gen_spec.activation, noise, head_cache[h], true, k);
                for (std::size_t j = 0; j < m; ++j) images(j, h) = head_cache[h].output[j];
            }
            ForwardCache disc_cache;
            forward(disc, disc_spec.activation, SampleBatch(images), disc_cache, true, k);
            const Matrix dx = input_gradients(disc, disc_cache, m);
            std::vector<double> coeff(m);
            const double reg = lambda / static_cast<double>(heads);
            const double g_step = cfg.step_size / std::sqrt(static_cast<double>(step));
            for (std::size_t h = 0; h < heads; ++h) {
                // d(objective)/d(G_h(z_j)) = -(1/m) (dD/dx_h + lambda / d_x)
                for (std::size_t j = 0; j < m; ++j)
                    coeff[j] = -(dx(j, h) + reg) / static_cast<double>(m);
                const TwoLayerParams g =
                    weighted_gradient(gen.heads[h], noise, head_cache[h], coeff, k);
                if (!g.all_finite())
                    throw NumericalError("minimax_train: non-finite generator gradient at step " +
                                         std::to_string(step));
                gen.heads[h].add_scaled(-g_step, g);
                project(gen.heads[h]);
            }
        }
        result.trace.push_back({step, objective_value(disc, gen)});
    }

    auto [d_hat, value] = maximize_disc(disc_spec, &gen, gen_spec.activation, x_batch, z_batch,
                                        cfg, lambda, disc);
    result.d_hat = std::move(d_hat);
    result.g_hat = std::move(gen);
    result.value = objective_value(result.d_hat, result.g_hat);
    return result;
}

} // namespace genbound
