#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genbound/classes.hpp"
#include "genbound/objective.hpp"

namespace genbound {

struct OptConfig {
    double step_size = 0.1;
    std::size_t steps = 200;
    std::size_t restarts = 5;
    std::size_t inner_disc_steps = 5;
    std::uint64_t seed = 0;
    double init_scale = 1.0;

    void validate() const;
};

struct TracePoint {
    std::size_t step = 0;
    double value = 0.0;
};

// A differentiable objective over one or more parameter blocks, maximized
// by projected_ascent. evaluate() returns the value and, when grads is
// non-null, fills one gradient per block.
class AscentObjective {
public:
    virtual ~AscentObjective() = default;
    virtual double evaluate(std::span<const TwoLayerParams> blocks,
                            std::vector<TwoLayerParams>* grads) const = 0;
};

struct AscentResult {
    std::vector<TwoLayerParams> blocks;
    double value = 0.0;
    std::vector<TracePoint> trace; // accepted iterates only; non-decreasing
};

// Projected gradient ascent with step halving on rejection: a step is kept
// only if it does not decrease the objective, so the trace is monotone.
// Every iterate is projected onto its block's constraint set.
AscentResult projected_ascent(const AscentObjective& objective, std::vector<TwoLayerParams> init,
                              double step_size, std::size_t steps);

// sum_s coeff[s] * f(points_s) for a single network f.
class LinearFunctional final : public AscentObjective {
public:
    LinearFunctional(Activation act, const SampleBatch& points, std::span<const double> coeff);
    double evaluate(std::span<const TwoLayerParams> blocks,
                    std::vector<TwoLayerParams>* grads) const override;

private:
    Activation act_;
    const SampleBatch& points_;
    std::span<const double> coeff_;
};

// sum_j coeff[j] * D(G(z_j)); blocks = {D, G head 0, ..., G head d-1}.
class CompositionFunctional final : public AscentObjective {
public:
    CompositionFunctional(Activation disc_act, Activation gen_act, const SampleBatch& noise,
                          std::span<const double> coeff);
    double evaluate(std::span<const TwoLayerParams> blocks,
                    std::vector<TwoLayerParams>* grads) const override;

private:
    Activation disc_act_;
    Activation gen_act_;
    const SampleBatch& noise_;
    std::span<const double> coeff_;
};

struct MaximizeResult {
    TwoLayerParams params;
    double value = 0.0;
    std::vector<TracePoint> trace;     // best restart
    std::vector<double> restart_values; // final value of each restart, in order
};

// Best-of-restarts maximization of sum_s coeff[s] * f(points_s) over the
// class. Restart r starts from a uniform feasible draw on stream
// derive_stream(stream, r); a warm start, if given, is tried first.
MaximizeResult maximize_functional(const ClassSpec& spec, const SampleBatch& points,
                                   std::span<const double> coeff, const OptConfig& cfg,
                                   std::uint64_t stream,
                                   const std::optional<TwoLayerParams>& warm_start = std::nullopt);

// Inner max over D of the empirical objective with G fixed. Without a
// generator, z_batch rows are taken as already-generated points in the
// discriminator's input space and the regularizer is zero. The returned
// value is the objective re-evaluated at the returned discriminator.
std::pair<TwoLayerParams, double> maximize_disc(const ClassSpec& disc_spec,
                                                const Generator* fixed_gen,
                                                Activation gen_activation,
                                                const Matrix& x_batch, const Matrix& z_batch,
                                                const OptConfig& cfg, double lambda,
                                                const std::optional<TwoLayerParams>& warm_start =
                                                    std::nullopt);

struct TrainResult {
    TwoLayerParams d_hat;
    Generator g_hat;
    double value = 0.0;            // empirical objective at (d_hat, g_hat)
    std::vector<TracePoint> trace; // objective after each alternation step
};

// Alternating projected ascent on D (inner_disc_steps per round) and one
// projected descent step on G per round, then a best-of-restarts
// maximization of D against the final G. Each round D continues from the
// better of its current value and one fresh feasible draw; the G step in
// round t is step_size / sqrt(t).
TrainResult minimax_train(const ClassSpec& disc_spec, const ClassSpec& gen_spec,
                          const Matrix& x_batch, const Matrix& z_batch, double lambda,
                          const OptConfig& cfg);

} // namespace genbound
