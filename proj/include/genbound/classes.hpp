#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "genbound/activation.hpp"
#include "genbound/kernels.hpp"
#include "genbound/matrix.hpp"
#include "genbound/rng.hpp"

namespace genbound {

enum class Role { discriminator, generator };

// A constrained two-layer class. Discriminators have output_dim = 1; a
// generator is output_dim independent heads, each a member of the scalar
// class with the same input_dim, width, activation and budget.
//
// budget = 0 is accepted and denotes the degenerate class holding only the
// zero function.
struct ClassSpec {
    std::size_t input_dim = 1;
    std::size_t width = 1;
    Activation activation = Activation::clamp01;
    double budget = 1.0;
    std::size_t output_dim = 1;
    Role role = Role::discriminator;

    void validate() const;

    // sup-norm envelope of any member on [0,1]^input_dim: V * (width + 1).
    double envelope() const { return budget * static_cast<double>(width + 1); }

    static ClassSpec discriminator(std::size_t input_dim, std::size_t width, Activation act,
                                   double budget);
    static ClassSpec generator(std::size_t noise_dim, std::size_t output_dim, std::size_t width,
                               Activation act, double budget);
};

// Weights of one scalar two-layer network
//   f(x) = sum_u second_weights[u] * s(first_weights[u] . x + first_bias[u]) + second_bias
// with |first_bias[u]| + ||first_weights[u]||_1 <= budget per unit and every
// second-layer coefficient in [-budget, budget].
//
// The same shape is used for gradients (budget is then ignored).
struct TwoLayerParams {
    std::size_t input_dim = 0;
    std::size_t width = 0;
    std::vector<double> first_weights; // width x input_dim, row-major
    std::vector<double> first_bias;    // width
    std::vector<double> second_weights; // width
    double second_bias = 0.0;
    double budget = 1.0;

    static TwoLayerParams zeros(std::size_t input_dim, std::size_t width, double budget);

    std::span<const double> unit_weights(std::size_t u) const {
        return {first_weights.data() + u * input_dim, input_dim};
    }
    std::span<double> unit_weights(std::size_t u) {
        return {first_weights.data() + u * input_dim, input_dim};
    }

    std::size_t parameter_count() const { return width * (input_dim + 2) + 1; }

    // Flat order: first_weights, first_bias, second_weights, second_bias.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);

    // this += alpha * other, all coefficients.
    void add_scaled(double alpha, const TwoLayerParams& other);

    // Second layer negated: the member -f.
    TwoLayerParams negated() const;

    // Budget constraints hold up to a relative slack of tol.
    bool feasible(double tol = 1e-12) const;

    bool all_finite() const;

    friend bool operator==(const TwoLayerParams&, const TwoLayerParams&) = default;
};

// d_x independent heads sharing one ClassSpec.
struct Generator {
    std::vector<TwoLayerParams> heads;

    std::size_t output_dim() const { return heads.size(); }
    std::size_t input_dim() const { return heads.empty() ? 0 : heads.front().input_dim; }

    static Generator zeros(const ClassSpec& spec);
};

// ---------------------------------------------------------------- pointwise

double eval_unit(std::span<const double> weights, double bias, Activation act,
                 std::span<const double> x);

double eval_network(const TwoLayerParams& params, Activation act, std::span<const double> x);

std::vector<double> eval_generator(const Generator& g, Activation act, std::span<const double> z);

// Gradient of f(x) with respect to every coefficient. At clamp01 kinks the
// right-derivative is used.
TwoLayerParams grad_params(const TwoLayerParams& params, Activation act,
                           std::span<const double> x);

// Gradient of f(x) with respect to x.
std::vector<double> grad_input(const TwoLayerParams& params, Activation act,
                               std::span<const double> x);

// -------------------------------------------------------------- projections

// Euclidean projection of (bias, weights) onto the l1 ball of radius V.
std::pair<std::vector<double>, double> project_first_layer(std::span<const double> weights,
                                                           double bias, double budget);

// Coordinate-wise clamp of (weights, bias) to [-V, V].
std::pair<std::vector<double>, double> project_second_layer(std::span<const double> weights,
                                                            double bias, double budget);

// Projects every unit and the second layer in place. budget = 0 zeroes all
// coefficients.
void project(TwoLayerParams& params);

// Uniform draw in [-scale*V, scale*V] per coefficient, then projected.
TwoLayerParams random_feasible(const ClassSpec& spec, double scale, CounterRng& rng);

// ------------------------------------------------------------ batched forms

// A sample batch stored feature-major for the kernels.
class SampleBatch {
public:
    SampleBatch() = default;
    explicit SampleBatch(const Matrix& rows);

    std::size_t size() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }
    const double* feature(std::size_t i) const { return data_.data() + i * count_; }
    double at(std::size_t s, std::size_t i) const { return data_[i * count_ + s]; }
    const Matrix& rows() const noexcept { return rows_; }

private:
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
    Matrix rows_;
};

// Per-unit activations over a batch, reused by value and gradient passes.
struct ForwardCache {
    std::vector<double> unit_values; // width x n
    std::vector<double> unit_slopes; // width x n (empty unless requested)
    std::vector<double> output;      // n
};

void forward(const TwoLayerParams& params, Activation act, const SampleBatch& batch,
             ForwardCache& cache, bool with_slopes,
             const kernels::KernelTable& k = kernels::active());

std::vector<double> eval_batch(const TwoLayerParams& params, Activation act,
                               const SampleBatch& batch,
                               const kernels::KernelTable& k = kernels::active());

// Generator images, one row per noise point.
Matrix eval_generator_batch(const Generator& g, Activation act, const SampleBatch& noise,
                            const kernels::KernelTable& k = kernels::active());

// Gradient of sum_s coeff[s] * f(x_s); cache must hold slopes.
TwoLayerParams weighted_gradient(const TwoLayerParams& params, const SampleBatch& batch,
                                 const ForwardCache& cache, std::span<const double> coeff,
                                 const kernels::KernelTable& k = kernels::active());

// Row s: gradient of f at x_s with respect to x_s; cache must hold slopes.
Matrix input_gradients(const TwoLayerParams& params, const ForwardCache& cache,
                       std::size_t count);

// ------------------------------------------------------------ finite class

// Every parameter tuple on the uniform grid {V*j/h : j = -h..h}, h =
// (grid_levels-1)/2, per coordinate, filtered to l1 feasibility per unit.
// Members are indexed lazily in a fixed mixed-radix order: the second layer
// varies fastest, then unit 0's first-layer tuple, unit 1's, and so on.
class FiniteClass {
public:
    static constexpr double kDefaultCap = 1e6;

    FiniteClass(const ClassSpec& spec, std::size_t grid_levels, double cap = kDefaultCap);

    std::size_t cardinality() const noexcept { return cardinality_; }
    std::size_t size() const noexcept { return cardinality_; }
    const ClassSpec& spec() const noexcept { return spec_; }
    std::size_t grid_levels() const noexcept { return grid_.size(); }
    const std::vector<double>& grid() const noexcept { return grid_; }

    // Feasible (bias, weights...) tuples for one hidden unit, as grid indices.
    std::size_t unit_tuple_count() const noexcept { return unit_tuples_.size(); }

    TwoLayerParams member(std::size_t k) const;
    std::optional<std::size_t> index_of(const TwoLayerParams& p) const;

    // values[i * cardinality + k] = member(k) evaluated at sample row i.
    std::vector<double> member_values(const Matrix& sample) const;

private:
    ClassSpec spec_;
    std::vector<double> grid_;
    std::size_t half_levels_ = 0;
    std::vector<std::vector<int>> unit_tuples_; // signed grid offsets, bias first
    std::size_t second_count_ = 0;
    std::size_t cardinality_ = 0;
};

inline FiniteClass enumerate_finite_class(const ClassSpec& spec, std::size_t grid_levels,
                                          double cap = FiniteClass::kDefaultCap) {
    return FiniteClass(spec, grid_levels, cap);
}

} // namespace genbound
