#include <limits>

#include "genbound/kernels.hpp"
#include "kernels_internal.hpp"

namespace genbound::kernels {
namespace {

void unit_forward_scalar(const double* w, std::size_t dim, double bias, const double* xt,
                         std::size_t ld, std::size_t n, Activation act, double* value,
                         double* slope) {
    for (std::size_t s = 0; s < n; ++s) {
        double pre = bias;
        for (std::size_t i = 0; i < dim; ++i) pre += w[i] * xt[i * ld + s];
        value[s] = activate(act, pre);
        if (slope) slope[s] = activate_slope(act, pre);
    }
}

void accumulate_scaled_scalar(double alpha, const double* a, double* out, std::size_t n) {
    for (std::size_t s = 0; s < n; ++s) out[s] += alpha * a[s];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) acc += a[s] * b[s];
    return acc;
}

double max_signed_sum_scalar(const double* values, std::size_t rows, std::size_t count,
                             const double* sign) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i) acc += sign[i] * values[i * count + k];
        if (acc > best) best = acc;
    }
    return best;
}

constexpr KernelTable kScalar{
    Isa::scalar,         "scalar",           &unit_forward_scalar, &accumulate_scaled_scalar,
    &dot_scalar,         &max_signed_sum_scalar,
};

} // namespace

const KernelTable& scalar_table() { return kScalar; }

} // namespace genbound::kernels
