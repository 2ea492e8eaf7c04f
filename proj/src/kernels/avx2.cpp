// Compiled with -mavx2 (no FMA: fused multiply-add would change rounding
// relative to the scalar reference).
#include "kernels_internal.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace genbound::kernels {
namespace {

// Local copies of the activation formulas: calling the shared inline
// versions from this translation unit would let the linker keep an
// AVX2-compiled body for callers on CPUs without AVX2.
double logistic_value(double pre) { return 1.0 / (1.0 + std::exp(-pre)); }

double clamp_value(double pre) { return pre < 0.0 ? 0.0 : (pre > 1.0 ? 1.0 : pre); }

void unit_forward_avx2(const double* w, std::size_t dim, double bias, const double* xt,
                       std::size_t ld, std::size_t n, Activation act, double* value,
                       double* slope) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t s = 0;
    for (; s + 4 <= n; s += 4) {
        __m256d pre = _mm256_set1_pd(bias);
        for (std::size_t i = 0; i < dim; ++i) {
            const __m256d x = _mm256_loadu_pd(xt + i * ld + s);
            pre = _mm256_add_pd(pre, _mm256_mul_pd(_mm256_set1_pd(w[i]), x));
        }
        if (act == Activation::clamp01) {
            _mm256_storeu_pd(value + s, _mm256_min_pd(_mm256_max_pd(pre, zero), one));
            if (slope) {
                const __m256d ge0 = _mm256_cmp_pd(pre, zero, _CMP_GE_OQ);
                const __m256d lt1 = _mm256_cmp_pd(pre, one, _CMP_LT_OQ);
                _mm256_storeu_pd(slope + s, _mm256_and_pd(_mm256_and_pd(ge0, lt1), one));
            }
        } else {
            alignas(32) double lanes[4];
            _mm256_store_pd(lanes, pre);
            for (int l = 0; l < 4; ++l) {
                const double v = logistic_value(lanes[l]);
                value[s + l] = v;
                if (slope) slope[s + l] = v * (1.0 - v);
            }
        }
    }
    for (; s < n; ++s) {
        double pre = bias;
        for (std::size_t i = 0; i < dim; ++i) pre += w[i] * xt[i * ld + s];
        if (act == Activation::clamp01) {
            value[s] = clamp_value(pre);
            if (slope) slope[s] = (pre >= 0.0 && pre < 1.0) ? 1.0 : 0.0;
        } else {
            const double v = logistic_value(pre);
            value[s] = v;
            if (slope) slope[s] = v * (1.0 - v);
        }
    }
}

void accumulate_scaled_avx2(double alpha, const double* a, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t s = 0;
    for (; s + 4 <= n; s += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(a + s));
        _mm256_storeu_pd(out + s, _mm256_add_pd(_mm256_loadu_pd(out + s), prod));
    }
    for (; s < n; ++s) out[s] += alpha * a[s];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t s = 0;
    for (; s + 4 <= n; s += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + s), _mm256_loadu_pd(b + s)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; s < n; ++s) total += a[s] * b[s];
    return total;
}

double max_signed_sum_avx2(const double* values, std::size_t rows, std::size_t count,
                           const double* sign) {
    __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t i = 0; i < rows; ++i) {
            const __m256d v = _mm256_loadu_pd(values + i * count + k);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(sign[i]), v));
        }
        best = _mm256_max_pd(best, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double result = lanes[0];
    for (int l = 1; l < 4; ++l)
        if (lanes[l] > result) result = lanes[l];
    for (; k < count; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i) acc += sign[i] * values[i * count + k];
        if (acc > result) result = acc;
    }
    return result;
}

constexpr KernelTable kAvx2{
    Isa::avx2, "avx2", &unit_forward_avx2, &accumulate_scaled_avx2, &dot_avx2,
    &max_signed_sum_avx2,
};

} // namespace

const KernelTable* detail::avx2_table() { return &kAvx2; }

} // namespace genbound::kernels

#else

namespace genbound::kernels {
const KernelTable* detail::avx2_table() { return nullptr; }
} // namespace genbound::kernels

#endif
