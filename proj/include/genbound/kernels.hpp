#pragma once

#include <cstddef>
#include <string_view>

#include "genbound/activation.hpp"

namespace genbound::kernels {

// Inner loops shared by network evaluation, the optimizers and exact
// Rademacher enumeration. Each ISA provides the same table; the scalar
// table is the reference the SIMD tables are tested against.
//
// Sample batches are passed feature-major ("transposed"): feature i of
// sample s lives at xt[i * ld + s]. That keeps every loop contiguous in s.
enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    std::string_view name;

    // value[s] = act(bias + sum_i w[i] * xt[i*ld + s]) for s in [0, n).
    // slope (may be null) receives the activation right-derivative.
    // The feature sum runs in increasing i for every lane, so SIMD and
    // scalar results are bit-identical.
    void (*unit_forward)(const double* w, std::size_t dim, double bias, const double* xt,
                         std::size_t ld, std::size_t n, Activation act, double* value,
                         double* slope);

    // out[s] += alpha * a[s]. Bit-identical across ISAs.
    void (*accumulate_scaled)(double alpha, const double* a, double* out, std::size_t n);

    // sum_s a[s] * b[s]. Lane-parallel accumulation: SIMD results agree with
    // scalar to rounding, not bit-for-bit.
    double (*dot)(const double* a, const double* b, std::size_t n);

    // max over k in [0, count) of sum_i sign[i] * values[i*count + k].
    // Bit-identical across ISAs.
    double (*max_signed_sum)(const double* values, std::size_t rows, std::size_t count,
                             const double* sign);
};

const KernelTable& scalar_table();

// nullptr when the ISA was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

bool cpu_supports(Isa isa);

// Best table for this CPU, chosen once on first use.
const KernelTable& active();

std::string_view to_string(Isa isa);

} // namespace genbound::kernels
