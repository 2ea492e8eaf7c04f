#pragma once

#include "genbound/kernels.hpp"

namespace genbound::kernels::detail {

// Defined in avx2.cpp; nullptr when built for a non-x86 target.
const KernelTable* avx2_table();

} // namespace genbound::kernels::detail
