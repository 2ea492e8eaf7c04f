#include "genbound/kernels.hpp"
#include "kernels_internal.hpp"

namespace genbound::kernels {

bool cpu_supports(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Isa isa) {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
    case Isa::scalar:
        return &scalar_table();
    case Isa::avx2:
        return detail::avx2_table();
    }
    return nullptr;
}

const KernelTable& active() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        if (const KernelTable* t = table_for(Isa::avx2)) return *t;
        return scalar_table();
    }();
    return chosen;
}

std::string_view to_string(Isa isa) { return isa == Isa::scalar ? "scalar" : "avx2"; }

} // namespace genbound::kernels
