#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace genbound {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to turn purpose tags into stream ids.
constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derive a child stream id from a parent id and an index.
constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_stream(std::string_view tag, std::uint64_t index) noexcept {
    return derive_stream(hash_tag(tag), index);
}

// Counter-based generator: the k-th output of stream (seed, stream_id) is a
// pure function of (seed, stream_id, k), so any stream can be reproduced
// independently of every other stream and of scheduling order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(mix64(seed) ^ mix64(~stream_id ^ 0xd1b54a32d192ed03ULL)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t k = counter_++;
        return mix64(mix64(key_ + k * 0x9e3779b97f4a7c15ULL) ^ key_);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // +1 or -1 with probability 1/2 each.
    double sign() noexcept { return ((*this)() >> 63) ? 1.0 : -1.0; }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace genbound
