#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "genbound/matrix.hpp"

namespace genbound {

enum class SourceKind { uniform_cube, independent_beta, fixed_dataset };

// A seeded data source on [0,1]^dim.
struct SourceSpec {
    SourceKind kind = SourceKind::uniform_cube;
    std::size_t dim = 1;
    std::uint64_t seed = 0;
    double alpha = 2.0; // independent_beta only
    double beta = 5.0;  // independent_beta only
    std::string path;   // fixed_dataset only

    static SourceSpec uniform(std::size_t dim, std::uint64_t seed);
    static SourceSpec beta_product(std::size_t dim, double alpha, double beta, std::uint64_t seed);
    static SourceSpec dataset(std::string path, std::size_t dim, std::uint64_t seed);
};

// count i.i.d. draws (rows). Identical (spec, count, stream_id) give
// bit-identical output; distinct stream ids give independent streams.
// fixed_dataset draws rows uniformly with replacement from the file.
Matrix sample(const SourceSpec& spec, std::size_t count, std::uint64_t stream_id);

// Parse a dataset file: one point per line, whitespace-separated reals in
// [0,1], '#' comment lines and blank lines skipped.
Matrix load_dataset(const std::string& path, std::size_t dim);

std::string to_string(SourceKind kind);
SourceKind parse_source_kind(const std::string& s);

} // namespace genbound
