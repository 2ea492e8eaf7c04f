#include "genbound/dist.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "genbound/rng.hpp"

namespace genbound {

SourceSpec SourceSpec::uniform(std::size_t dim, std::uint64_t seed) {
    SourceSpec s;
    s.kind = SourceKind::uniform_cube;
    s.dim = dim;
    s.seed = seed;
    return s;
}

SourceSpec SourceSpec::beta_product(std::size_t dim, double alpha, double beta,
                                    std::uint64_t seed) {
    SourceSpec s;
    s.kind = SourceKind::independent_beta;
    s.dim = dim;
    s.alpha = alpha;
    s.beta = beta;
    s.seed = seed;
    return s;
}

SourceSpec SourceSpec::dataset(std::string path, std::size_t dim, std::uint64_t seed) {
    SourceSpec s;
    s.kind = SourceKind::fixed_dataset;
    s.dim = dim;
    s.path = std::move(path);
    s.seed = seed;
    return s;
}

Matrix load_dataset(const std::string& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw InputError("dataset '" + path + "': cannot open file");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::size_t count = 0;
        std::string token;
        while (fields >> token) {
            double v = 0.0;
            try {
                std::size_t used = 0;
                v = std::stod(token, &used);
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw InputError("dataset '" + path + "' line " + std::to_string(line_no) +
                                 ": '" + token + "' is not a real number");
            }
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InputError("dataset '" + path + "' line " + std::to_string(line_no) +
                                 ": value " + token + " outside [0,1]");
            }
            values.push_back(v);
            ++count;
        }
        if (count != dim) {
            throw InputError("dataset '" + path + "' line " + std::to_string(line_no) +
                             ": expected " + std::to_string(dim) + " values, found " +
                             std::to_string(count));
        }
    }
    if (values.empty()) throw InputError("dataset '" + path + "': no data points");
    const std::size_t rows = values.size() / dim;
    return Matrix(rows, dim, std::move(values));
}

Matrix sample(const SourceSpec& spec, std::size_t count, std::uint64_t stream_id) {
    if (count == 0) throw ContractError("sample: count must be >= 1");
    if (spec.dim == 0) throw ContractError("sample: dim must be >= 1");
    CounterRng rng(spec.seed, stream_id);
    Matrix out(count, spec.dim);
    switch (spec.kind) {
    case SourceKind::uniform_cube:
        for (double& v : out.data()) v = rng.uniform();
        break;
    case SourceKind::independent_beta: {
        if (!(spec.alpha > 0.0 && spec.beta > 0.0))
            throw ContractError("sample: beta parameters must be positive");
        std::gamma_distribution<double> ga(spec.alpha, 1.0);
        std::gamma_distribution<double> gb(spec.beta, 1.0);
        for (double& v : out.data()) {
            const double a = ga(rng);
            const double b = gb(rng);
            v = (a + b) > 0.0 ? a / (a + b) : 0.5;
        }
        break;
    }
    case SourceKind::fixed_dataset: {
        const Matrix data = load_dataset(spec.path, spec.dim);
        std::uniform_int_distribution<std::size_t> pick(0, data.rows() - 1);
        for (std::size_t r = 0; r < count; ++r) {
            const auto src = data.row(pick(rng));
            std::copy(src.begin(), src.end(), out.row(r).begin());
        }
        break;
    }
    }
    return out;
}

std::string to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::uniform_cube:
        return "uniform_cube";
    case SourceKind::independent_beta:
        return "independent_beta";
    case SourceKind::fixed_dataset:
        return "fixed_dataset";
    }
    return "unknown";
}

SourceKind parse_source_kind(const std::string& s) {
    if (s == "uniform_cube") return SourceKind::uniform_cube;
    if (s == "independent_beta") return SourceKind::independent_beta;
    if (s == "fixed_dataset") return SourceKind::fixed_dataset;
    throw ContractError("unknown source kind '" + s + "'");
}

} // namespace genbound
