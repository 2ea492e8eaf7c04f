#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "genbound/errors.hpp"

namespace genbound {

// Hidden-unit nonlinearity. Both map into [0,1], are non-decreasing and
// 1-Lipschitz (logistic is 1/4-Lipschitz).
enum class Activation { clamp01, logistic };

inline double activate(Activation a, double pre) {
    switch (a) {
    case Activation::clamp01:
        return pre < 0.0 ? 0.0 : (pre > 1.0 ? 1.0 : pre);
    case Activation::logistic:
        return 1.0 / (1.0 + std::exp(-pre));
    }
    return 0.0;
}

// Right-derivative: clamp01 reports 1 at pre = 0 and 0 at pre = 1.
inline double activate_slope(Activation a, double pre) {
    switch (a) {
    case Activation::clamp01:
        return (pre >= 0.0 && pre < 1.0) ? 1.0 : 0.0;
    case Activation::logistic: {
        const double s = 1.0 / (1.0 + std::exp(-pre));
        return s * (1.0 - s);
    }
    }
    return 0.0;
}

inline double lipschitz_constant(Activation a) {
    return a == Activation::clamp01 ? 1.0 : 0.25;
}

inline std::string_view to_string(Activation a) {
    return a == Activation::clamp01 ? "clamp01" : "logistic";
}

inline Activation parse_activation(std::string_view s) {
    if (s == "clamp01") return Activation::clamp01;
    if (s == "logistic") return Activation::logistic;
    throw ContractError("unknown activation '" + std::string(s) + "'");
}

} // namespace genbound
