#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace genbound {

// Precondition or dimension violation by the caller.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed external input (dataset files, config files).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A formula evaluated outside its domain (e.g. log of an empty class).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Enumeration or exact evaluation would exceed the configured work cap.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what, double cost, double cap)
        : std::runtime_error(what + " (cost " + std::to_string(cost) + " exceeds cap " +
                             std::to_string(cap) + ")"),
          cost_(cost), cap_(cap) {}

    double cost() const noexcept { return cost_; }
    double cap() const noexcept { return cap_; }

private:
    double cost_;
    double cap_;
};

// Non-finite values or failed numerical convergence.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace genbound
