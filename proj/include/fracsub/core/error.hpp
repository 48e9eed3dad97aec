#pragma once

#include <stdexcept>
#include <string>

namespace fracsub {

// Parameter outside its admissible range (maps to CLI exit code 2).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quadrature or truncation did not reach its accuracy target
// (maps to CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved_error, std::string context = {})
        : std::runtime_error(what), achieved_error_(achieved_error), context_(std::move(context)) {}

    double achieved_error() const noexcept { return achieved_error_; }
    const std::string& context() const noexcept { return context_; }

private:
    double achieved_error_;
    std::string context_;
};

// A law collapsed to a point mass (beta = 1 directing density, beta = 1
// extremal density); callers are expected to special-case it.
class DegenerateLaw : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool condition, const char* message) {
    if (!condition) throw InvalidParameter(message);
}

} // namespace detail
} // namespace fracsub
