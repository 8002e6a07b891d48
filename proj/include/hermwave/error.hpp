#ifndef HERMWAVE_ERROR_HPP
#define HERMWAVE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hermwave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or degrees of two objects do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A function sampled at a quadrature node returned NaN or infinity.
class NonFiniteSampleError : public Error {
public:
    using Error::Error;
};

/// A coefficient fell below the positivity floor at some quadrature node.
class CoefficientError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The time integrator produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step, double time)
        : Error(what), step_(step), time_(time) {}

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    std::size_t step_;
    double time_;
};

/// Invalid or unknown configuration key.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace hermwave

#endif
