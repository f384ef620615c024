#pragma once

#include <stdexcept>
#include <string>

namespace lyapdim {

// Bad arguments: dimension mismatch, out-of-range orders, invalid parameters.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An algorithm ran but could not deliver a trustworthy number.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A weight profile with a non-positive jump: the delay operator has no
// bounded additive symmetrization in that metric.
struct DegenerateMetricError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace lyapdim
