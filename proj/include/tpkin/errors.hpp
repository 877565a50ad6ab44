#pragma once

#include <stdexcept>
#include <string>

namespace tpkin {

/// Base of all solver errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };
struct DegenerateStateError : Error { using Error::Error; };
struct ProjectionError : Error { using Error::Error; };
struct StepSizeError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };

} // namespace tpkin
