#pragma once

#include <stdexcept>
#include <string>

namespace itpnet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration or misuse of an API contract (exit code 1 at the CLI).
struct ConfigError : Error {
    using Error::Error;
};

// Shape/dimension mismatches between tensors or sequences.
struct ShapeError : ConfigError {
    using ConfigError::ConfigError;
};

// Unreadable/malformed input files, too-short trajectories (exit code 2).
struct DataError : Error {
    using Error::Error;
};

// NaN/Inf encountered in a numeric kernel (exit code 3).
struct NumericError : Error {
    using Error::Error;
};

} // namespace itpnet
