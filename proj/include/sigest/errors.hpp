#pragma once

#include <stdexcept>
#include <string>

namespace sigest {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched dimensions, truncation levels, or block partitions.
struct ShapeError : Error {
    using Error::Error;
};

// Shuffle result would exceed the truncation level.
struct TruncationError : ShapeError {
    using ShapeError::ShapeError;
};

// Parameter outside its admissible range.
struct DomainError : Error {
    using Error::Error;
};

// Non-finite or otherwise unusable input data.
struct DataError : Error {
    using Error::Error;
};

// Quadrature or other numeric procedure failed to converge.
struct NumericError : Error {
    using Error::Error;
};

// Path simulation failed (e.g. circulant embedding not nonnegative definite).
struct SimulationError : Error {
    using Error::Error;
};

struct EmbeddingError : SimulationError {
    double min_eigenvalue;
    EmbeddingError(const std::string& msg, double min_eig)
        : SimulationError(msg), min_eigenvalue(min_eig) {}
};

// Bad CLI flags or config files.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace sigest
