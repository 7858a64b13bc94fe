#pragma once

#include <stdexcept>
#include <string>

namespace thermspec {

/// Config file missing/invalid; carries the offending field when known.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg, std::string field_name = {})
        : std::runtime_error(msg), field(std::move(field_name)) {}
    std::string field;
};

/// Nonlinear fit failed to converge or the data cannot constrain the model.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Steady-state solver failure (singular or ill-conditioned generator).
struct QuantumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File write/rename failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace thermspec
