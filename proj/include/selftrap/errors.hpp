#pragma once

#include <stdexcept>
#include <string>

namespace selftrap {

// Bad user-supplied parameters (CLI exit code 2).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Any numerical-solver failure (CLI exit code 3).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoEquilibriumError : SolverError {
    using SolverError::SolverError;
};

// Linearization requested about a point with omega_M^2 <= 0.
struct UnstableEquilibriumError : SolverError {
    using SolverError::SolverError;
};

// min_phonon requested where the optical field heats on net.
struct NetHeatingError : SolverError {
    using SolverError::SolverError;
};

struct StiffnessError : SolverError {
    double t_last;
    StiffnessError(const std::string& msg, double t) : SolverError(msg), t_last(t) {}
};

struct DivergenceError : SolverError {
    double t_last;
    DivergenceError(const std::string& msg, double t) : SolverError(msg), t_last(t) {}
};

// Trajectory decay-rate fit did not meet the r^2 threshold (CLI exit code 4).
struct FitRejectedError : std::runtime_error {
    double r_squared;
    FitRejectedError(const std::string& msg, double r2)
        : std::runtime_error(msg), r_squared(r2) {}
};

} // namespace selftrap
