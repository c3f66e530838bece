#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lagflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (coordinate outside Ω, |s| >= 1 for the log potential).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix sizes that do not match the discretization.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid numerical parameter (non-positive dt, N < 2, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Loss of flow-map monotonicity: some dx/dX <= 0.
class PositivityError : public Error {
public:
    using Error::Error;
};

/// Axisymmetric map left the admissible geometry (r <= 0 for R > 0).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// BDF2 invoked without the history it needs.
class StartupError : public Error {
public:
    using Error::Error;
};

/// Sampled profile has no crossing of the requested level.
class NoInterfaceError : public Error {
public:
    using Error::Error;
};

/// Explicit time loop blew up (max-norm guard).
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Diagnostics of a Newton solve. Kept in double regardless of the solver scalar.
struct IterationReport {
    int iterations = 0;
    double final_residual_norm = 0.0;
    double damping_used = 1.0;
    bool converged = false;
    /// Residual max-norm before each iteration, plus the final value.
    std::vector<double> residual_trace;
};

/// Newton failure that carries the iteration trace.
class SolverError : public Error {
public:
    SolverError(const std::string& what, IterationReport report)
        : Error(what), report_(std::move(report)) {}
    const IterationReport& report() const noexcept { return report_; }

private:
    IterationReport report_;
};

class ConvergenceError : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularityError : public SolverError {
public:
    using SolverError::SolverError;
};

/// The positivity guard could not be met even after repeated halving of the damping.
class GuardError : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace lagflow
