#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptcav {

enum class ErrorKind {
    Domain,
    Parameter,
    Singularity,
    Unsupported,
    NotConverged,
    Divergence,
    InsufficientData,
    Numeric,
    Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::NotConverged: return "not_converged";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Thrown when a trajectory window has not settled. Carries the measured drift
/// so callers can decide whether to extend the horizon.
class NotConvergedError : public Error {
public:
    NotConvergedError(double drift, const std::string& detail)
        : Error(ErrorKind::NotConverged, detail), drift_(drift) {}

    double drift() const noexcept { return drift_; }

private:
    double drift_;
};

class DivergenceError : public Error {
public:
    DivergenceError(double time, const std::string& detail)
        : Error(ErrorKind::Divergence, detail), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace ptcav
