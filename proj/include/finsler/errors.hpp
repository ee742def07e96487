#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

enum class ErrorKind {
    NonPositiveNorm,
    ZeroVector,
    NotStronglyConvex,
    WindTooStrong,
    OriginNotInOverlap,
    SingularSystem,
    InconsistentStructure,
    IntegratorFailure,
    ChartEscape,
    NotConstantCurvature,
    RefocusingFailure,
    NonOrientedFiber,
    NotPeriodic,
    NotGeodesicallyReversible,
    ConfigParseError,
    MetricValidationError,
    MissingSeries,
    InvalidArgument,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonPositiveNorm: return "NonPositiveNorm";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NotStronglyConvex: return "NotStronglyConvex";
        case ErrorKind::WindTooStrong: return "WindTooStrong";
        case ErrorKind::OriginNotInOverlap: return "OriginNotInOverlap";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::InconsistentStructure: return "InconsistentStructure";
        case ErrorKind::IntegratorFailure: return "IntegratorFailure";
        case ErrorKind::ChartEscape: return "ChartEscape";
        case ErrorKind::NotConstantCurvature: return "NotConstantCurvature";
        case ErrorKind::RefocusingFailure: return "RefocusingFailure";
        case ErrorKind::NonOrientedFiber: return "NonOrientedFiber";
        case ErrorKind::NotPeriodic: return "NotPeriodic";
        case ErrorKind::NotGeodesicallyReversible: return "NotGeodesicallyReversible";
        case ErrorKind::ConfigParseError: return "ConfigParseError";
        case ErrorKind::MetricValidationError: return "MetricValidationError";
        case ErrorKind::MissingSeries: return "MissingSeries";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Parse failure with a 1-based source location.
class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& what, int line, int column)
        : Error(ErrorKind::ConfigParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace finsler
