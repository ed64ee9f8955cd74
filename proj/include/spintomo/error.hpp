#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spintomo {

enum class ErrorKind {
    NotHermitian,
    TraceNotOne,
    NotPositive,
    DimensionMismatch,
    ConvergenceFailure,
    NotUnitary,
    GridTooCoarse,
    RankDeficient,
    GridMismatch,
    LengthMismatch,
    PremiseViolated,
    WitnessUndefined,
    InvalidSpinLabel,
    VacuumUndetectable,
    InvalidInput,
    NumericalFailure,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::TraceNotOne: return "TraceNotOne";
        case ErrorKind::NotPositive: return "NotPositive";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::PremiseViolated: return "PremiseViolated";
        case ErrorKind::WitnessUndefined: return "WitnessUndefined";
        case ErrorKind::InvalidSpinLabel: return "InvalidSpinLabel";
        case ErrorKind::VacuumUndetectable: return "VacuumUndetectable";
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

// All library failures are reported through this type; kind() is the
// machine-readable tag, what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace spintomo
