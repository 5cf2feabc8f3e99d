#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace haptosim {

enum class ErrorKind {
    NonpositiveGamma,
    NonmonotoneG,
    NonpositivePsi,
    InvariantViolation,
    BracketFailure,
    PositivityLoss,
    LinearSolveFailure,
    DomainError,
    EmptySchedule,
    NoDegeneracy,
    ParseError,
    UnknownKey,
    InvalidValue,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonpositiveGamma: return "NonpositiveGamma";
    case ErrorKind::NonmonotoneG: return "NonmonotoneG";
    case ErrorKind::NonpositivePsi: return "NonpositivePsi";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptySchedule: return "EmptySchedule";
    case ErrorKind::NoDegeneracy: return "NoDegeneracy";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace haptosim
