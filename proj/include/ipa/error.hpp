#pragma once

#include <stdexcept>
#include <string>

namespace ipa {

enum class ErrorCode {
    UndeclaredSymbol,
    ArityMismatch,
    SortMismatch,
    UnboundSymbol,
    ParseError,
    ValidationError,
    EmptySubstitutionSet,
    ScopeTooLarge,
    StateBudgetExceeded,
    OutOfScope,
    ExternalSolverFailure,
    FreeSymbolOutOfScope,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::UnboundSymbol: return "UnboundSymbol";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::EmptySubstitutionSet: return "EmptySubstitutionSet";
    case ErrorCode::ScopeTooLarge: return "ScopeTooLarge";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::ExternalSolverFailure: return "ExternalSolverFailure";
    case ErrorCode::FreeSymbolOutOfScope: return "FreeSymbolOutOfScope";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ipa
