#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mergegame {

enum class ErrorCode {
    NoEmptyCell,
    AmbiguousLocator,
    ScriptExhausted,
    MissingChoice,
    IllegalMove,
    EmptyClauseList,
    GoalTooSmall,
    InvalidParameters,
    OverlappingGadgets,
    UnsupportedVariant,
    UnsatisfiedClause,
    MissingAnnotations,
    ReplayMismatch,
    SyntaxError,
    ClauseArityError,
    FormatError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NoEmptyCell: return "NoEmptyCell";
    case ErrorCode::AmbiguousLocator: return "AmbiguousLocator";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::MissingChoice: return "MissingChoice";
    case ErrorCode::IllegalMove: return "IllegalMove";
    case ErrorCode::EmptyClauseList: return "EmptyClauseList";
    case ErrorCode::GoalTooSmall: return "GoalTooSmall";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::OverlappingGadgets: return "OverlappingGadgets";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::UnsatisfiedClause: return "UnsatisfiedClause";
    case ErrorCode::MissingAnnotations: return "MissingAnnotations";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ClauseArityError: return "ClauseArityError";
    case ErrorCode::FormatError: return "FormatError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the HTTP bridge) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised with the offending clause (1-based) when an assignment leaves it false.
class UnsatisfiedClauseError : public Error {
public:
    explicit UnsatisfiedClauseError(std::size_t clause)
        : Error(ErrorCode::UnsatisfiedClause, "clause " + std::to_string(clause) + " is false"),
          clause_(clause) {}

    std::size_t clause() const noexcept { return clause_; }

private:
    std::size_t clause_;
};

/// Parse failures remember where they happened.
class ParseError : public Error {
public:
    ParseError(ErrorCode code, std::size_t line, const std::string& what)
        : Error(code, "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mergegame
