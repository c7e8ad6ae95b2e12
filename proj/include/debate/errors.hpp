#pragma once

#include <stdexcept>
#include <string>

namespace debate {

// Root of every error this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operational failures inside a single debate. The engine catches these and
// records the debate as terminated with BackendFailure instead of aborting
// the surrounding experiment.
struct DebateFailure : Error {
    using Error::Error;
};

struct TransportError : DebateFailure {
    explicit TransportError(const std::string& what, bool retryable = true)
        : DebateFailure(what), retryable(retryable) {}
    bool retryable;
};

struct ScriptExhausted : DebateFailure {
    using DebateFailure::DebateFailure;
};

struct HelperParseError : DebateFailure {
    using DebateFailure::DebateFailure;
};

struct BudgetInfeasible : DebateFailure {
    using DebateFailure::DebateFailure;
};

struct SummaryNotSmaller : DebateFailure {
    using DebateFailure::DebateFailure;
};

// Non-recoverable errors: bad inputs or bad configuration. These propagate.
struct UnknownPlaceholder : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Analysis preconditions.
struct EmptyDenominator : Error {
    using Error::Error;
};

struct MissingRepetition : Error {
    using Error::Error;
};

struct ZeroReference : Error {
    using Error::Error;
};

}  // namespace debate
