#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otkg {

enum class ErrorCode {
    KindConflict,
    InvalidCriticality,
    InvalidNode,
    MissingEndpoint,
    KindConstraintViolation,
    GraphNotFinalized,
    UnknownNode,
    IoFailure,
    MissingColumn,
    BadEnum,
    BadValue,
    DanglingReference,
    NoLogsForPair,
    MissingSecuredLogs,
    DiscontiguousPath,
    EmptyGraph,
    SelectorEmpty,
    InvalidProfile,
    InvalidConfig,
    StageOrder,
    InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so callers
/// (and the CLI's exit-code mapping) can branch on the kind of failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace otkg
