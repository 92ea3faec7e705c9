#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ontomerge {

enum class ErrorCode {
    MalformedXml,
    MixedRoots,
    EmptyInput,
    EmptyName,
    InvalidN,
    UnknownFrame,
    SameFrame,
    KindMismatch,
    AlreadyImaged,
    NameCollision,
    CycleIntroduced,
    ConfirmationRequired,
    EmptyLog,
    NoPreferredSet,
    Unresolvable,
    NonterminationGuard,
    UnresolvableReference,
    InvalidArgument,
    IoFailure,
    ScriptSyntax,
    StepFailure,
    UnknownSession,
    VersionConflict,
};

/// Stable kebab-case spelling, used in CLI messages and HTTP error payloads.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ontomerge
