#include "ontomerge/error.hpp"

namespace ontomerge {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::MalformedXml: return "malformed-xml";
    case ErrorCode::MixedRoots: return "mixed-roots";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::EmptyName: return "empty-name";
    case ErrorCode::InvalidN: return "invalid-n";
    case ErrorCode::UnknownFrame: return "unknown-frame";
    case ErrorCode::SameFrame: return "same-frame";
    case ErrorCode::KindMismatch: return "kind-mismatch";
    case ErrorCode::AlreadyImaged: return "already-imaged";
    case ErrorCode::NameCollision: return "name-collision";
    case ErrorCode::CycleIntroduced: return "cycle-introduced";
    case ErrorCode::ConfirmationRequired: return "confirmation-required";
    case ErrorCode::EmptyLog: return "empty-log";
    case ErrorCode::NoPreferredSet: return "no-preferred-set";
    case ErrorCode::Unresolvable: return "unresolvable";
    case ErrorCode::NonterminationGuard: return "nontermination-guard";
    case ErrorCode::UnresolvableReference: return "unresolvable-reference";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::IoFailure: return "io-failure";
    case ErrorCode::ScriptSyntax: return "script-syntax";
    case ErrorCode::StepFailure: return "step-failure";
    case ErrorCode::UnknownSession: return "unknown-session";
    case ErrorCode::VersionConflict: return "version-conflict";
    }
    return "unknown";
}

} // namespace ontomerge
