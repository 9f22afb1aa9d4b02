#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace deeplink {

enum class ErrorCode {
    ParseError,
    ValidationError,
    UnsetDependency,
    TypeMismatch,
    NoSuchTarget,
    NoSuchView,
    TerminatedSession,
    UnreachableActivity,
    DifferentTargets,
    EntryScriptFailed,
    CrawlBudgetExceeded,
    RecoverFailed,
    NoSuchFragment,
    DuplicateName,
    AmbiguousTarget,
    NotCrawled,
    NotReplayable,
    DuplicateSchema,
    NoMatchingTemplate,
    AmbiguousMatch,
    FormatError,
    DigestMismatch,
    InvalidUri,
    StepOrder,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnsetDependency: return "UnsetDependency";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::NoSuchTarget: return "NoSuchTarget";
    case ErrorCode::NoSuchView: return "NoSuchView";
    case ErrorCode::TerminatedSession: return "TerminatedSession";
    case ErrorCode::UnreachableActivity: return "UnreachableActivity";
    case ErrorCode::DifferentTargets: return "DifferentTargets";
    case ErrorCode::EntryScriptFailed: return "EntryScriptFailed";
    case ErrorCode::CrawlBudgetExceeded: return "CrawlBudgetExceeded";
    case ErrorCode::RecoverFailed: return "RecoverFailed";
    case ErrorCode::NoSuchFragment: return "NoSuchFragment";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::AmbiguousTarget: return "AmbiguousTarget";
    case ErrorCode::NotCrawled: return "NotCrawled";
    case ErrorCode::NotReplayable: return "NotReplayable";
    case ErrorCode::DuplicateSchema: return "DuplicateSchema";
    case ErrorCode::NoMatchingTemplate: return "NoMatchingTemplate";
    case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
    case ErrorCode::InvalidUri: return "InvalidUri";
    case ErrorCode::StepOrder: return "StepOrder";
    }
    return "Unknown";
}

/// Error raised by every deeplink operation. `detail` carries the offending
/// name (variable, activity, view id, ...) when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code), message_(message), detail_(std::move(detail))
    {
    }

    ErrorCode code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string message_;
    std::string detail_;
};

} // namespace deeplink
