// SPDX-License-Identifier: Apache-2.0

#include "mathtag/errors.hpp"

namespace mathtag {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MalformedXref: return "MalformedXref";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::ReferenceCycle: return "ReferenceCycle";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::UnpairedSurrogate: return "UnpairedSurrogate";
    case ErrorCode::TruncatedUtf16: return "TruncatedUtf16";
    case ErrorCode::BadHexEscape: return "BadHexEscape";
    case ErrorCode::UnbalancedTextBlock: return "UnbalancedTextBlock";
    case ErrorCode::UnbalancedMarkedContent: return "UnbalancedMarkedContent";
    case ErrorCode::DuplicateMcid: return "DuplicateMcid";
    case ErrorCode::WellFormedness: return "WellFormedness";
    case ErrorCode::MissingStructTreeRoot: return "MissingStructTreeRoot";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::OrphanElem: return "OrphanElem";
    case ErrorCode::DanglingMcid: return "DanglingMcid";
    case ErrorCode::McidAlreadyClaimed: return "McidAlreadyClaimed";
    case ErrorCode::NotAFilespec: return "NotAFilespec";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NameNotFound: return "NameNotFound";
    case ErrorCode::IntegrityMismatch: return "IntegrityMismatch";
    case ErrorCode::UnsupportedMethod: return "UnsupportedMethod";
    case ErrorCode::MalformedDelimiters: return "MalformedDelimiters";
    case ErrorCode::TargetNotFound: return "TargetNotFound";
    case ErrorCode::CrossesPageBoundary: return "CrossesPageBoundary";
    case ErrorCode::AlreadyTagged: return "AlreadyTagged";
    case ErrorCode::UnbalancedDelimiters: return "UnbalancedDelimiters";
    case ErrorCode::UsageError: return "UsageError";
    }
    return "Error";
}

} // namespace mathtag
