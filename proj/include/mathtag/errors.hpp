// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mathtag {

enum class ErrorCode {
    // cos-core
    SyntaxError,
    MalformedXref,
    UnsupportedFeature,
    DanglingReference,
    ReferenceCycle,
    // text-codec
    UnterminatedString,
    UnpairedSurrogate,
    TruncatedUtf16,
    BadHexEscape,
    // content-stream
    UnbalancedTextBlock,
    UnbalancedMarkedContent,
    DuplicateMcid,
    WellFormedness,
    // structure-tree
    MissingStructTreeRoot,
    CycleDetected,
    OrphanElem,
    DanglingMcid,
    McidAlreadyClaimed,
    // attachments
    NotAFilespec,
    UnknownTarget,
    DuplicateName,
    NameNotFound,
    IntegrityMismatch,
    UnsupportedMethod,
    // access-tags
    MalformedDelimiters,
    TargetNotFound,
    CrossesPageBoundary,
    AlreadyTagged,
    // extraction
    UnbalancedDelimiters,
    // cli
    UsageError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}
    Error(ErrorCode code, std::string message, std::size_t offset)
        : std::runtime_error(std::string(error_code_name(code)) + " at byte " +
                             std::to_string(offset) + ": " + message),
          code_(code), offset_(offset), has_offset_(true) {}

    ErrorCode code() const { return code_; }
    bool has_offset() const { return has_offset_; }
    std::size_t offset() const { return offset_; }

private:
    ErrorCode code_;
    std::size_t offset_ = 0;
    bool has_offset_ = false;
};

} // namespace mathtag
