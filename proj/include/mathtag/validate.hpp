// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mathtag {

// One consistency problem. `code` is a stable machine-readable identifier,
// `where` names the object or page the finding points at.
struct Finding {
    std::string code;
    std::string message;
    std::string where;
};

// Cross-object consistency checks over a whole file: xref offsets, stream
// lengths, name-tree order, Filespec typing, Size/CheckSum integrity,
// /MarkInfo registry closure, MCID existence and uniqueness, structure
// parent/kid symmetry, marked-content balance, access-tag delimiters,
// reference resolution. Empty result = clean.
std::vector<Finding> validate_bytes(std::span<const std::uint8_t> bytes);

} // namespace mathtag
