// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace mathtag {

// 32 uppercase hex characters.
std::string md5_hex(std::span<const std::uint8_t> data);

} // namespace mathtag
