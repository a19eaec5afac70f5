// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "mathtag/text_codec.hpp"

namespace mathtag {

// Whole-file reads and writes; both throw std::runtime_error on I/O failure.
Bytes read_file(const std::string& path);
void write_file(const std::string& path, const Bytes& data);

} // namespace mathtag
