// SPDX-License-Identifier: Apache-2.0

// Codecs for the three PDF text carriers: literal strings with octal/backslash
// escapes, hex strings (UTF-16BE with byte-order mark and surrogate pairs),
// and names with #xx escapes. Byte-preserving: nothing here trims or
// normalizes content, only the escape layers are added or removed.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <span>
#include <vector>

namespace mathtag {

using Bytes = std::vector<std::uint8_t>;

enum class StringOrigin { Literal, Hex };

// A decoded PDF text string: Unicode scalar values plus which string syntax
// it came from (the writer re-emits hex-origin strings as UTF-16BE).
struct TextString {
    std::u32string text;
    StringOrigin origin = StringOrigin::Literal;

    friend bool operator==(const TextString&, const TextString&) = default;
};

// Literal string escapes. decode_literal takes the bytes between the parens
// (balanced inner parens included raw) and resolves \ooo, \\, \(, \), \n, \r,
// \t, \b, \f and backslash-newline continuations.
Bytes decode_literal(std::span<const std::uint8_t> escaped);
Bytes decode_literal(std::string_view escaped);

// Escapes so that the output contains no raw '(', ')', '\' or CR byte.
// Backslash -> \134, ( -> \050, ) -> \051, CR -> \015, LF -> \012; bytes
// outside printable ASCII get three-digit octal. decode_literal inverts it.
Bytes encode_literal(std::span<const std::uint8_t> raw);
Bytes encode_literal(std::string_view raw);

// String bytes -> text. A leading FE FF byte-order mark selects UTF-16BE with
// surrogate-pair combination; anything else decodes byte-per-byte as Latin-1.
TextString decode_text(std::span<const std::uint8_t> bytes, StringOrigin origin);

// Text -> FE FF prefixed UTF-16BE; code points above U+FFFF become pairs.
Bytes encode_text_utf16be(std::u32string_view text);

// True when every scalar fits in a single byte (Latin-1 writable).
bool is_latin1(std::u32string_view text);
// Latin-1 bytes for such a string.
Bytes latin1_bytes(std::u32string_view text);

// Name escapes: /application#2Fx-tex <-> application/x-tex.
std::string decode_name(std::string_view raw);
std::string encode_name(std::string_view text);

// UTF-8 conversions for the CLI boundary.
std::string to_utf8(std::u32string_view text);
std::u32string from_utf8(std::string_view text);

} // namespace mathtag
