// SPDX-License-Identifier: Apache-2.0

#include "mathtag/text_codec.hpp"

#include "mathtag/errors.hpp"

namespace mathtag {

namespace {

bool is_octal_digit(std::uint8_t c) { return c >= '0' && c <= '7'; }

void append_octal3(Bytes& out, std::uint8_t byte) {
    out.push_back('\\');
    out.push_back(static_cast<std::uint8_t>('0' + ((byte >> 6) & 7)));
    out.push_back(static_cast<std::uint8_t>('0' + ((byte >> 3) & 7)));
    out.push_back(static_cast<std::uint8_t>('0' + (byte & 7)));
}

int hex_value(std::uint8_t c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Characters that must be #-escaped in a written name: whitespace, the PDF
// delimiters, '#' itself, and anything outside the visible ASCII range.
bool name_char_needs_escape(std::uint8_t c) {
    if (c < 0x21 || c > 0x7E) return true;
    switch (c) {
    case '(': case ')': case '<': case '>': case '[': case ']':
    case '{': case '}': case '/': case '%': case '#':
        return true;
    default:
        return false;
    }
}

} // namespace

Bytes decode_literal(std::span<const std::uint8_t> escaped) {
    Bytes out;
    out.reserve(escaped.size());
    std::size_t i = 0;
    const std::size_t n = escaped.size();
    while (i < n) {
        std::uint8_t c = escaped[i];
        if (c != '\\') {
            out.push_back(c);
            ++i;
            continue;
        }
        if (++i >= n)
            throw Error(ErrorCode::UnterminatedString, "escape at end of literal string", i);
        std::uint8_t e = escaped[i];
        if (is_octal_digit(e)) {
            unsigned value = 0;
            int digits = 0;
            while (digits < 3 && i < n && is_octal_digit(escaped[i])) {
                value = value * 8 + static_cast<unsigned>(escaped[i] - '0');
                ++i;
                ++digits;
            }
            out.push_back(static_cast<std::uint8_t>(value & 0xFF));
            continue;
        }
        switch (e) {
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case '(': out.push_back('('); break;
        case ')': out.push_back(')'); break;
        case '\\': out.push_back('\\'); break;
        case '\r':
            // line continuation; swallow an LF that follows a CR
            if (i + 1 < n && escaped[i + 1] == '\n') ++i;
            break;
        case '\n':
            break;
        default:
            // unknown escape: the backslash is dropped, the byte kept
            out.push_back(e);
            break;
        }
        ++i;
    }
    return out;
}

Bytes decode_literal(std::string_view escaped) {
    return decode_literal(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(escaped.data()), escaped.size()));
}

Bytes encode_literal(std::span<const std::uint8_t> raw) {
    Bytes out;
    out.reserve(raw.size());
    for (std::uint8_t c : raw) {
        switch (c) {
        case '\\': out.insert(out.end(), {'\\', '1', '3', '4'}); break;
        case '(': out.insert(out.end(), {'\\', '0', '5', '0'}); break;
        case ')': out.insert(out.end(), {'\\', '0', '5', '1'}); break;
        case '\r': out.insert(out.end(), {'\\', '0', '1', '5'}); break;
        case '\n': out.insert(out.end(), {'\\', '0', '1', '2'}); break;
        default:
            if (c >= 0x20 && c <= 0x7E)
                out.push_back(c);
            else
                append_octal3(out, c);
            break;
        }
    }
    return out;
}

Bytes encode_literal(std::string_view raw) {
    return encode_literal(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

TextString decode_text(std::span<const std::uint8_t> bytes, StringOrigin origin) {
    TextString result;
    result.origin = origin;
    if (bytes.size() >= 2 && bytes[0] == 0xFE && bytes[1] == 0xFF) {
        std::size_t i = 2;
        const std::size_t n = bytes.size();
        if ((n - 2) % 2 != 0)
            throw Error(ErrorCode::TruncatedUtf16, "odd byte count in UTF-16BE string", n - 1);
        while (i < n) {
            char32_t unit = static_cast<char32_t>((bytes[i] << 8) | bytes[i + 1]);
            i += 2;
            if (unit >= 0xD800 && unit <= 0xDBFF) {
                if (i >= n)
                    throw Error(ErrorCode::UnpairedSurrogate, "high surrogate at end of string",
                                i - 2);
                char32_t low = static_cast<char32_t>((bytes[i] << 8) | bytes[i + 1]);
                if (low < 0xDC00 || low > 0xDFFF)
                    throw Error(ErrorCode::UnpairedSurrogate,
                                "high surrogate not followed by low surrogate", i);
                i += 2;
                result.text.push_back(0x10000 + ((unit - 0xD800) << 10) + (low - 0xDC00));
            } else if (unit >= 0xDC00 && unit <= 0xDFFF) {
                throw Error(ErrorCode::UnpairedSurrogate, "stray low surrogate", i - 2);
            } else {
                result.text.push_back(unit);
            }
        }
    } else {
        result.text.reserve(bytes.size());
        for (std::uint8_t b : bytes)
            result.text.push_back(static_cast<char32_t>(b));
    }
    return result;
}

Bytes encode_text_utf16be(std::u32string_view text) {
    Bytes out;
    out.reserve(2 + text.size() * 2);
    out.push_back(0xFE);
    out.push_back(0xFF);
    for (char32_t cp : text) {
        if (cp > 0xFFFF) {
            char32_t v = cp - 0x10000;
            std::uint16_t high = static_cast<std::uint16_t>(0xD800 + (v >> 10));
            std::uint16_t low = static_cast<std::uint16_t>(0xDC00 + (v & 0x3FF));
            out.push_back(static_cast<std::uint8_t>(high >> 8));
            out.push_back(static_cast<std::uint8_t>(high & 0xFF));
            out.push_back(static_cast<std::uint8_t>(low >> 8));
            out.push_back(static_cast<std::uint8_t>(low & 0xFF));
        } else {
            out.push_back(static_cast<std::uint8_t>(cp >> 8));
            out.push_back(static_cast<std::uint8_t>(cp & 0xFF));
        }
    }
    return out;
}

bool is_latin1(std::u32string_view text) {
    for (char32_t cp : text)
        if (cp > 0xFF) return false;
    return true;
}

Bytes latin1_bytes(std::u32string_view text) {
    Bytes out;
    out.reserve(text.size());
    for (char32_t cp : text)
        out.push_back(static_cast<std::uint8_t>(cp & 0xFF));
    return out;
}

std::string decode_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '#') {
            if (i + 2 >= raw.size())
                throw Error(ErrorCode::BadHexEscape, "truncated #xx escape in name", i);
            int hi = hex_value(static_cast<std::uint8_t>(raw[i + 1]));
            int lo = hex_value(static_cast<std::uint8_t>(raw[i + 2]));
            if (hi < 0 || lo < 0)
                throw Error(ErrorCode::BadHexEscape, "bad #xx escape in name", i);
            out.push_back(static_cast<char>(hi * 16 + lo));
            i += 2;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string encode_name(std::string_view text) {
    static const char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        std::uint8_t c = static_cast<std::uint8_t>(ch);
        if (name_char_needs_escape(c)) {
            out.push_back('#');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        } else {
            out.push_back(ch);
        }
    }
    return out;
}

std::string to_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::u32string from_utf8(std::string_view text) {
    std::u32string out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        std::uint8_t c = static_cast<std::uint8_t>(text[i]);
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            // invalid lead byte: keep as Latin-1 so no input is lost
            cp = c;
        }
        ++i;
        for (int k = 0; k < extra && i < n; ++k, ++i) {
            std::uint8_t cc = static_cast<std::uint8_t>(text[i]);
            if ((cc & 0xC0) != 0x80) break;
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
    }
    return out;
}

} // namespace mathtag
