// SPDX-License-Identifier: Apache-2.0

#include "mathtag/cos.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>

#include "mathtag/errors.hpp"

namespace mathtag {

namespace {

bool is_ws(std::uint8_t c) {
    return c == '\0' || c == '\t' || c == '\n' || c == '\f' || c == '\r' || c == ' ';
}

bool is_delim(std::uint8_t c) {
    switch (c) {
    case '(': case ')': case '<': case '>': case '[': case ']':
    case '{': case '}': case '/': case '%':
        return true;
    default:
        return false;
    }
}

bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }

struct Lexer {
    std::span<const std::uint8_t> in;
    std::size_t pos = 0;

    bool eof() const { return pos >= in.size(); }
    std::uint8_t peek() const { return in[pos]; }
    std::uint8_t peek_at(std::size_t ahead) const {
        return pos + ahead < in.size() ? in[pos + ahead] : 0;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::SyntaxError, msg, pos);
    }

    void skip_ws() {
        while (!eof()) {
            std::uint8_t c = in[pos];
            if (is_ws(c)) {
                ++pos;
            } else if (c == '%') {
                while (!eof() && in[pos] != '\n' && in[pos] != '\r') ++pos;
            } else {
                break;
            }
        }
    }

    // Run of regular characters (a keyword or a number).
    std::string_view run() {
        std::size_t start = pos;
        while (!eof() && !is_ws(in[pos]) && !is_delim(in[pos])) ++pos;
        return std::string_view(reinterpret_cast<const char*>(in.data()) + start, pos - start);
    }

    // Consumes one end-of-line marker; returns false if none is present.
    bool skip_eol() {
        if (eof()) return false;
        if (in[pos] == '\r') {
            ++pos;
            if (!eof() && in[pos] == '\n') ++pos;
            return true;
        }
        if (in[pos] == '\n') {
            ++pos;
            return true;
        }
        return false;
    }
};

std::int64_t parse_int_token(std::string_view tok, std::size_t at) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error(ErrorCode::SyntaxError, "bad number", at);
    return value;
}

CosValue parse_number(std::string_view tok, std::size_t at) {
    if (tok.empty()) throw Error(ErrorCode::SyntaxError, "bad number", at);
    bool real = false;
    std::size_t i = 0;
    if (tok[i] == '+' || tok[i] == '-') ++i;
    int digits = 0;
    int dots = 0;
    for (; i < tok.size(); ++i) {
        if (is_digit(static_cast<std::uint8_t>(tok[i]))) {
            ++digits;
        } else if (tok[i] == '.') {
            ++dots;
            real = true;
        } else {
            throw Error(ErrorCode::SyntaxError, "bad number", at);
        }
    }
    if (digits == 0 || dots > 1) throw Error(ErrorCode::SyntaxError, "bad number", at);
    if (tok[0] == '+') tok.remove_prefix(1);
    if (!real) return cos_int(parse_int_token(tok, at));
    std::string buf(tok);
    return cos_real(std::strtod(buf.c_str(), nullptr));
}

CosValue parse_literal_string(Lexer& lx) {
    std::size_t start = lx.pos;
    ++lx.pos;
    int depth = 1;
    Bytes raw;
    while (true) {
        if (lx.eof())
            throw Error(ErrorCode::UnterminatedString, "unterminated literal string", start);
        std::uint8_t c = lx.in[lx.pos++];
        if (c == '\\') {
            if (lx.eof())
                throw Error(ErrorCode::UnterminatedString, "unterminated literal string", start);
            raw.push_back('\\');
            raw.push_back(lx.in[lx.pos++]);
            continue;
        }
        if (c == '(') {
            ++depth;
            raw.push_back(c);
            continue;
        }
        if (c == ')') {
            if (--depth == 0) break;
            raw.push_back(c);
            continue;
        }
        if (c == '\r') {
            // unescaped EOL inside a string reads as a single LF
            raw.push_back('\n');
            if (!lx.eof() && lx.in[lx.pos] == '\n') ++lx.pos;
            continue;
        }
        raw.push_back(c);
    }
    return cos_literal(decode_literal(std::span<const std::uint8_t>(raw.data(), raw.size())));
}

int hex_digit(std::uint8_t c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

CosValue parse_hex_string(Lexer& lx) {
    std::size_t start = lx.pos;
    ++lx.pos;
    Bytes out;
    int high = -1;
    while (true) {
        if (lx.eof())
            throw Error(ErrorCode::UnterminatedString, "unterminated hex string", start);
        std::uint8_t c = lx.in[lx.pos++];
        if (c == '>') break;
        if (is_ws(c)) continue;
        int v = hex_digit(c);
        if (v < 0)
            throw Error(ErrorCode::SyntaxError, "bad character in hex string", lx.pos - 1);
        if (high < 0) {
            high = v;
        } else {
            out.push_back(static_cast<std::uint8_t>(high * 16 + v));
            high = -1;
        }
    }
    if (high >= 0) out.push_back(static_cast<std::uint8_t>(high * 16));
    return cos_hex(std::move(out));
}

CosValue parse_name_token(Lexer& lx) {
    std::size_t start = lx.pos;
    ++lx.pos;
    std::string_view raw = lx.run();
    try {
        return cos_name(decode_name(raw));
    } catch (const Error& e) {
        std::size_t rel = e.has_offset() ? e.offset() : 0;
        throw Error(e.code(), "bad #xx escape in name", start + 1 + rel);
    }
}

CosValue parse_value_inner(Lexer& lx);

CosValue parse_dict_or_hex(Lexer& lx) {
    if (lx.peek_at(1) != '<') return parse_hex_string(lx);
    std::size_t start = lx.pos;
    lx.pos += 2;
    CosDict d;
    while (true) {
        lx.skip_ws();
        if (lx.eof())
            throw Error(ErrorCode::SyntaxError, "unterminated dictionary", start);
        if (lx.peek() == '>') {
            if (lx.peek_at(1) != '>')
                throw Error(ErrorCode::SyntaxError, "expected >>", lx.pos);
            lx.pos += 2;
            break;
        }
        if (lx.peek() != '/')
            throw Error(ErrorCode::SyntaxError, "dictionary key must be a name", lx.pos);
        CosValue key = parse_name_token(lx);
        CosValue value = parse_value_inner(lx);
        d.push_back({*key.name(), std::move(value)});
    }
    return cos_dict(std::move(d));
}

CosValue parse_array(Lexer& lx) {
    std::size_t start = lx.pos;
    ++lx.pos;
    CosArray items;
    while (true) {
        lx.skip_ws();
        if (lx.eof()) throw Error(ErrorCode::SyntaxError, "unterminated array", start);
        if (lx.peek() == ']') {
            ++lx.pos;
            break;
        }
        items.push_back(parse_value_inner(lx));
    }
    return cos_array(std::move(items));
}

bool plain_nonneg_int(std::string_view tok) {
    if (tok.empty()) return false;
    for (char c : tok)
        if (!is_digit(static_cast<std::uint8_t>(c))) return false;
    return true;
}

CosValue parse_value_inner(Lexer& lx) {
    lx.skip_ws();
    if (lx.eof()) lx.fail("unexpected end of input");
    std::uint8_t c = lx.peek();
    if (c == '<') return parse_dict_or_hex(lx);
    if (c == '[') return parse_array(lx);
    if (c == '(') return parse_literal_string(lx);
    if (c == '/') return parse_name_token(lx);
    if (c == ')' || c == '>' || c == ']' || c == '{' || c == '}')
        lx.fail("unexpected delimiter");

    std::size_t start = lx.pos;
    std::string_view tok = lx.run();
    if (tok.empty()) lx.fail("unexpected character");
    if (tok == "true") return cos_bool(true);
    if (tok == "false") return cos_bool(false);
    if (tok == "null") return cos_null();

    if (is_digit(c) || c == '+' || c == '-' || c == '.') {
        CosValue num = parse_number(tok, start);
        if (auto n = num.integer(); n && *n >= 1) {
            // an integer may begin an indirect reference: <num> <gen> R
            std::size_t save = lx.pos;
            lx.skip_ws();
            std::string_view gen_tok = lx.run();
            if (plain_nonneg_int(gen_tok)) {
                std::size_t after_gen = lx.pos;
                lx.skip_ws();
                std::string_view r_tok = lx.run();
                if (r_tok == "R")
                    return cos_ref(*n, parse_int_token(gen_tok, after_gen));
            }
            lx.pos = save;
        }
        return num;
    }
    lx.fail("unexpected keyword '" + std::string(tok) + "'");
}

} // namespace

std::optional<bool> CosValue::boolean() const {
    if (auto* p = std::get_if<bool>(&v)) return *p;
    return std::nullopt;
}

std::optional<std::int64_t> CosValue::integer() const {
    if (auto* p = std::get_if<std::int64_t>(&v)) return *p;
    return std::nullopt;
}

std::optional<double> CosValue::number() const {
    if (auto* p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
    if (auto* p = std::get_if<double>(&v)) return *p;
    return std::nullopt;
}

const Bytes* CosValue::literal() const {
    auto* p = std::get_if<CosLiteralString>(&v);
    return p ? &p->bytes : nullptr;
}

const Bytes* CosValue::hex_bytes() const {
    auto* p = std::get_if<CosHexString>(&v);
    return p ? &p->bytes : nullptr;
}

const std::string* CosValue::name() const {
    auto* p = std::get_if<CosName>(&v);
    return p ? &p->text : nullptr;
}

const CosArray* CosValue::array() const { return std::get_if<CosArray>(&v); }
CosArray* CosValue::array() { return std::get_if<CosArray>(&v); }
const CosDict* CosValue::dict() const { return std::get_if<CosDict>(&v); }
CosDict* CosValue::dict() { return std::get_if<CosDict>(&v); }
const CosStream* CosValue::stream() const { return std::get_if<CosStream>(&v); }
CosStream* CosValue::stream() { return std::get_if<CosStream>(&v); }

const ObjectId* CosValue::ref() const {
    auto* p = std::get_if<CosRef>(&v);
    return p ? &p->id : nullptr;
}

bool operator==(const CosValue& a, const CosValue& b) { return a.v == b.v; }
bool operator==(const DictEntry& a, const DictEntry& b) {
    return a.key == b.key && a.value == b.value;
}
bool operator==(const CosStream& a, const CosStream& b) {
    return a.dict == b.dict && a.data == b.data;
}

CosValue cos_null() { return CosValue{CosNull{}}; }
CosValue cos_bool(bool b) { return CosValue{b}; }
CosValue cos_int(std::int64_t n) { return CosValue{n}; }
CosValue cos_real(double d) { return CosValue{d}; }
CosValue cos_literal(Bytes bytes) { return CosValue{CosLiteralString{std::move(bytes)}}; }
CosValue cos_literal(std::string_view text) {
    return cos_literal(Bytes(text.begin(), text.end()));
}
CosValue cos_hex(Bytes bytes) { return CosValue{CosHexString{std::move(bytes)}}; }
CosValue cos_name(std::string text) { return CosValue{CosName{std::move(text)}}; }
CosValue cos_array(CosArray items) { return CosValue{std::move(items)}; }
CosValue cos_dict(CosDict entries) { return CosValue{std::move(entries)}; }
CosValue cos_stream(CosDict dict, Bytes data) {
    return CosValue{CosStream{std::move(dict), std::move(data)}};
}
CosValue cos_ref(std::int64_t number, std::int64_t generation) {
    return CosValue{CosRef{ObjectId{number, generation}}};
}

const CosValue* dict_get(const CosDict& d, std::string_view key) {
    for (const auto& e : d)
        if (e.key == key) return &e.value;
    return nullptr;
}

CosValue* dict_get(CosDict& d, std::string_view key) {
    for (auto& e : d)
        if (e.key == key) return &e.value;
    return nullptr;
}

void dict_set(CosDict& d, std::string_view key, CosValue value) {
    if (CosValue* existing = dict_get(d, key)) {
        *existing = std::move(value);
        return;
    }
    d.push_back({std::string(key), std::move(value)});
}

bool dict_remove(CosDict& d, std::string_view key) {
    auto it = std::remove_if(d.begin(), d.end(),
                             [&](const DictEntry& e) { return e.key == key; });
    bool removed = it != d.end();
    d.erase(it, d.end());
    return removed;
}

std::pair<CosValue, std::size_t> parse_value(std::span<const std::uint8_t> bytes,
                                             std::size_t offset) {
    Lexer lx{bytes, offset};
    CosValue v = parse_value_inner(lx);
    return {std::move(v), lx.pos};
}

const CosValue& resolve(const Document& doc, const CosValue& value) {
    const CosValue* cur = &value;
    std::set<ObjectId> seen;
    while (const ObjectId* id = cur->ref()) {
        if (!seen.insert(*id).second)
            throw Error(ErrorCode::ReferenceCycle,
                        "reference cycle through object " + std::to_string(id->number));
        auto it = doc.objects.find(*id);
        if (it == doc.objects.end())
            throw Error(ErrorCode::DanglingReference,
                        "reference to missing object " + std::to_string(id->number) + " " +
                            std::to_string(id->generation) + " R");
        cur = &it->second;
    }
    return *cur;
}

const CosValue* try_resolve(const Document& doc, const CosValue& value) {
    const CosValue* cur = &value;
    std::set<ObjectId> seen;
    while (const ObjectId* id = cur->ref()) {
        if (!seen.insert(*id).second) return nullptr;
        auto it = doc.objects.find(*id);
        if (it == doc.objects.end()) return nullptr;
        cur = &it->second;
    }
    return cur;
}

const CosValue& get_object(const Document& doc, ObjectId id) {
    auto it = doc.objects.find(id);
    if (it == doc.objects.end())
        throw Error(ErrorCode::DanglingReference,
                    "no object " + std::to_string(id.number) + " " +
                        std::to_string(id.generation));
    return it->second;
}

const CosValue* get_resolved(const Document& doc, const CosDict& d, std::string_view key) {
    const CosValue* v = dict_get(d, key);
    return v ? try_resolve(doc, *v) : nullptr;
}

std::optional<std::int64_t> get_int(const Document& doc, const CosDict& d,
                                    std::string_view key) {
    const CosValue* v = get_resolved(doc, d, key);
    return v ? v->integer() : std::nullopt;
}

const std::string* get_name(const Document& doc, const CosDict& d, std::string_view key) {
    const CosValue* v = get_resolved(doc, d, key);
    return v ? v->name() : nullptr;
}

const CosDict* get_dict(const Document& doc, const CosDict& d, std::string_view key) {
    const CosValue* v = get_resolved(doc, d, key);
    return v ? v->dict() : nullptr;
}

const CosArray* get_array(const Document& doc, const CosDict& d, std::string_view key) {
    const CosValue* v = get_resolved(doc, d, key);
    return v ? v->array() : nullptr;
}

const CosStream* get_stream(const Document& doc, const CosDict& d, std::string_view key) {
    const CosValue* v = get_resolved(doc, d, key);
    return v ? v->stream() : nullptr;
}

namespace {

struct XrefEntry {
    std::int64_t gen = 0;
    std::size_t offset = 0;
    char type = 'n';
};

struct ParseState {
    std::span<const std::uint8_t> bytes;
    std::map<std::int64_t, XrefEntry> entries;
    std::vector<RecoveryNote>* notes = nullptr;
    std::set<std::int64_t> in_progress;

    bool lenient() const { return notes != nullptr; }
    void note(std::string code, std::string message, std::size_t offset) {
        if (notes) notes->push_back({std::move(code), std::move(message), offset});
    }
};

std::size_t find_last(std::span<const std::uint8_t> hay, std::string_view needle) {
    if (needle.size() > hay.size()) return std::string::npos;
    const std::uint8_t* first = reinterpret_cast<const std::uint8_t*>(needle.data());
    for (std::size_t i = hay.size() - needle.size() + 1; i-- > 0;) {
        if (std::memcmp(hay.data() + i, first, needle.size()) == 0) return i;
    }
    return std::string::npos;
}

// Scans forward for `endstream` and returns the payload end (before the EOL
// preceding the keyword), or npos.
std::size_t scan_endstream(std::span<const std::uint8_t> bytes, std::size_t from,
                           std::size_t* keyword_at) {
    static const char kw[] = "endstream";
    for (std::size_t i = from; i + 9 <= bytes.size(); ++i) {
        if (std::memcmp(bytes.data() + i, kw, 9) != 0) continue;
        std::size_t end = i;
        if (end > from && bytes[end - 1] == '\n') --end;
        if (end > from && bytes[end - 1] == '\r') --end;
        *keyword_at = i;
        return end;
    }
    return std::string::npos;
}

bool stream_has_filter(const CosDict& d) { return dict_get(d, "Filter") != nullptr; }

void parse_object_at(ParseState& st, Document& doc, std::int64_t num);

std::int64_t resolve_stream_length(ParseState& st, Document& doc, const CosDict& d) {
    const CosValue* lv = dict_get(d, "Length");
    if (!lv) return -1;
    if (auto n = lv->integer()) return *n;
    if (const ObjectId* id = lv->ref()) {
        auto it = doc.objects.find(*id);
        if (it == doc.objects.end()) {
            if (!st.entries.count(id->number) || st.in_progress.count(id->number)) return -1;
            parse_object_at(st, doc, id->number);
            it = doc.objects.find(*id);
            if (it == doc.objects.end()) return -1;
        }
        if (auto n = it->second.integer()) return *n;
    }
    return -1;
}

void parse_object_at(ParseState& st, Document& doc, std::int64_t num) {
    const XrefEntry& entry = st.entries.at(num);
    ObjectId id{num, entry.gen};
    if (doc.objects.count(id)) return;
    st.in_progress.insert(num);

    Lexer lx{st.bytes, entry.offset};
    std::size_t header_at = entry.offset;
    bool header_ok = false;
    if (entry.offset < st.bytes.size()) {
        lx.skip_ws();
        header_at = lx.pos;
        std::string_view ntok = lx.run();
        lx.skip_ws();
        std::string_view gtok = lx.run();
        lx.skip_ws();
        std::string_view kw = lx.run();
        header_ok = plain_nonneg_int(ntok) && plain_nonneg_int(gtok) && kw == "obj" &&
                    parse_int_token(ntok, header_at) == num &&
                    parse_int_token(gtok, header_at) == entry.gen;
    }
    if (!header_ok) {
        if (!st.lenient())
            throw Error(ErrorCode::MalformedXref,
                        "xref offset for object " + std::to_string(num) +
                            " does not point at its header",
                        entry.offset);
        st.note("XREF_OFFSET",
                "xref offset for object " + std::to_string(num) +
                    " does not point at its header",
                entry.offset);
        // recover by scanning the file for the real header
        std::string needle = std::to_string(num) + " " + std::to_string(entry.gen) + " obj";
        std::size_t at = find_last(st.bytes, needle);
        if (at == std::string::npos ||
            (at > 0 && !is_ws(st.bytes[at - 1]))) {
            st.in_progress.erase(num);
            return;
        }
        lx.pos = at + needle.size();
        header_at = at;
    }

    CosValue value = parse_value_inner(lx);
    lx.skip_ws();
    std::size_t after_value = lx.pos;
    std::string_view kw = lx.run();
    if (kw == "stream") {
        CosDict* d = value.dict();
        if (!d)
            throw Error(ErrorCode::SyntaxError, "stream keyword after a non-dictionary",
                        after_value);
        if (stream_has_filter(*d)) {
            if (!st.lenient())
                throw Error(ErrorCode::UnsupportedFeature,
                            "filtered (compressed) streams are not supported", after_value);
            st.note("UNSUPPORTED_FILTER",
                    "object " + std::to_string(num) + " has a /Filter; payload kept raw",
                    after_value);
        }
        if (const std::string* t = dict_get(*d, "Type") ? dict_get(*d, "Type")->name() : nullptr;
            t && *t == "ObjStm") {
            if (!st.lenient())
                throw Error(ErrorCode::UnsupportedFeature, "object streams are not supported",
                            after_value);
            st.note("UNSUPPORTED_OBJSTM", "object " + std::to_string(num) + " is an object stream",
                    after_value);
        }
        if (!lx.skip_eol())
            throw Error(ErrorCode::SyntaxError, "missing newline after stream keyword", lx.pos);
        std::size_t data_start = lx.pos;
        std::int64_t length = resolve_stream_length(st, doc, *d);
        bool need_rescan = false;
        Bytes payload;
        if (length < 0 || data_start + static_cast<std::size_t>(length) > st.bytes.size()) {
            need_rescan = true;
        } else {
            lx.pos = data_start + static_cast<std::size_t>(length);
            std::size_t at_end = lx.pos;
            lx.skip_eol();
            lx.skip_ws();
            std::string_view endkw = lx.run();
            if (endkw == "endstream") {
                payload.assign(st.bytes.begin() + data_start, st.bytes.begin() + at_end);
            } else {
                need_rescan = true;
            }
        }
        if (need_rescan) {
            if (!st.lenient())
                throw Error(ErrorCode::SyntaxError,
                            "stream /Length for object " + std::to_string(num) +
                                " does not reach endstream",
                            data_start);
            std::size_t kw_at = 0;
            std::size_t end = scan_endstream(st.bytes, data_start, &kw_at);
            if (end == std::string::npos) {
                st.note("STREAM_LENGTH",
                        "object " + std::to_string(num) + " stream has no endstream", data_start);
                st.in_progress.erase(num);
                return;
            }
            st.note("STREAM_LENGTH",
                    "object " + std::to_string(num) +
                        " stream /Length does not match its payload",
                    data_start);
            payload.assign(st.bytes.begin() + data_start, st.bytes.begin() + end);
            lx.pos = kw_at + 9;
        }
        dict_set(*d, "Length", cos_int(static_cast<std::int64_t>(payload.size())));
        value = cos_stream(std::move(*d), std::move(payload));
        lx.skip_ws();
        kw = lx.run();
    }
    if (kw != "endobj") {
        if (!st.lenient())
            throw Error(ErrorCode::SyntaxError,
                        "missing endobj after object " + std::to_string(num), lx.pos);
        st.note("MISSING_ENDOBJ", "object " + std::to_string(num) + " is not closed by endobj",
                lx.pos);
    }

    doc.objects.emplace(id, std::move(value));
    doc.xref_offsets[id] = header_at;
    st.in_progress.erase(num);
}

// Finds where the object starting at `at` ends, so the lenient scanner can
// skip its payload instead of rescanning it. Falls back to a one-byte step
// on any parse failure.
std::size_t advance_past_object(ParseState& st, std::size_t at) {
    Lexer lx{st.bytes, at};
    lx.run();
    lx.skip_ws();
    lx.run();
    lx.skip_ws();
    lx.run();
    try {
        CosValue v = parse_value_inner(lx);
        lx.skip_ws();
        std::size_t save = lx.pos;
        std::string_view kw = lx.run();
        if (kw == "stream") {
            lx.skip_eol();
            std::size_t kw_at = 0;
            std::size_t end = scan_endstream(st.bytes, lx.pos, &kw_at);
            if (end == std::string::npos) return st.bytes.size();
            lx.pos = kw_at + 9;
            lx.skip_ws();
            kw = lx.run();
        }
        if (kw != "endobj") lx.pos = save;
        return lx.pos > at ? lx.pos : at + 1;
    } catch (const Error&) {
        return at + 1;
    }
}

// Scans the whole byte range for `<num> <gen> obj` headers. Used when the
// xref table is missing or unusable.
void scan_all_objects(ParseState& st, Document& doc) {
    std::size_t i = 0;
    const std::size_t n = st.bytes.size();
    while (i < n) {
        if (!is_digit(st.bytes[i]) || (i > 0 && !is_ws(st.bytes[i - 1]))) {
            ++i;
            continue;
        }
        Lexer lx{st.bytes, i};
        std::string_view ntok = lx.run();
        lx.skip_ws();
        std::string_view gtok = lx.run();
        lx.skip_ws();
        std::string_view kw = lx.run();
        if (!plain_nonneg_int(ntok) || !plain_nonneg_int(gtok) || kw != "obj") {
            ++i;
            continue;
        }
        std::int64_t num = parse_int_token(ntok, i);
        std::int64_t gen = parse_int_token(gtok, i);
        if (num < 1) {
            ++i;
            continue;
        }
        st.entries[num] = XrefEntry{gen, i, 'n'};
        try {
            doc.objects.erase(ObjectId{num, gen});
            doc.xref_offsets.erase(ObjectId{num, gen});
            parse_object_at(st, doc, num);
            i = advance_past_object(st, i);
        } catch (const Error&) {
            ++i;
        }
    }
}

struct XrefLoad {
    std::map<std::int64_t, XrefEntry> entries;
    CosDict trailer;
    bool have_trailer = false;
};

void load_xref_chain(ParseState& st, std::size_t start_offset, XrefLoad& out) {
    std::set<std::size_t> visited;
    std::size_t cur = start_offset;
    while (true) {
        if (!visited.insert(cur).second) {
            if (!st.lenient())
                throw Error(ErrorCode::MalformedXref, "cross-reference /Prev chain loops", cur);
            st.note("XREF_LOOP", "cross-reference /Prev chain loops", cur);
            return;
        }
        if (cur >= st.bytes.size())
            throw Error(ErrorCode::MalformedXref, "startxref points outside the file", cur);
        Lexer lx{st.bytes, cur};
        lx.skip_ws();
        if (lx.eof() || is_digit(lx.peek()))
            throw Error(ErrorCode::UnsupportedFeature,
                        "cross-reference streams are not supported", cur);
        std::size_t kw_at = lx.pos;
        if (lx.run() != "xref")
            throw Error(ErrorCode::MalformedXref, "expected xref keyword", kw_at);
        while (true) {
            lx.skip_ws();
            std::size_t tok_at = lx.pos;
            std::string_view tok = lx.run();
            if (tok == "trailer") break;
            if (!plain_nonneg_int(tok))
                throw Error(ErrorCode::MalformedXref, "bad cross-reference subsection header",
                            tok_at);
            std::int64_t first = parse_int_token(tok, tok_at);
            lx.skip_ws();
            std::size_t cnt_at = lx.pos;
            std::string_view cnt_tok = lx.run();
            if (!plain_nonneg_int(cnt_tok))
                throw Error(ErrorCode::MalformedXref, "bad cross-reference subsection header",
                            cnt_at);
            std::int64_t count = parse_int_token(cnt_tok, cnt_at);
            for (std::int64_t k = 0; k < count; ++k) {
                lx.skip_ws();
                std::size_t e_at = lx.pos;
                std::string_view off_tok = lx.run();
                lx.skip_ws();
                std::string_view gen_tok = lx.run();
                lx.skip_ws();
                std::string_view type_tok = lx.run();
                if (!plain_nonneg_int(off_tok) || !plain_nonneg_int(gen_tok) ||
                    (type_tok != "n" && type_tok != "f"))
                    throw Error(ErrorCode::MalformedXref, "bad cross-reference entry", e_at);
                std::int64_t num = first + k;
                XrefEntry entry{parse_int_token(gen_tok, e_at),
                                static_cast<std::size_t>(parse_int_token(off_tok, e_at)),
                                type_tok[0]};
                out.entries.emplace(num, entry);
            }
        }
        CosValue tdict = parse_value_inner(lx);
        const CosDict* td = tdict.dict();
        if (!td)
            throw Error(ErrorCode::MalformedXref, "trailer is not a dictionary", lx.pos);
        if (!out.have_trailer) {
            out.trailer = *td;
            out.have_trailer = true;
        }
        const CosValue* prev = dict_get(*td, "Prev");
        if (prev && prev->integer()) {
            cur = static_cast<std::size_t>(*prev->integer());
            continue;
        }
        return;
    }
}

Document parse_impl(std::span<const std::uint8_t> bytes, std::vector<RecoveryNote>* notes) {
    ParseState st{bytes, {}, notes, {}};
    if (bytes.empty()) throw Error(ErrorCode::SyntaxError, "empty input", 0);

    Document doc;
    static const char magic[] = "%PDF-";
    bool have_header = bytes.size() >= 5 && std::memcmp(bytes.data(), magic, 5) == 0;
    if (have_header) {
        std::size_t i = 5;
        while (i < bytes.size() && !is_ws(bytes[i])) ++i;
        doc.version.assign(bytes.begin() + 5, bytes.begin() + i);
    } else {
        if (!st.lenient()) throw Error(ErrorCode::SyntaxError, "missing %PDF header", 0);
        st.note("NO_HEADER", "file does not begin with %PDF-", 0);
    }

    XrefLoad xl;
    bool xref_usable = false;
    std::size_t sx = find_last(bytes, "startxref");
    if (sx == std::string::npos) {
        if (!st.lenient())
            throw Error(ErrorCode::MalformedXref, "missing startxref", bytes.size());
        st.note("NO_STARTXREF", "missing startxref keyword", bytes.size());
    } else {
        Lexer lx{bytes, sx + 9};
        lx.skip_ws();
        std::size_t off_at = lx.pos;
        std::string_view off_tok = lx.run();
        if (!plain_nonneg_int(off_tok)) {
            if (!st.lenient())
                throw Error(ErrorCode::MalformedXref, "bad startxref offset", off_at);
            st.note("BAD_STARTXREF", "startxref is not followed by an offset", off_at);
        } else {
            std::size_t xref_pos = static_cast<std::size_t>(parse_int_token(off_tok, off_at));
            try {
                load_xref_chain(st, xref_pos, xl);
                xref_usable = true;
            } catch (const Error& e) {
                if (!st.lenient()) throw;
                st.note(e.code() == ErrorCode::UnsupportedFeature ? "UNSUPPORTED_XREF"
                                                                  : "MALFORMED_XREF",
                        e.what(), e.has_offset() ? e.offset() : xref_pos);
            }
        }
    }

    if (xref_usable) {
        st.entries = xl.entries;
        doc.trailer = xl.trailer;
        for (const auto& [num, entry] : st.entries) {
            if (entry.type == 'f') {
                if (num != 0) doc.free_numbers.push_back(num);
                continue;
            }
            if (num < 1) {
                if (!st.lenient())
                    throw Error(ErrorCode::MalformedXref, "in-use entry for object 0",
                                entry.offset);
                st.note("MALFORMED_XREF", "in-use entry for object 0", entry.offset);
                continue;
            }
            parse_object_at(st, doc, num);
        }
    } else {
        if (!st.lenient())
            throw Error(ErrorCode::MalformedXref, "no usable cross-reference table", 0);
        scan_all_objects(st, doc);
        std::size_t tr = find_last(bytes, "trailer");
        bool trailer_ok = false;
        if (tr != std::string::npos) {
            try {
                Lexer lx{bytes, tr + 7};
                CosValue tdict = parse_value_inner(lx);
                if (const CosDict* td = tdict.dict()) {
                    doc.trailer = *td;
                    trailer_ok = true;
                }
            } catch (const Error&) {
            }
        }
        if (!trailer_ok) {
            st.note("NO_TRAILER", "trailer dictionary is missing; reconstructed", bytes.size());
            for (const auto& [id, v] : doc.objects) {
                const CosDict* d = v.dict();
                if (!d) continue;
                const CosValue* t = dict_get(*d, "Type");
                if (t && t->name() && *t->name() == "Catalog") {
                    doc.trailer.push_back({"Root", cos_ref(id.number, id.generation)});
                    break;
                }
            }
            doc.trailer.push_back({"Size", cos_int(max_object_number(doc) + 1)});
        }
    }

    std::sort(doc.free_numbers.begin(), doc.free_numbers.end());
    doc.free_numbers.erase(std::unique(doc.free_numbers.begin(), doc.free_numbers.end()),
                           doc.free_numbers.end());
    return doc;
}

} // namespace

Document parse_document(std::span<const std::uint8_t> bytes) {
    return parse_impl(bytes, nullptr);
}

Document parse_document_lenient(std::span<const std::uint8_t> bytes,
                                std::vector<RecoveryNote>& notes) {
    return parse_impl(bytes, &notes);
}

namespace {

void append(Bytes& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

void append_int(Bytes& out, std::int64_t n) { append(out, std::to_string(n)); }

void append_real(Bytes& out, double d) {
    if (!std::isfinite(d)) {
        append(out, "0.0");
        return;
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::fixed);
    std::string_view s(buf, static_cast<std::size_t>(ptr - buf));
    append(out, s);
    if (s.find('.') == std::string_view::npos) append(out, ".0");
}

void append_value(Bytes& out, const CosValue& v);

void append_dict(Bytes& out, const CosDict& d) {
    append(out, "<<");
    bool first = true;
    std::vector<std::string_view> seen;
    for (const auto& e : d) {
        if (std::find(seen.begin(), seen.end(), e.key) != seen.end()) continue;
        seen.push_back(e.key);
        if (!first) out.push_back(' ');
        first = false;
        out.push_back('/');
        append(out, encode_name(e.key));
        out.push_back(' ');
        append_value(out, e.value);
    }
    append(out, ">>");
}

void append_value(Bytes& out, const CosValue& v) {
    if (v.is_null()) {
        append(out, "null");
    } else if (auto b = v.boolean()) {
        append(out, *b ? "true" : "false");
    } else if (auto n = v.integer()) {
        append_int(out, *n);
    } else if (std::holds_alternative<double>(v.v)) {
        append_real(out, std::get<double>(v.v));
    } else if (const Bytes* lit = v.literal()) {
        out.push_back('(');
        Bytes escaped = encode_literal(std::span<const std::uint8_t>(lit->data(), lit->size()));
        out.insert(out.end(), escaped.begin(), escaped.end());
        out.push_back(')');
    } else if (const Bytes* hx = v.hex_bytes()) {
        static const char hexchars[] = "0123456789ABCDEF";
        out.push_back('<');
        for (std::uint8_t b : *hx) {
            out.push_back(hexchars[b >> 4]);
            out.push_back(hexchars[b & 0xF]);
        }
        out.push_back('>');
    } else if (const std::string* nm = v.name()) {
        out.push_back('/');
        append(out, encode_name(*nm));
    } else if (const CosArray* arr = v.array()) {
        out.push_back('[');
        for (std::size_t i = 0; i < arr->size(); ++i) {
            if (i) out.push_back(' ');
            append_value(out, (*arr)[i]);
        }
        out.push_back(']');
    } else if (const CosDict* d = v.dict()) {
        append_dict(out, *d);
    } else if (const ObjectId* id = v.ref()) {
        append_int(out, id->number);
        append(out, " 0 R");
    } else if (v.stream()) {
        throw Error(ErrorCode::SyntaxError, "stream nested inside another value");
    }
}

} // namespace

Bytes serialize_value(const CosValue& value) {
    Bytes out;
    append_value(out, value);
    return out;
}

Bytes serialize_document(const Document& doc) {
    Bytes out;
    append(out, "%PDF-");
    append(out, doc.version);
    out.push_back('\n');
    out.push_back('%');
    for (std::uint8_t b : {0xE2, 0xE3, 0xCF, 0xD3}) out.push_back(b);
    out.push_back('\n');

    // newest generation wins when a number was recorded more than once
    std::map<std::int64_t, const CosValue*> by_number;
    for (const auto& [id, v] : doc.objects) by_number[id.number] = &v;

    std::map<std::int64_t, std::size_t> offsets;
    for (const auto& [num, vp] : by_number) {
        offsets[num] = out.size();
        append_int(out, num);
        append(out, " 0 obj\n");
        if (const CosStream* s = vp->stream()) {
            CosDict d = s->dict;
            dict_set(d, "Length", cos_int(static_cast<std::int64_t>(s->data.size())));
            append_dict(out, d);
            append(out, "\nstream\n");
            out.insert(out.end(), s->data.begin(), s->data.end());
            append(out, "\nendstream\nendobj\n");
        } else {
            append_value(out, *vp);
            append(out, "\nendobj\n");
        }
    }

    std::size_t xref_at = out.size();
    append(out, "xref\n");
    std::vector<std::int64_t> nums;
    nums.push_back(0);
    for (const auto& [num, vp] : by_number) nums.push_back(num);
    std::size_t i = 0;
    char entry[32];
    while (i < nums.size()) {
        std::size_t j = i + 1;
        while (j < nums.size() && nums[j] == nums[j - 1] + 1) ++j;
        append_int(out, nums[i]);
        out.push_back(' ');
        append_int(out, static_cast<std::int64_t>(j - i));
        out.push_back('\n');
        for (std::size_t k = i; k < j; ++k) {
            if (nums[k] == 0)
                std::snprintf(entry, sizeof entry, "0000000000 65535 f \n");
            else
                std::snprintf(entry, sizeof entry, "%010zu 00000 n \n", offsets[nums[k]]);
            append(out, entry);
        }
        i = j;
    }

    CosDict trailer = doc.trailer;
    dict_remove(trailer, "Prev");
    dict_remove(trailer, "XRefStm");
    dict_set(trailer, "Size", cos_int(by_number.empty() ? 1 : by_number.rbegin()->first + 1));
    append(out, "trailer\n");
    append_dict(out, trailer);
    append(out, "\nstartxref\n");
    append_int(out, static_cast<std::int64_t>(xref_at));
    append(out, "\n%%EOF\n");
    return out;
}

bool structurally_equal(const Document& a, const Document& b) {
    if (a.version != b.version) return false;
    if (a.objects.size() != b.objects.size()) return false;
    auto ia = a.objects.begin();
    auto ib = b.objects.begin();
    for (; ia != a.objects.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        if (!(ia->second == ib->second)) return false;
    }
    CosDict ta = a.trailer;
    CosDict tb = b.trailer;
    for (CosDict* t : {&ta, &tb}) {
        dict_remove(*t, "Prev");
        dict_remove(*t, "XRefStm");
    }
    return ta == tb;
}

std::int64_t max_object_number(const Document& doc) {
    std::int64_t m = 0;
    for (const auto& [id, v] : doc.objects) m = std::max(m, id.number);
    for (std::int64_t n : doc.free_numbers) m = std::max(m, n);
    return m;
}

ObjectId next_object_id(const Document& doc) { return ObjectId{max_object_number(doc) + 1, 0}; }

const CosDict* catalog(const Document& doc) {
    const CosValue* root = dict_get(doc.trailer, "Root");
    if (!root) return nullptr;
    const CosValue* v = try_resolve(doc, *root);
    return v ? v->dict() : nullptr;
}

namespace {

void collect_pages(const Document& doc, const CosValue& node_ref, std::vector<ObjectId>& out,
                   std::set<ObjectId>& seen) {
    const ObjectId* id = node_ref.ref();
    if (!id || !seen.insert(*id).second) return;
    const CosValue* node = try_resolve(doc, node_ref);
    if (!node) return;
    const CosDict* d = node->dict();
    if (!d) return;
    const std::string* type = get_name(doc, *d, "Type");
    if (type && *type == "Page") {
        out.push_back(*id);
        return;
    }
    const CosArray* kids = get_array(doc, *d, "Kids");
    if (!kids) return;
    for (const CosValue& kid : *kids) collect_pages(doc, kid, out, seen);
}

} // namespace

std::vector<ObjectId> page_ids(const Document& doc) {
    std::vector<ObjectId> out;
    const CosDict* cat = catalog(doc);
    if (!cat) return out;
    const CosValue* pages = dict_get(*cat, "Pages");
    if (!pages) return out;
    std::set<ObjectId> seen;
    collect_pages(doc, *pages, out, seen);
    return out;
}

const CosValue* page_attr(const Document& doc, ObjectId page, std::string_view key) {
    std::set<ObjectId> seen;
    ObjectId cur = page;
    while (seen.insert(cur).second) {
        auto it = doc.objects.find(cur);
        if (it == doc.objects.end()) return nullptr;
        const CosDict* d = it->second.dict();
        if (!d) return nullptr;
        if (const CosValue* v = dict_get(*d, key)) return v;
        const CosValue* parent = dict_get(*d, "Parent");
        if (!parent || !parent->ref()) return nullptr;
        cur = *parent->ref();
    }
    return nullptr;
}

Bytes page_content(const Document& doc, ObjectId page) {
    Bytes out;
    auto it = doc.objects.find(page);
    if (it == doc.objects.end()) return out;
    const CosDict* d = it->second.dict();
    if (!d) return out;
    const CosValue* contents = dict_get(*d, "Contents");
    if (!contents) return out;
    const CosValue* cv = try_resolve(doc, *contents);
    if (!cv) return out;
    auto add_stream = [&](const CosValue& v) {
        if (const CosStream* s = v.stream()) {
            if (!out.empty()) out.push_back('\n');
            out.insert(out.end(), s->data.begin(), s->data.end());
        }
    };
    if (const CosArray* arr = cv->array()) {
        for (const CosValue& part : *arr) {
            if (const CosValue* pv = try_resolve(doc, part)) add_stream(*pv);
        }
    } else {
        add_stream(*cv);
    }
    return out;
}

void set_page_content(Document& doc, ObjectId page, Bytes data) {
    auto it = doc.objects.find(page);
    if (it == doc.objects.end())
        throw Error(ErrorCode::DanglingReference, "no page object " + std::to_string(page.number));
    CosDict* d = it->second.dict();
    if (!d) throw Error(ErrorCode::SyntaxError, "page is not a dictionary");
    if (const CosValue* contents = dict_get(*d, "Contents")) {
        if (const ObjectId* cid = contents->ref()) {
            auto cit = doc.objects.find(*cid);
            if (cit != doc.objects.end()) {
                if (CosStream* s = cit->second.stream()) {
                    s->data = std::move(data);
                    return;
                }
            }
        }
    }
    ObjectId sid = next_object_id(doc);
    doc.objects.emplace(sid, cos_stream(CosDict{}, std::move(data)));
    dict_set(*d, "Contents", cos_ref(sid.number));
}

} // namespace mathtag
