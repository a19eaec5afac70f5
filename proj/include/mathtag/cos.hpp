// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mathtag/text_codec.hpp"

namespace mathtag {

struct ObjectId {
    std::int64_t number = 0;
    std::int64_t generation = 0;

    friend bool operator==(const ObjectId&, const ObjectId&) = default;
    friend auto operator<=>(const ObjectId&, const ObjectId&) = default;
};

struct CosValue;

struct CosNull {
    friend bool operator==(const CosNull&, const CosNull&) { return true; }
};

struct CosLiteralString {
    Bytes bytes;
    friend bool operator==(const CosLiteralString&, const CosLiteralString&) = default;
};

struct CosHexString {
    Bytes bytes;
    friend bool operator==(const CosHexString&, const CosHexString&) = default;
};

struct CosName {
    std::string text;
    friend bool operator==(const CosName&, const CosName&) = default;
};

struct CosRef {
    ObjectId id;
    friend bool operator==(const CosRef&, const CosRef&) = default;
};

using CosArray = std::vector<CosValue>;

struct DictEntry;
using CosDict = std::vector<DictEntry>;

struct CosStream {
    CosDict dict;
    Bytes data;
};

struct CosValue {
    std::variant<CosNull, bool, std::int64_t, double, CosLiteralString, CosHexString,
                 CosName, CosArray, CosDict, CosStream, CosRef>
        v;

    bool is_null() const { return std::holds_alternative<CosNull>(v); }
    std::optional<bool> boolean() const;
    std::optional<std::int64_t> integer() const;
    std::optional<double> number() const;
    const Bytes* literal() const;
    const Bytes* hex_bytes() const;
    const std::string* name() const;
    const CosArray* array() const;
    CosArray* array();
    const CosDict* dict() const;
    CosDict* dict();
    const CosStream* stream() const;
    CosStream* stream();
    const ObjectId* ref() const;
};

struct DictEntry {
    std::string key;
    CosValue value;
};

bool operator==(const CosValue& a, const CosValue& b);
inline bool operator!=(const CosValue& a, const CosValue& b) { return !(a == b); }
bool operator==(const DictEntry& a, const DictEntry& b);
bool operator==(const CosStream& a, const CosStream& b);

CosValue cos_null();
CosValue cos_bool(bool b);
CosValue cos_int(std::int64_t n);
CosValue cos_real(double d);
CosValue cos_literal(Bytes bytes);
CosValue cos_literal(std::string_view text);
CosValue cos_hex(Bytes bytes);
CosValue cos_name(std::string text);
CosValue cos_array(CosArray items);
CosValue cos_dict(CosDict entries);
CosValue cos_stream(CosDict dict, Bytes data);
CosValue cos_ref(std::int64_t number, std::int64_t generation = 0);

// First occurrence wins on lookup; later duplicates stay in the model.
const CosValue* dict_get(const CosDict& d, std::string_view key);
CosValue* dict_get(CosDict& d, std::string_view key);
// Replaces the first occurrence or appends.
void dict_set(CosDict& d, std::string_view key, CosValue value);
// Removes every occurrence; returns true if any was present.
bool dict_remove(CosDict& d, std::string_view key);

struct Document {
    std::map<ObjectId, CosValue> objects;
    CosDict trailer;
    std::map<ObjectId, std::size_t> xref_offsets;
    std::vector<std::int64_t> free_numbers;
    std::string version = "1.7";
};

Document parse_document(std::span<const std::uint8_t> bytes);

// A repair applied or a problem noticed while parsing in lenient mode.
struct RecoveryNote {
    std::string code;
    std::string message;
    std::size_t offset = 0;
};

// Best-effort parse for the validator: records what the strict parser would
// reject and keeps going where the file structure allows it.
Document parse_document_lenient(std::span<const std::uint8_t> bytes,
                                std::vector<RecoveryNote>& notes);

std::pair<CosValue, std::size_t> parse_value(std::span<const std::uint8_t> bytes,
                                             std::size_t offset);

const CosValue& resolve(const Document& doc, const CosValue& value);
const CosValue* try_resolve(const Document& doc, const CosValue& value);
const CosValue& get_object(const Document& doc, ObjectId id);

// dict_get plus reference chasing; nullptr when absent or unresolvable.
const CosValue* get_resolved(const Document& doc, const CosDict& d, std::string_view key);
std::optional<std::int64_t> get_int(const Document& doc, const CosDict& d, std::string_view key);
const std::string* get_name(const Document& doc, const CosDict& d, std::string_view key);
const CosDict* get_dict(const Document& doc, const CosDict& d, std::string_view key);
const CosArray* get_array(const Document& doc, const CosDict& d, std::string_view key);
const CosStream* get_stream(const Document& doc, const CosDict& d, std::string_view key);

Bytes serialize_document(const Document& doc);
Bytes serialize_value(const CosValue& value);

// Object-for-object comparison that ignores what the writer normalizes away
// (xref offsets, free list, /Prev and /XRefStm in the trailer).
bool structurally_equal(const Document& a, const Document& b);

std::int64_t max_object_number(const Document& doc);
ObjectId next_object_id(const Document& doc);

const CosDict* catalog(const Document& doc);
std::vector<ObjectId> page_ids(const Document& doc);
// Page attribute with /Parent inheritance (/Resources, /MediaBox, ...).
const CosValue* page_attr(const Document& doc, ObjectId page, std::string_view key);
// Concatenated /Contents payload; parts joined with a newline.
Bytes page_content(const Document& doc, ObjectId page);
// Replaces the page /Contents payload, reusing a single existing stream
// object where possible.
void set_page_content(Document& doc, ObjectId page, Bytes data);

} // namespace mathtag
