// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "mathtag/cos.hpp"

namespace mathtag {

// Raw payload bytes carried by a fake-space /ActualText: CR-framed
// <latex>/<content> delimiter lines around the source.
Bytes opening_payload(std::string_view latex);
Bytes closing_payload();

// The same payloads rendered as literal-string bodies (\015, \134, ...).
Bytes encode_opening(std::string_view latex);
Bytes encode_closing();

struct AccessTagPayload {
    enum class Kind { Opening, Closing };
    Kind kind = Kind::Closing;
    std::string latex; // Opening only

    friend bool operator==(const AccessTagPayload&, const AccessTagPayload&) = default;
};

// Recognizes a decoded /ActualText as an access-tag payload; nullopt for
// unrelated text. Throws MalformedDelimiters when an opening payload lacks
// its closing delimiter lines.
std::optional<AccessTagPayload> decode_payload(const TextString& actual_text);

struct InjectTarget {
    enum class Kind { Structure, Resource, Range };
    Kind kind = Kind::Structure;
    ObjectId element;     // Structure: the formula element
    std::string resource; // Resource: named /AF wrapper
    ObjectId page;        // Range
    std::int64_t first_mcid = -1;
    std::int64_t last_mcid = -1;

    static InjectTarget structure(ObjectId elem);
    static InjectTarget named_resource(std::string name);
    static InjectTarget mcid_range(ObjectId page, std::int64_t first, std::int64_t last);
};

struct InjectOptions {
    std::string tag = "AccessTag"; // /Span works as well
    std::string struct_role = "accesstag";
    bool update_role_map = true;
    std::string font; // page font resource name; first page font when empty
};

struct InjectResult {
    ObjectId page;
    std::optional<std::int64_t> opening_mcid;
    std::optional<std::int64_t> closing_mcid;
    std::optional<ObjectId> opening_elem;
    std::optional<ObjectId> closing_elem;
};

InjectResult inject_access_tags(Document& doc, const InjectTarget& target,
                                std::string_view latex, const InjectOptions& options = {});

} // namespace mathtag
