// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathtag/cos.hpp"

namespace mathtag {

enum class AfRelationship { Source, Supplement, Data, Alternative, Unspecified };

const char* af_relationship_name(AfRelationship r);
std::optional<AfRelationship> af_relationship_from(std::string_view name);

struct AssociationTarget {
    enum class Kind { Document, Page, ContentSpan, Structure, XObject, Annotation };
    Kind kind = Kind::Document;
    ObjectId object;      // Page / Structure / XObject
    std::string resource; // ContentSpan property name

    friend bool operator==(const AssociationTarget&, const AssociationTarget&) = default;
};

struct EmbedOptions {
    std::string name;
    std::string desc;
    AfRelationship relationship = AfRelationship::Unspecified;
    std::string mime;     // e.g. application/x-tex
    std::string mod_date; // PDF date text, caller-supplied
};

// Creates the /EmbeddedFile stream and /Filespec pair, registers the name in
// the /Names -> /EmbeddedFiles tree. Returns the Filespec id.
ObjectId embed_file(Document& doc, std::span<const std::uint8_t> payload,
                    const EmbedOptions& options);

void associate(Document& doc, const std::vector<ObjectId>& filespecs,
               const AssociationTarget& target);

// Appends the refs (deduplicated) to the /MarkInfo -> /AF registry.
void register_associated_files(Document& doc, const std::vector<ObjectId>& filespecs);

// Wraps the page's content ops [first_op, last_op] in `/AF /<name> BDC .. EMC`.
void wrap_content_span(Document& doc, ObjectId page, const std::string& name,
                       std::size_t first_op, std::size_t last_op);

struct AttachmentInfo {
    std::string name;
    ObjectId filespec;
    std::string desc;
    std::optional<AfRelationship> relationship;
    std::string subtype;
    std::int64_t declared_size = -1; // /Params /Size
    std::int64_t payload_size = -1;
    std::string declared_checksum; // 32 hex chars as stored
    bool checksum_ok = false;
    bool size_ok = false;
    bool registered = false; // listed in /MarkInfo /AF
    std::vector<AssociationTarget> targets;
};

std::vector<AttachmentInfo> list_attachments(const Document& doc);

struct ExtractedAttachment {
    Bytes payload;
    AttachmentInfo info;
};

ExtractedAttachment extract_attachment(const Document& doc, std::string_view name);

// (name, Filespec id) pairs from the /Names -> /EmbeddedFiles tree, in tree
// order.
std::vector<std::pair<std::string, ObjectId>> embedded_file_entries(const Document& doc);

} // namespace mathtag
