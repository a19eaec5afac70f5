// SPDX-License-Identifier: Apache-2.0

#include "mathtag/attachments.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mathtag/content_stream.hpp"
#include "mathtag/errors.hpp"
#include "mathtag/md5.hpp"
#include "mathtag/structure_tree.hpp"

namespace mathtag {

const char* af_relationship_name(AfRelationship r) {
    switch (r) {
    case AfRelationship::Source: return "Source";
    case AfRelationship::Supplement: return "Supplement";
    case AfRelationship::Data: return "Data";
    case AfRelationship::Alternative: return "Alternative";
    case AfRelationship::Unspecified: return "Unspecified";
    }
    return "Unspecified";
}

std::optional<AfRelationship> af_relationship_from(std::string_view name) {
    if (name == "Source") return AfRelationship::Source;
    if (name == "Supplement") return AfRelationship::Supplement;
    if (name == "Data") return AfRelationship::Data;
    if (name == "Alternative") return AfRelationship::Alternative;
    if (name == "Unspecified") return AfRelationship::Unspecified;
    return std::nullopt;
}

namespace {

ObjectId require_catalog_id(const Document& doc) {
    const CosValue* root = dict_get(doc.trailer, "Root");
    if (!root || !root->ref())
        throw Error(ErrorCode::SyntaxError, "trailer has no /Root reference");
    return *root->ref();
}

CosDict* mutable_dict_object(Document& doc, ObjectId id, const char* what) {
    auto it = doc.objects.find(id);
    if (it == doc.objects.end())
        throw Error(ErrorCode::DanglingReference,
                    std::string(what) + " object " + std::to_string(id.number) + " missing");
    CosDict* d = it->second.dict();
    if (!d)
        throw Error(ErrorCode::SyntaxError, std::string(what) + " is not a dictionary");
    return d;
}

CosDict* mutable_catalog(Document& doc) {
    return mutable_dict_object(doc, require_catalog_id(doc), "catalog");
}

// Dictionary-valued slot, chased through one reference; created as a direct
// dictionary when absent. May append to `owner` before the pointer is taken,
// so take inner pointers strictly outside-in.
CosDict* ensure_dict_slot(Document& doc, CosDict& owner, std::string_view key) {
    CosValue* v = dict_get(owner, key);
    if (!v) {
        dict_set(owner, key, cos_dict({}));
        return dict_get(owner, key)->dict();
    }
    if (const ObjectId* id = v->ref())
        return mutable_dict_object(doc, *id, std::string(key).c_str());
    if (CosDict* d = v->dict()) return d;
    throw Error(ErrorCode::SyntaxError, "/" + std::string(key) + " is not a dictionary");
}

bool name_string_bytes(const CosValue& v, Bytes& out) {
    if (const Bytes* b = v.literal()) {
        out = *b;
        return true;
    }
    if (const Bytes* b = v.hex_bytes()) {
        out = *b;
        return true;
    }
    return false;
}

std::string utf8_of_string(const CosValue& v) {
    if (const Bytes* b = v.literal()) return to_utf8(decode_text(*b, StringOrigin::Literal).text);
    if (const Bytes* b = v.hex_bytes()) return to_utf8(decode_text(*b, StringOrigin::Hex).text);
    return {};
}

const CosDict* embedded_files_node(const Document& doc) {
    const CosDict* cat = catalog(doc);
    if (!cat) return nullptr;
    const CosDict* names = get_dict(doc, *cat, "Names");
    if (!names) return nullptr;
    return get_dict(doc, *names, "EmbeddedFiles");
}

void collect_leaf_entries(const Document& doc, const CosDict& node,
                          std::vector<std::pair<std::string, ObjectId>>& out) {
    const CosArray* names = get_array(doc, node, "Names");
    if (!names) return;
    for (std::size_t i = 0; i + 1 < names->size(); i += 2) {
        Bytes raw;
        if (!name_string_bytes((*names)[i], raw)) continue;
        const ObjectId* id = (*names)[i + 1].ref();
        if (!id) continue;
        out.emplace_back(std::string(raw.begin(), raw.end()), *id);
    }
}

CosValue name_tree_value(const std::vector<std::pair<std::string, ObjectId>>& entries) {
    CosArray flat;
    flat.reserve(entries.size() * 2);
    for (const auto& [name, id] : entries) {
        flat.push_back(cos_literal(name));
        flat.push_back(cos_ref(id.number));
    }
    CosDict node;
    dict_set(node, "Names", cos_array(std::move(flat)));
    return cos_dict(std::move(node));
}

constexpr std::size_t kFlatNameLimit = 1024;

// Rewrites the /EmbeddedFiles node from the full sorted entry list: flat
// /Names array up to the limit, a two-level /Kids tree beyond it.
void write_name_tree(Document& doc, std::vector<std::pair<std::string, ObjectId>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    CosDict* cat = mutable_catalog(doc);
    CosDict* names = ensure_dict_slot(doc, *cat, "Names");
    CosDict* ef = ensure_dict_slot(doc, *names, "EmbeddedFiles");

    if (entries.size() <= kFlatNameLimit) {
        CosValue node = name_tree_value(entries);
        dict_remove(*ef, "Kids");
        dict_set(*ef, "Names", std::move(*dict_get(*node.dict(), "Names")));
        return;
    }

    CosArray kids;
    for (std::size_t at = 0; at < entries.size(); at += kFlatNameLimit) {
        std::size_t end = std::min(at + kFlatNameLimit, entries.size());
        std::vector<std::pair<std::string, ObjectId>> chunk(entries.begin() + at,
                                                            entries.begin() + end);
        CosValue node = name_tree_value(chunk);
        CosDict* nd = node.dict();
        CosArray limits;
        limits.push_back(cos_literal(chunk.front().first));
        limits.push_back(cos_literal(chunk.back().first));
        dict_set(*nd, "Limits", cos_array(std::move(limits)));
        ObjectId kid = next_object_id(doc);
        doc.objects.emplace(kid, std::move(node));
        kids.push_back(cos_ref(kid.number));
    }
    dict_remove(*ef, "Names");
    dict_set(*ef, "Kids", cos_array(std::move(kids)));
}

void validate_filespec(const Document& doc, ObjectId id) {
    const CosValue& v = get_object(doc, id);
    const CosDict* d = v.dict();
    if (!d)
        throw Error(ErrorCode::NotAFilespec,
                    "object " + std::to_string(id.number) + " is not a dictionary");
    const std::string* type = get_name(doc, *d, "Type");
    if (!type || *type != "Filespec")
        throw Error(ErrorCode::NotAFilespec,
                    "object " + std::to_string(id.number) + " has no /Type /Filespec");
}

// /AF slot on a dictionary: direct array or reference to an array object.
CosArray* ensure_af_array(Document& doc, CosDict& owner) {
    CosValue* v = dict_get(owner, "AF");
    if (!v) {
        dict_set(owner, "AF", cos_array({}));
        return dict_get(owner, "AF")->array();
    }
    if (const ObjectId* id = v->ref()) {
        auto it = doc.objects.find(*id);
        if (it == doc.objects.end())
            throw Error(ErrorCode::DanglingReference,
                        "/AF target " + std::to_string(id->number) + " missing");
        if (CosArray* arr = it->second.array()) return arr;
        throw Error(ErrorCode::SyntaxError, "/AF target is not an array");
    }
    if (CosArray* arr = v->array()) return arr;
    throw Error(ErrorCode::SyntaxError, "/AF is not an array");
}

void append_af_refs(Document& doc, CosDict& owner, const std::vector<ObjectId>& refs) {
    CosArray* arr = ensure_af_array(doc, owner);
    for (ObjectId fs : refs) {
        bool present = std::any_of(arr->begin(), arr->end(), [&](const CosValue& v) {
            return v.ref() && *v.ref() == fs;
        });
        if (!present) arr->push_back(cos_ref(fs.number));
    }
}

// Nearest own or inherited /Resources dictionary, made mutable; created on
// the page itself when the chain has none.
CosDict* ensure_resources(Document& doc, ObjectId page) {
    ObjectId at = page;
    std::set<ObjectId> seen;
    while (seen.insert(at).second) {
        CosDict* d = mutable_dict_object(doc, at, "page");
        if (dict_get(*d, "Resources")) return ensure_dict_slot(doc, *d, "Resources");
        const CosValue* parent = dict_get(*d, "Parent");
        if (!parent || !parent->ref()) break;
        at = *parent->ref();
    }
    CosDict* d = mutable_dict_object(doc, page, "page");
    return ensure_dict_slot(doc, *d, "Resources");
}

std::int64_t declared_size_of(const Document& doc, const CosDict& params) {
    const CosValue* v = get_resolved(doc, params, "Size");
    if (!v) return -1;
    if (auto n = v->integer()) return *n;
    // Some producers write /Size as a digit string.
    Bytes raw;
    if (name_string_bytes(*v, raw) && !raw.empty()) {
        std::int64_t n = 0;
        for (std::uint8_t b : raw) {
            if (b < '0' || b > '9') return -1;
            n = n * 10 + (b - '0');
        }
        return n;
    }
    return -1;
}

std::string upper_hex(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string declared_checksum_of(const Document& doc, const CosDict& params) {
    const CosValue* v = get_resolved(doc, params, "CheckSum");
    if (!v) return {};
    if (const Bytes* b = v->literal()) return std::string(b->begin(), b->end());
    if (const Bytes* b = v->hex_bytes()) {
        static const char* digits = "0123456789ABCDEF";
        std::string out;
        for (std::uint8_t byte : *b) {
            out.push_back(digits[byte >> 4]);
            out.push_back(digits[byte & 0xF]);
        }
        return out;
    }
    return {};
}

struct PayloadFacts {
    const CosStream* stream = nullptr;
    std::int64_t declared_size = -1;
    std::string declared_checksum;
    std::string subtype;
};

PayloadFacts payload_facts(const Document& doc, const CosDict& filespec) {
    PayloadFacts facts;
    const CosDict* ef = get_dict(doc, filespec, "EF");
    if (!ef) return facts;
    facts.stream = get_stream(doc, *ef, "F");
    if (!facts.stream) return facts;
    if (const std::string* st = get_name(doc, facts.stream->dict, "Subtype"))
        facts.subtype = *st;
    if (const CosDict* params = get_dict(doc, facts.stream->dict, "Params")) {
        facts.declared_size = declared_size_of(doc, *params);
        facts.declared_checksum = declared_checksum_of(doc, *params);
    }
    return facts;
}

std::set<ObjectId> registry_set(const Document& doc) {
    std::set<ObjectId> out;
    const CosDict* cat = catalog(doc);
    if (!cat) return out;
    const CosDict* mark = get_dict(doc, *cat, "MarkInfo");
    if (!mark) return out;
    const CosArray* af = get_array(doc, *mark, "AF");
    if (!af) return out;
    for (const CosValue& v : *af)
        if (v.ref()) out.insert(*v.ref());
    return out;
}

void add_target(std::map<ObjectId, std::vector<AssociationTarget>>& index, ObjectId fs,
                AssociationTarget target) {
    auto& list = index[fs];
    if (std::find(list.begin(), list.end(), target) == list.end())
        list.push_back(std::move(target));
}

void collect_af_targets(const Document& doc, const CosDict& owner, AssociationTarget target,
                        std::map<ObjectId, std::vector<AssociationTarget>>& index) {
    const CosArray* af = get_array(doc, owner, "AF");
    if (!af) return;
    for (const CosValue& v : *af)
        if (v.ref()) add_target(index, *v.ref(), target);
}

std::map<ObjectId, std::vector<AssociationTarget>> scan_targets(const Document& doc) {
    std::map<ObjectId, std::vector<AssociationTarget>> index;
    if (const CosDict* cat = catalog(doc)) {
        AssociationTarget t;
        t.kind = AssociationTarget::Kind::Document;
        collect_af_targets(doc, *cat, t, index);
    }
    for (ObjectId page : page_ids(doc)) {
        const CosDict* pd = get_object(doc, page).dict();
        if (!pd) continue;
        AssociationTarget pt;
        pt.kind = AssociationTarget::Kind::Page;
        pt.object = page;
        collect_af_targets(doc, *pd, pt, index);

        const CosValue* res = page_attr(doc, page, "Resources");
        const CosDict* rd = res ? (try_resolve(doc, *res) ? try_resolve(doc, *res)->dict()
                                                          : nullptr)
                                : nullptr;
        if (!rd) continue;
        if (const CosDict* props = get_dict(doc, *rd, "Properties")) {
            for (const DictEntry& entry : *props) {
                const CosValue* v = try_resolve(doc, entry.value);
                if (!v) continue;
                AssociationTarget ct;
                ct.kind = AssociationTarget::Kind::ContentSpan;
                ct.object = page;
                ct.resource = entry.key;
                if (const CosArray* arr = v->array()) {
                    for (const CosValue& item : *arr)
                        if (item.ref()) add_target(index, *item.ref(), ct);
                } else if (entry.value.ref() && v->dict() &&
                           get_name(doc, *v->dict(), "Type") &&
                           *get_name(doc, *v->dict(), "Type") == "Filespec") {
                    add_target(index, *entry.value.ref(), ct);
                }
            }
        }
        if (const CosDict* xo = get_dict(doc, *rd, "XObject")) {
            for (const DictEntry& entry : *xo) {
                if (!entry.value.ref()) continue;
                const CosValue* v = try_resolve(doc, entry.value);
                if (!v || !v->stream()) continue;
                AssociationTarget xt;
                xt.kind = AssociationTarget::Kind::XObject;
                xt.object = *entry.value.ref();
                collect_af_targets(doc, v->stream()->dict, xt, index);
            }
        }
    }
    try {
        StructTree tree = parse_structure(doc);
        for (const auto& [id, elem] : tree.elems) {
            if (elem.associated_files.empty()) continue;
            AssociationTarget st;
            st.kind = AssociationTarget::Kind::Structure;
            st.object = id;
            for (ObjectId fs : elem.associated_files) add_target(index, fs, st);
        }
    } catch (const Error&) {
        // No structure tree or a malformed one; the validator reports that.
    }
    return index;
}

bool checksum_matches(const std::string& declared, const std::string& actual) {
    return upper_hex(declared) == actual;
}

} // namespace

std::vector<std::pair<std::string, ObjectId>> embedded_file_entries(const Document& doc) {
    std::vector<std::pair<std::string, ObjectId>> out;
    const CosDict* node = embedded_files_node(doc);
    if (!node) return out;
    if (const CosArray* kids = get_array(doc, *node, "Kids")) {
        for (const CosValue& kid : *kids) {
            const CosValue* kv = try_resolve(doc, kid);
            if (kv && kv->dict()) collect_leaf_entries(doc, *kv->dict(), out);
        }
        return out;
    }
    collect_leaf_entries(doc, *node, out);
    return out;
}

ObjectId embed_file(Document& doc, std::span<const std::uint8_t> payload,
                    const EmbedOptions& options) {
    if (options.name.empty()) throw Error(ErrorCode::UsageError, "attachment name is empty");
    auto entries = embedded_file_entries(doc);
    for (const auto& [name, id] : entries)
        if (name == options.name)
            throw Error(ErrorCode::DuplicateName, "attachment " + options.name + " already exists");

    CosDict params;
    if (!options.mod_date.empty()) dict_set(params, "ModDate", cos_literal(options.mod_date));
    dict_set(params, "Size", cos_int(static_cast<std::int64_t>(payload.size())));
    dict_set(params, "CheckSum", cos_literal(md5_hex(payload)));

    CosDict sdict;
    dict_set(sdict, "Type", cos_name("EmbeddedFile"));
    if (!options.mime.empty()) dict_set(sdict, "Subtype", cos_name(options.mime));
    dict_set(sdict, "Params", cos_dict(std::move(params)));

    ObjectId stream_id = next_object_id(doc);
    doc.objects.emplace(stream_id,
                        cos_stream(std::move(sdict), Bytes(payload.begin(), payload.end())));

    CosDict fs;
    dict_set(fs, "Type", cos_name("Filespec"));
    dict_set(fs, "F", cos_literal(options.name));
    dict_set(fs, "UF", cos_literal(options.name));
    if (!options.desc.empty()) dict_set(fs, "Desc", cos_literal(options.desc));
    dict_set(fs, "AFRelationship", cos_name(af_relationship_name(options.relationship)));
    CosDict ef;
    dict_set(ef, "F", cos_ref(stream_id.number));
    dict_set(fs, "EF", cos_dict(std::move(ef)));

    ObjectId fs_id = next_object_id(doc);
    doc.objects.emplace(fs_id, cos_dict(std::move(fs)));

    entries.emplace_back(options.name, fs_id);
    write_name_tree(doc, std::move(entries));
    return fs_id;
}

void register_associated_files(Document& doc, const std::vector<ObjectId>& filespecs) {
    if (filespecs.empty()) return;
    CosDict* cat = mutable_catalog(doc);
    CosValue* mi = dict_get(*cat, "MarkInfo");
    if (!mi) {
        CosDict mark;
        dict_set(mark, "Marked", cos_bool(true));
        dict_set(*cat, "MarkInfo", cos_dict(std::move(mark)));
    }
    CosDict* mark = ensure_dict_slot(doc, *cat, "MarkInfo");
    append_af_refs(doc, *mark, filespecs);
}

void associate(Document& doc, const std::vector<ObjectId>& filespecs,
               const AssociationTarget& target) {
    if (filespecs.empty()) return;
    for (ObjectId fs : filespecs) validate_filespec(doc, fs);

    switch (target.kind) {
    case AssociationTarget::Kind::Document:
        append_af_refs(doc, *mutable_catalog(doc), filespecs);
        break;
    case AssociationTarget::Kind::Page: {
        CosDict* page = mutable_dict_object(doc, target.object, "page");
        const std::string* type = get_name(doc, *page, "Type");
        if (!type || *type != "Page")
            throw Error(ErrorCode::UnknownTarget,
                        "object " + std::to_string(target.object.number) + " is not a page");
        append_af_refs(doc, *page, filespecs);
        break;
    }
    case AssociationTarget::Kind::ContentSpan: {
        if (target.resource.empty())
            throw Error(ErrorCode::UnknownTarget, "content association needs a resource name");
        CosDict* page = mutable_dict_object(doc, target.object, "page");
        const std::string* type = get_name(doc, *page, "Type");
        if (!type || *type != "Page")
            throw Error(ErrorCode::UnknownTarget,
                        "object " + std::to_string(target.object.number) + " is not a page");
        CosDict* res = ensure_resources(doc, target.object);
        CosDict* props = ensure_dict_slot(doc, *res, "Properties");
        CosValue* existing = dict_get(*props, target.resource);
        if (!existing) {
            dict_set(*props, target.resource, cos_array({}));
            existing = dict_get(*props, target.resource);
        }
        CosArray* arr = existing->array();
        if (!arr) {
            if (const ObjectId* id = existing->ref()) {
                auto it = doc.objects.find(*id);
                if (it != doc.objects.end()) arr = it->second.array();
            }
        }
        if (!arr)
            throw Error(ErrorCode::SyntaxError,
                        "property /" + target.resource + " is not a file list");
        for (ObjectId fs : filespecs) {
            bool present = std::any_of(arr->begin(), arr->end(), [&](const CosValue& v) {
                return v.ref() && *v.ref() == fs;
            });
            if (!present) arr->push_back(cos_ref(fs.number));
        }
        break;
    }
    case AssociationTarget::Kind::Structure: {
        StructTree tree = parse_structure(doc);
        auto it = tree.elems.find(target.object);
        if (it == tree.elems.end())
            throw Error(ErrorCode::UnknownTarget,
                        "no structure element " + std::to_string(target.object.number));
        std::vector<ObjectId> merged = it->second.associated_files;
        for (ObjectId fs : filespecs)
            if (std::find(merged.begin(), merged.end(), fs) == merged.end())
                merged.push_back(fs);
        attach_af_to_struct(doc, target.object, merged);
        break;
    }
    case AssociationTarget::Kind::XObject: {
        auto it = doc.objects.find(target.object);
        if (it == doc.objects.end())
            throw Error(ErrorCode::DanglingReference,
                        "object " + std::to_string(target.object.number) + " missing");
        CosStream* s = it->second.stream();
        if (!s)
            throw Error(ErrorCode::UnknownTarget,
                        "object " + std::to_string(target.object.number) + " is not a stream");
        append_af_refs(doc, s->dict, filespecs);
        break;
    }
    case AssociationTarget::Kind::Annotation:
        throw Error(ErrorCode::UnsupportedMethod, "annotation association is not supported");
    }

    register_associated_files(doc, filespecs);
}

void wrap_content_span(Document& doc, ObjectId page, const std::string& name,
                       std::size_t first_op, std::size_t last_op) {
    Bytes content = page_content(doc, page);
    std::vector<ContentOp> ops = parse_content(content);
    if (first_op > last_op || last_op >= ops.size())
        throw Error(ErrorCode::UsageError, "operator range out of bounds");

    int text_depth = 0;
    int marked_depth = 0;
    for (std::size_t i = first_op; i <= last_op; ++i) {
        if (std::holds_alternative<OpBeginText>(ops[i])) ++text_depth;
        else if (std::holds_alternative<OpEndText>(ops[i])) --text_depth;
        else if (std::holds_alternative<OpBeginMarked>(ops[i])) ++marked_depth;
        else if (std::holds_alternative<OpEndMarked>(ops[i])) --marked_depth;
        if (text_depth < 0)
            throw Error(ErrorCode::UnbalancedTextBlock, "range splits a text block");
        if (marked_depth < 0)
            throw Error(ErrorCode::UnbalancedMarkedContent, "range splits a marked span");
    }
    if (text_depth != 0)
        throw Error(ErrorCode::UnbalancedTextBlock, "range splits a text block");
    if (marked_depth != 0)
        throw Error(ErrorCode::UnbalancedMarkedContent, "range splits a marked span");

    OpBeginMarked open;
    open.tag = "AF";
    open.resource = name;
    ops.insert(ops.begin() + static_cast<std::ptrdiff_t>(last_op) + 1, OpEndMarked{});
    ops.insert(ops.begin() + static_cast<std::ptrdiff_t>(first_op), std::move(open));
    set_page_content(doc, page, serialize_content(ops));
}

std::vector<AttachmentInfo> list_attachments(const Document& doc) {
    std::vector<AttachmentInfo> out;
    auto entries = embedded_file_entries(doc);
    if (entries.empty()) return out;
    std::set<ObjectId> registry = registry_set(doc);
    auto targets = scan_targets(doc);

    for (const auto& [name, fsid] : entries) {
        AttachmentInfo info;
        info.name = name;
        info.filespec = fsid;
        info.registered = registry.count(fsid) != 0;
        if (auto it = targets.find(fsid); it != targets.end()) info.targets = it->second;

        auto oit = doc.objects.find(fsid);
        const CosDict* fs = oit != doc.objects.end() ? oit->second.dict() : nullptr;
        if (!fs) {
            out.push_back(std::move(info));
            continue;
        }
        if (const CosValue* desc = get_resolved(doc, *fs, "Desc")) info.desc = utf8_of_string(*desc);
        if (const std::string* rel = get_name(doc, *fs, "AFRelationship"))
            info.relationship = af_relationship_from(*rel);

        PayloadFacts facts = payload_facts(doc, *fs);
        info.declared_size = facts.declared_size;
        info.declared_checksum = facts.declared_checksum;
        info.subtype = facts.subtype;
        if (facts.stream) {
            info.payload_size = static_cast<std::int64_t>(facts.stream->data.size());
            info.size_ok = facts.declared_size == info.payload_size;
            info.checksum_ok = !facts.declared_checksum.empty() &&
                               checksum_matches(facts.declared_checksum,
                                                md5_hex(facts.stream->data));
        }
        out.push_back(std::move(info));
    }
    return out;
}

ExtractedAttachment extract_attachment(const Document& doc, std::string_view name) {
    auto entries = embedded_file_entries(doc);
    const ObjectId* fsid = nullptr;
    for (const auto& [n, id] : entries)
        if (n == name) {
            fsid = &id;
            break;
        }
    if (!fsid) throw Error(ErrorCode::NameNotFound, "no attachment named " + std::string(name));

    auto all = list_attachments(doc);
    ExtractedAttachment result;
    for (auto& info : all)
        if (info.name == name) {
            result.info = std::move(info);
            break;
        }

    auto oit = doc.objects.find(*fsid);
    const CosDict* fs = oit != doc.objects.end() ? oit->second.dict() : nullptr;
    const CosStream* stream = fs ? payload_facts(doc, *fs).stream : nullptr;
    if (!stream)
        throw Error(ErrorCode::IntegrityMismatch,
                    std::string(name) + " has no embedded file stream");

    const AttachmentInfo& info = result.info;
    if (info.declared_size >= 0 && !info.size_ok)
        throw Error(ErrorCode::IntegrityMismatch,
                    std::string(name) + ": declared /Size " + std::to_string(info.declared_size) +
                        ", payload is " + std::to_string(info.payload_size) + " bytes");
    if (!info.declared_checksum.empty() && !info.checksum_ok)
        throw Error(ErrorCode::IntegrityMismatch,
                    std::string(name) + ": declared /CheckSum " + info.declared_checksum +
                        " does not match payload MD5 " + md5_hex(stream->data));

    result.payload = stream->data;
    return result;
}

} // namespace mathtag
