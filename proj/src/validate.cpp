// SPDX-License-Identifier: Apache-2.0

#include "mathtag/validate.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "mathtag/access_tags.hpp"
#include "mathtag/attachments.hpp"
#include "mathtag/content_stream.hpp"
#include "mathtag/cos.hpp"
#include "mathtag/errors.hpp"
#include "mathtag/md5.hpp"
#include "mathtag/structure_tree.hpp"

namespace mathtag {

namespace {

struct Checker {
    const Document& doc;
    std::vector<Finding>& findings;

    void add(std::string code, std::string message, std::string where) {
        findings.push_back({std::move(code), std::move(message), std::move(where)});
    }

    static std::string obj_locus(ObjectId id) { return "object " + std::to_string(id.number); }

    void check_references() {
        std::set<ObjectId> missing;
        std::function<void(const CosValue&)> walk = [&](const CosValue& v) {
            if (const ObjectId* id = v.ref()) {
                if (!doc.objects.count(*id)) missing.insert(*id);
            } else if (const CosArray* arr = v.array()) {
                for (const CosValue& item : *arr) walk(item);
            } else if (const CosDict* d = v.dict()) {
                for (const DictEntry& e : *d) walk(e.value);
            } else if (const CosStream* s = v.stream()) {
                for (const DictEntry& e : s->dict) walk(e.value);
            }
        };
        for (const auto& [id, value] : doc.objects) walk(value);
        for (const DictEntry& e : doc.trailer) walk(e.value);
        for (ObjectId id : missing)
            add("DANGLING_REF", "reference to a missing object", obj_locus(id));
    }

    const CosDict* catalog_dict() { return catalog(doc); }

    // Name-tree leaves in tree order, with shape and order findings.
    std::vector<std::pair<std::string, ObjectId>> check_name_tree() {
        std::vector<std::pair<std::string, ObjectId>> entries;
        const CosDict* cat = catalog_dict();
        if (!cat) return entries;
        const CosDict* names = get_dict(doc, *cat, "Names");
        if (!names) return entries;
        const CosDict* ef = get_dict(doc, *names, "EmbeddedFiles");
        if (!ef) return entries;

        auto leaf = [&](const CosDict& node) {
            const CosArray* arr = get_array(doc, node, "Names");
            if (!arr) return;
            if (arr->size() % 2 != 0)
                add("NAME_TREE_SHAPE", "odd /Names array length", "/EmbeddedFiles");
            for (std::size_t i = 0; i + 1 < arr->size(); i += 2) {
                const Bytes* name = (*arr)[i].literal();
                if (!name) name = (*arr)[i].hex_bytes();
                if (!name) {
                    add("NAME_TREE_SHAPE", "name entry is not a string", "/EmbeddedFiles");
                    continue;
                }
                const ObjectId* id = (*arr)[i + 1].ref();
                if (!id) {
                    add("NAME_TREE_SHAPE", "name value is not a reference", "/EmbeddedFiles");
                    continue;
                }
                entries.emplace_back(std::string(name->begin(), name->end()), *id);
            }
        };
        if (const CosArray* kids = get_array(doc, *ef, "Kids")) {
            for (const CosValue& kid : *kids) {
                const CosValue* kv = try_resolve(doc, kid);
                if (kv && kv->dict()) leaf(*kv->dict());
            }
        } else {
            leaf(*ef);
        }

        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].first < entries[i - 1].first) {
                add("NAME_TREE_ORDER",
                    "names out of order: " + entries[i - 1].first + " then " + entries[i].first,
                    "/EmbeddedFiles");
            }
        }
        return entries;
    }

    void check_filespec(ObjectId id) {
        auto it = doc.objects.find(id);
        if (it == doc.objects.end()) return; // DANGLING_REF covers it
        const CosDict* d = it->second.dict();
        if (!d) {
            add("AF_NOT_FILESPEC", "associated object is not a file specification",
                obj_locus(id));
            return;
        }
        const CosValue* type = get_resolved(doc, *d, "Type");
        if (!type) {
            add("FILESPEC_TYPE", "file specification without /Type", obj_locus(id));
            return;
        }
        if (!type->name() || *type->name() != "Filespec")
            add("AF_NOT_FILESPEC", "associated object is not a file specification",
                obj_locus(id));
    }

    void check_payload(ObjectId fsid) {
        auto it = doc.objects.find(fsid);
        if (it == doc.objects.end()) return;
        const CosDict* fs = it->second.dict();
        if (!fs) return;
        const CosDict* ef = get_dict(doc, *fs, "EF");
        if (!ef) return;
        const CosStream* stream = get_stream(doc, *ef, "F");
        if (!stream) {
            add("EMBEDDED_FILE_MISSING", "/EF does not lead to a stream", obj_locus(fsid));
            return;
        }
        const CosDict* params = get_dict(doc, stream->dict, "Params");
        if (!params) return;

        const CosValue* size = get_resolved(doc, *params, "Size");
        if (size) {
            std::optional<std::int64_t> declared = size->integer();
            if (!declared) {
                const Bytes* s = size->literal();
                if (!s) s = size->hex_bytes();
                if (s && !s->empty() &&
                    std::all_of(s->begin(), s->end(),
                                [](std::uint8_t b) { return b >= '0' && b <= '9'; })) {
                    std::int64_t n = 0;
                    for (std::uint8_t b : *s) n = n * 10 + (b - '0');
                    declared = n;
                }
            }
            if (declared && *declared != static_cast<std::int64_t>(stream->data.size()))
                add("SIZE_MISMATCH",
                    "/Size " + std::to_string(*declared) + " but payload has " +
                        std::to_string(stream->data.size()) + " bytes",
                    obj_locus(fsid));
        }

        const CosValue* checksum = get_resolved(doc, *params, "CheckSum");
        if (checksum) {
            std::string declared;
            if (const Bytes* b = checksum->literal()) {
                declared.assign(b->begin(), b->end());
            } else if (const Bytes* b = checksum->hex_bytes()) {
                static const char* digits = "0123456789ABCDEF";
                for (std::uint8_t byte : *b) {
                    declared.push_back(digits[byte >> 4]);
                    declared.push_back(digits[byte & 0xF]);
                }
            }
            for (char& c : declared)
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (!declared.empty() && declared != md5_hex(stream->data))
                add("CHECKSUM_MISMATCH", "/CheckSum does not match the payload MD5",
                    obj_locus(fsid));
        }
    }

    std::vector<ObjectId> af_refs_of(const CosDict& owner) {
        std::vector<ObjectId> out;
        const CosArray* af = get_array(doc, owner, "AF");
        if (!af) return out;
        for (const CosValue& v : *af)
            if (v.ref()) out.push_back(*v.ref());
        return out;
    }

    void check_associations(const std::vector<std::pair<std::string, ObjectId>>& tree_entries,
                            const std::optional<StructTree>& tree) {
        std::set<ObjectId> checked;
        auto check_once = [&](ObjectId id) {
            if (checked.insert(id).second) {
                check_filespec(id);
                check_payload(id);
            }
        };

        std::vector<ObjectId> registry;
        const CosDict* cat = catalog_dict();
        if (cat) {
            if (const CosDict* mark = get_dict(doc, *cat, "MarkInfo"))
                registry = af_refs_of(*mark);
        }
        std::set<ObjectId> registered(registry.begin(), registry.end());
        if (registered.size() != registry.size()) {
            std::set<ObjectId> seen;
            for (ObjectId id : registry)
                if (!seen.insert(id).second)
                    add("AF_DUPLICATE", "file registered more than once in /MarkInfo /AF",
                        obj_locus(id));
        }
        for (ObjectId id : registry) check_once(id);
        for (const auto& [name, id] : tree_entries) check_once(id);

        std::map<ObjectId, std::string> referenced;
        auto reference = [&](ObjectId id, const std::string& from) {
            check_once(id);
            if (!referenced.count(id)) referenced.emplace(id, from);
        };

        if (cat)
            for (ObjectId id : af_refs_of(*cat)) reference(id, "document catalog");
        for (ObjectId page : page_ids(doc)) {
            const CosDict* pd = get_object(doc, page).dict();
            if (!pd) continue;
            for (ObjectId id : af_refs_of(*pd)) reference(id, obj_locus(page));
            const CosValue* res = page_attr(doc, page, "Resources");
            const CosValue* rv = res ? try_resolve(doc, *res) : nullptr;
            const CosDict* rd = rv ? rv->dict() : nullptr;
            if (!rd) continue;
            if (const CosDict* props = get_dict(doc, *rd, "Properties")) {
                for (const DictEntry& e : *props) {
                    const CosValue* v = try_resolve(doc, e.value);
                    if (!v || !v->array()) continue;
                    for (const CosValue& item : *v->array())
                        if (item.ref()) reference(*item.ref(), "/Properties /" + e.key);
                }
            }
            if (const CosDict* xo = get_dict(doc, *rd, "XObject")) {
                for (const DictEntry& e : *xo) {
                    const CosValue* v = try_resolve(doc, e.value);
                    if (!v || !v->stream()) continue;
                    for (ObjectId id : af_refs_of(v->stream()->dict))
                        reference(id, "/XObject /" + e.key);
                }
            }
        }
        if (tree) {
            for (const auto& [id, elem] : tree->elems)
                for (ObjectId fs : elem.associated_files) reference(fs, obj_locus(id));
        }

        for (const auto& [id, from] : referenced) {
            if (!registered.count(id))
                add("AF_UNREGISTERED",
                    "file associated at " + from + " is missing from /MarkInfo /AF",
                    obj_locus(id));
        }
    }

    // Per-page marked-content facts gathered once.
    struct PageContent {
        bool parsed = false;
        std::map<std::int64_t, std::size_t> mcid_count;
    };

    std::map<ObjectId, PageContent> check_content() {
        std::map<ObjectId, PageContent> pages;
        std::vector<ObjectId> ids = page_ids(doc);
        for (std::size_t pi = 0; pi < ids.size(); ++pi) {
            PageContent pc;
            std::string locus = "page " + std::to_string(pi);
            std::vector<ContentOp> ops;
            try {
                ops = parse_content(page_content(doc, ids[pi]));
            } catch (const Error& e) {
                add(e.code() == ErrorCode::UnbalancedTextBlock ? "UNBALANCED_TEXT_BLOCK"
                                                               : "CONTENT_SYNTAX",
                    e.what(), locus);
                pages.emplace(ids[pi], std::move(pc));
                continue;
            }
            std::vector<SpanChild> tree;
            try {
                tree = build_span_tree(ops);
            } catch (const Error& e) {
                add("UNBALANCED_MARKED_CONTENT", e.what(), locus);
                pages.emplace(ids[pi], std::move(pc));
                continue;
            }
            pc.parsed = true;

            std::function<void(const std::vector<SpanChild>&)> walk =
                [&](const std::vector<SpanChild>& children) {
                    for (const SpanChild& child : children) {
                        const SpanNode* span = child.span();
                        if (!span) continue;
                        if (span->mcid) pc.mcid_count[*span->mcid] += 1;
                        if (span->actual_text) {
                            try {
                                decode_payload(*span->actual_text);
                            } catch (const Error& e) {
                                add("ACCESS_TAG_DELIMITERS", e.what(), locus);
                            }
                        }
                        walk(span->children);
                    }
                };
            walk(tree);

            for (const auto& [mcid, count] : pc.mcid_count)
                if (count > 1)
                    add("DUPLICATE_MCID",
                        "MCID " + std::to_string(mcid) + " appears " + std::to_string(count) +
                            " times",
                        locus);
            pages.emplace(ids[pi], std::move(pc));
        }
        return pages;
    }

    std::optional<StructTree> check_structure(const std::map<ObjectId, PageContent>& pages) {
        const CosDict* cat = catalog_dict();
        if (!cat || !dict_get(*cat, "StructTreeRoot")) return std::nullopt;
        StructTree tree;
        try {
            tree = parse_structure(doc);
        } catch (const Error& e) {
            std::string code;
            switch (e.code()) {
            case ErrorCode::CycleDetected: code = "STRUCT_CYCLE"; break;
            case ErrorCode::OrphanElem: code = "STRUCT_PARENT"; break;
            default: code = "STRUCT_ROOT"; break;
            }
            add(code, e.what(), "structure tree");
            return std::nullopt;
        }

        // Claimed MCIDs must exist, be claimed once, and match the parent tree.
        std::map<ObjectId, std::map<std::int64_t, ObjectId>> claims;
        for (const auto& [id, elem] : tree.elems) {
            for (const StructKid& kid : elem.kids) {
                const std::int64_t* m = kid.mcid();
                if (!m) continue;
                if (!elem.effective_page) {
                    add("DANGLING_MCID",
                        "MCID " + std::to_string(*m) + " claimed without an effective page",
                        obj_locus(id));
                    continue;
                }
                ObjectId page = *elem.effective_page;
                auto pit = pages.find(page);
                if (pit == pages.end() || !pit->second.parsed ||
                    !pit->second.mcid_count.count(*m)) {
                    if (pit == pages.end() || pit->second.parsed)
                        add("DANGLING_MCID",
                            "MCID " + std::to_string(*m) + " has no marked span on its page",
                            obj_locus(id));
                    continue;
                }
                auto [cit, fresh] = claims[page].emplace(*m, id);
                if (!fresh && !(cit->second == id))
                    add("DUPLICATE_MCID",
                        "MCID " + std::to_string(*m) + " claimed by two elements",
                        obj_locus(id));
            }
        }

        // Every marked span in a tagged document should be reachable.
        std::vector<ObjectId> ids = page_ids(doc);
        for (std::size_t pi = 0; pi < ids.size(); ++pi) {
            auto pit = pages.find(ids[pi]);
            if (pit == pages.end() || !pit->second.parsed) continue;
            const auto& claimed = claims[ids[pi]];
            for (const auto& [mcid, count] : pit->second.mcid_count)
                if (!claimed.count(mcid))
                    add("UNCLAIMED_MCID",
                        "MCID " + std::to_string(mcid) + " belongs to no structure element",
                        "page " + std::to_string(pi));
        }

        // Parent-tree rows, when present, must point back at the claiming
        // elements.
        for (std::size_t pi = 0; pi < ids.size(); ++pi) {
            const auto cit = claims.find(ids[pi]);
            if (cit == claims.end() || cit->second.empty()) continue;
            const CosDict* pd = get_object(doc, ids[pi]).dict();
            auto sp = pd ? get_int(doc, *pd, "StructParents") : std::nullopt;
            if (!sp) {
                add("PARENT_TREE_MISSING", "page with marked content has no /StructParents",
                    "page " + std::to_string(pi));
                continue;
            }
            auto row = tree.parent_tree.find(*sp);
            if (row == tree.parent_tree.end()) {
                add("PARENT_TREE_MISSING",
                    "no /ParentTree row for /StructParents " + std::to_string(*sp),
                    "page " + std::to_string(pi));
                continue;
            }
            for (const auto& [mcid, elem] : cit->second) {
                std::size_t idx = static_cast<std::size_t>(mcid);
                if (mcid < 0 || idx >= row->second.size() || !row->second[idx] ||
                    !(*row->second[idx] == elem))
                    add("PARENT_TREE_MISMATCH",
                        "/ParentTree row does not map MCID " + std::to_string(mcid) +
                            " to its element",
                        "page " + std::to_string(pi));
            }
        }
        return tree;
    }
};

} // namespace

std::vector<Finding> validate_bytes(std::span<const std::uint8_t> bytes) {
    std::vector<Finding> findings;
    std::vector<RecoveryNote> notes;
    Document doc;
    try {
        doc = parse_document_lenient(bytes, notes);
    } catch (const Error& e) {
        findings.push_back({"PARSE_FAILURE", e.what(), "file"});
        return findings;
    }
    for (const RecoveryNote& note : notes)
        findings.push_back(
            {note.code, note.message, "byte " + std::to_string(note.offset)});

    Checker checker{doc, findings};
    checker.check_references();
    auto entries = checker.check_name_tree();
    auto pages = checker.check_content();
    auto tree = checker.check_structure(pages);
    checker.check_associations(entries, tree);
    return findings;
}

} // namespace mathtag
