// SPDX-License-Identifier: Apache-2.0

#include "mathtag/structure_tree.hpp"

#include <algorithm>
#include <set>

#include "mathtag/attachments.hpp"
#include "mathtag/errors.hpp"

namespace mathtag {

namespace {

std::string id_str(ObjectId id) {
    return std::to_string(id.number) + " " + std::to_string(id.generation);
}

std::vector<ObjectId> ref_list(const Document& doc, const CosDict& d, std::string_view key) {
    std::vector<ObjectId> out;
    const CosValue* v = dict_get(d, key);
    if (!v) return out;
    if (const ObjectId* id = v->ref()) {
        out.push_back(*id);
        return out;
    }
    const CosValue* rv = try_resolve(doc, *v);
    if (!rv) return out;
    if (const CosArray* arr = rv->array()) {
        for (const CosValue& item : *arr)
            if (const ObjectId* id = item.ref()) out.push_back(*id);
    }
    return out;
}

struct TreeParser {
    const Document& doc;
    StructTree tree;
    std::set<ObjectId> visiting;

    void parse_elem(ObjectId id, ObjectId listed_parent, std::optional<ObjectId> inherited_page) {
        if (tree.elems.count(id))
            throw Error(ErrorCode::CycleDetected,
                        "structure element " + id_str(id) + " is reachable twice");
        if (!visiting.insert(id).second)
            throw Error(ErrorCode::CycleDetected,
                        "structure element " + id_str(id) + " contains itself");

        const CosValue* v = try_resolve(doc, cos_ref(id.number, id.generation));
        if (!v || !v->dict())
            throw Error(ErrorCode::OrphanElem,
                        "structure kid " + id_str(id) + " is not a dictionary");
        const CosDict& d = *v->dict();

        StructElem elem;
        elem.id = id;
        if (const std::string* s = get_name(doc, d, "S")) elem.s = *s;
        const CosValue* p = dict_get(d, "P");
        if (!p || !p->ref())
            throw Error(ErrorCode::OrphanElem,
                        "structure element " + id_str(id) + " has no /P parent");
        elem.parent = *p->ref();
        if (elem.parent != listed_parent)
            throw Error(ErrorCode::OrphanElem,
                        "structure element " + id_str(id) + " names parent " +
                            id_str(elem.parent) + " but is a kid of " + id_str(listed_parent));

        if (const CosValue* pg = dict_get(d, "Pg"); pg && pg->ref()) elem.page = *pg->ref();
        elem.effective_page = elem.page ? elem.page : inherited_page;

        if (const CosValue* a = dict_get(d, "A")) {
            if (const CosValue* ra = try_resolve(doc, *a); ra && ra->dict())
                elem.attributes = *ra->dict();
        }
        if (const CosValue* idv = get_resolved(doc, d, "ID"); idv && idv->literal())
            elem.elem_id = std::string(idv->literal()->begin(), idv->literal()->end());
        if (const CosValue* t = get_resolved(doc, d, "T")) {
            if (const Bytes* b = t->literal())
                elem.title = decode_text({b->data(), b->size()}, StringOrigin::Literal);
            else if (const Bytes* b2 = t->hex_bytes())
                elem.title = decode_text({b2->data(), b2->size()}, StringOrigin::Hex);
        }
        elem.associated_files = ref_list(doc, d, "AF");

        if (const CosValue* k = dict_get(d, "K")) parse_kids(*k, elem);

        visiting.erase(id);
        tree.elems.emplace(id, std::move(elem));
    }

    void parse_kids(const CosValue& k, StructElem& elem) {
        if (const CosArray* arr = k.array()) {
            for (const CosValue& item : *arr) parse_kid(item, elem);
        } else {
            parse_kid(k, elem);
        }
    }

    void parse_kid(const CosValue& kid, StructElem& elem) {
        if (auto n = kid.integer()) {
            elem.kids.push_back(StructKid{*n});
            return;
        }
        if (const CosDict* d = kid.dict()) {
            // inline marked-content reference
            if (const CosValue* m = dict_get(*d, "MCID"); m && m->integer())
                elem.kids.push_back(StructKid{*m->integer()});
            return;
        }
        const ObjectId* id = kid.ref();
        if (!id) return;
        const CosValue* rv = try_resolve(doc, kid);
        if (rv && rv->dict()) {
            const CosDict& kd = *rv->dict();
            const CosValue* m = dict_get(kd, "MCID");
            if (m && m->integer() && !dict_get(kd, "S")) {
                elem.kids.push_back(StructKid{*m->integer()});
                return;
            }
        }
        elem.kids.push_back(StructKid{*id});
        parse_elem(*id, elem.id, elem.effective_page);
    }
};

} // namespace

StructTree parse_structure(const Document& doc) {
    const CosDict* cat = catalog(doc);
    if (!cat)
        throw Error(ErrorCode::MissingStructTreeRoot, "document has no catalog");
    const CosValue* rootv = dict_get(*cat, "StructTreeRoot");
    if (!rootv || !rootv->ref())
        throw Error(ErrorCode::MissingStructTreeRoot, "catalog has no /StructTreeRoot");

    TreeParser tp{doc, {}, {}};
    tp.tree.root_id = *rootv->ref();
    const CosValue* root = try_resolve(doc, *rootv);
    if (!root || !root->dict())
        throw Error(ErrorCode::MissingStructTreeRoot, "/StructTreeRoot does not resolve");
    const CosDict& rd = *root->dict();

    if (const CosDict* rm = get_dict(doc, rd, "RoleMap")) tp.tree.role_map = *rm;

    if (const CosValue* k = dict_get(rd, "K")) {
        auto add_root_kid = [&](const CosValue& kid) {
            if (const ObjectId* id = kid.ref()) {
                tp.tree.root_kids.push_back(*id);
                tp.parse_elem(*id, tp.tree.root_id, std::nullopt);
            }
        };
        const CosValue* kv = try_resolve(doc, *k);
        if (kv && kv->array())
            for (const CosValue& kid : *kv->array()) add_root_kid(kid);
        else
            add_root_kid(*k);
    }

    if (const CosDict* pt = get_dict(doc, rd, "ParentTree")) {
        if (const CosArray* nums = get_array(doc, *pt, "Nums")) {
            for (std::size_t i = 0; i + 1 < nums->size(); i += 2) {
                auto key = (*nums)[i].integer();
                if (!key) continue;
                const CosValue* val = try_resolve(doc, (*nums)[i + 1]);
                if (!val || !val->array()) continue;
                std::vector<std::optional<ObjectId>> row;
                for (const CosValue& item : *val->array()) {
                    if (const ObjectId* id = item.ref())
                        row.emplace_back(*id);
                    else
                        row.emplace_back(std::nullopt);
                }
                tp.tree.parent_tree.emplace(*key, std::move(row));
            }
        }
    }
    return std::move(tp.tree);
}

namespace {

void collect_mcids(const StructTree& tree, ObjectId elem,
                   std::vector<std::pair<ObjectId, std::int64_t>>& out) {
    auto it = tree.elems.find(elem);
    if (it == tree.elems.end()) return;
    for (const StructKid& kid : it->second.kids) {
        if (const std::int64_t* m = kid.mcid()) {
            ObjectId page = it->second.effective_page.value_or(ObjectId{});
            out.emplace_back(page, *m);
        } else if (const ObjectId* e = kid.elem()) {
            collect_mcids(tree, *e, out);
        }
    }
}

} // namespace

std::vector<SpanNode> resolve_marked_content(const Document& doc, const StructTree& tree,
                                             ObjectId elem) {
    std::vector<std::pair<ObjectId, std::int64_t>> mcids;
    collect_mcids(tree, elem, mcids);

    std::map<ObjectId, std::vector<SpanChild>> cache;
    std::vector<SpanNode> out;
    for (const auto& [page, mcid] : mcids) {
        if (page.number == 0)
            throw Error(ErrorCode::DanglingMcid,
                        "MCID " + std::to_string(mcid) + " under element " + id_str(elem) +
                            " has no effective page");
        auto it = cache.find(page);
        if (it == cache.end()) {
            Bytes content = page_content(doc, page);
            it = cache.emplace(page, build_span_tree(parse_content(content))).first;
        }
        const SpanNode* span = find_span_by_mcid(it->second, mcid);
        if (!span)
            throw Error(ErrorCode::DanglingMcid,
                        "MCID " + std::to_string(mcid) + " under element " + id_str(elem) +
                            " is absent from page " + std::to_string(page.number));
        out.push_back(*span);
    }
    return out;
}

void attach_af_to_struct(Document& doc, ObjectId elem, const std::vector<ObjectId>& filespecs) {
    for (ObjectId fs : filespecs) {
        const CosValue* v = try_resolve(doc, cos_ref(fs.number, fs.generation));
        const CosDict* d = v ? v->dict() : nullptr;
        const std::string* type = d ? get_name(doc, *d, "Type") : nullptr;
        if (!type || *type != "Filespec")
            throw Error(ErrorCode::NotAFilespec,
                        "object " + id_str(fs) + " is not a /Type /Filespec dictionary");
    }

    auto it = doc.objects.find(elem);
    if (it == doc.objects.end() || !it->second.dict())
        throw Error(ErrorCode::OrphanElem, "no structure element " + id_str(elem));
    CosDict& d = *it->second.dict();
    if (filespecs.empty()) {
        dict_remove(d, "AF");
        return;
    }
    CosArray refs;
    for (ObjectId fs : filespecs) refs.push_back(cos_ref(fs.number, fs.generation));
    dict_set(d, "AF", cos_array(std::move(refs)));
    register_associated_files(doc, filespecs);
}

namespace {

// MCIDs already claimed as kids anywhere in the tree, per page.
std::set<std::int64_t> claimed_mcids(const Document& doc, ObjectId page) {
    std::set<std::int64_t> out;
    StructTree tree;
    try {
        tree = parse_structure(doc);
    } catch (const Error&) {
        return out;
    }
    for (const auto& [id, elem] : tree.elems) {
        if (elem.effective_page != std::optional<ObjectId>(page)) continue;
        for (const StructKid& kid : elem.kids)
            if (const std::int64_t* m = kid.mcid()) out.insert(*m);
    }
    return out;
}

CosValue text_value(const std::string& text) { return cos_literal(text); }

} // namespace

ObjectId build_formula_subtree(Document& doc, ObjectId page, const FormulaLayout& layout) {
    std::set<std::int64_t> claimed = claimed_mcids(doc, page);
    std::set<std::int64_t> fresh;
    auto claim = [&](std::int64_t mcid) {
        if (claimed.count(mcid) || !fresh.insert(mcid).second)
            throw Error(ErrorCode::McidAlreadyClaimed,
                        "MCID " + std::to_string(mcid) + " is already claimed on page " +
                            std::to_string(page.number));
    };
    if (layout.opening_mcid) claim(*layout.opening_mcid);
    for (const FormulaLayout::Leaf& leaf : layout.leaves) claim(leaf.mcid);
    if (layout.closing_mcid) claim(*layout.closing_mcid);

    // Math<page index>.<k> identifiers
    std::vector<ObjectId> pages = page_ids(doc);
    std::size_t page_index = 0;
    for (std::size_t i = 0; i < pages.size(); ++i)
        if (pages[i] == page) page_index = i;
    int counter = 1;
    {
        StructTree tree;
        try {
            tree = parse_structure(doc);
            std::string prefix = "Math" + std::to_string(page_index) + ".";
            for (const auto& [id, elem] : tree.elems) {
                if (!elem.elem_id || elem.elem_id->rfind(prefix, 0) != 0) continue;
                int k = std::atoi(elem.elem_id->c_str() + prefix.size());
                counter = std::max(counter, k + 1);
            }
        } catch (const Error&) {
        }
    }
    std::string suffix = std::to_string(page_index) + "." + std::to_string(counter);

    ObjectId formula_id = next_object_id(doc);
    std::int64_t next_num = formula_id.number;
    auto fresh_id = [&]() { return ObjectId{next_num++, 0}; };

    auto page_ref = cos_ref(page.number, page.generation);
    auto make_elem = [&](ObjectId self, const std::string& role, ObjectId parent,
                         CosArray kids, const std::optional<CosDict>& attrs, bool with_page) {
        CosDict d;
        d.push_back({"Type", cos_name("StructElem")});
        d.push_back({"S", cos_name(role)});
        d.push_back({"P", cos_ref(parent.number, parent.generation)});
        if (with_page) d.push_back({"Pg", page_ref});
        d.push_back({"K", cos_array(std::move(kids))});
        if (attrs) d.push_back({"A", cos_dict(*attrs)});
        doc.objects.emplace(self, cos_dict(std::move(d)));
    };

    ObjectId formula = fresh_id();
    std::vector<ObjectId> formula_kids;

    std::optional<ObjectId> opening, closing, math_id, mrow_id;
    if (layout.opening_mcid) opening = fresh_id();
    if (!layout.leaves.empty()) {
        math_id = fresh_id();
        mrow_id = fresh_id();
    }
    std::vector<ObjectId> leaf_ids;
    for (std::size_t i = 0; i < layout.leaves.size(); ++i) leaf_ids.push_back(fresh_id());
    if (layout.closing_mcid) closing = fresh_id();

    if (opening) {
        make_elem(*opening, "accesstag", formula, CosArray{cos_int(*layout.opening_mcid)},
                  std::nullopt, true);
        formula_kids.push_back(*opening);
    }
    if (math_id) {
        CosArray math_kids{cos_ref(mrow_id->number, 0)};
        make_elem(*math_id, "math", formula, std::move(math_kids), layout.math_attributes,
                  false);
        CosArray mrow_kids;
        for (ObjectId lid : leaf_ids) mrow_kids.push_back(cos_ref(lid.number, 0));
        make_elem(*mrow_id, "mrow", *math_id, std::move(mrow_kids), std::nullopt, false);
        for (std::size_t i = 0; i < layout.leaves.size(); ++i) {
            const FormulaLayout::Leaf& leaf = layout.leaves[i];
            make_elem(leaf_ids[i], leaf.role, *mrow_id, CosArray{cos_int(leaf.mcid)},
                      leaf.attributes, true);
        }
        formula_kids.push_back(*math_id);
    }
    if (closing) {
        make_elem(*closing, "accesstag", formula, CosArray{cos_int(*layout.closing_mcid)},
                  std::nullopt, true);
        formula_kids.push_back(*closing);
    }

    CosDict fd;
    fd.push_back({"Type", cos_name("StructElem")});
    fd.push_back({"S", cos_name("Formula")});
    fd.push_back({"P", cos_ref(layout.parent.number, layout.parent.generation)});
    fd.push_back({"ID", cos_literal("Math" + suffix)});
    fd.push_back({"T", text_value("InlineMath " + suffix)});
    CosArray fk;
    for (ObjectId kid : formula_kids) fk.push_back(cos_ref(kid.number, 0));
    fd.push_back({"K", cos_array(std::move(fk))});
    if (!layout.associated_files.empty()) {
        CosArray af;
        for (ObjectId fs : layout.associated_files) af.push_back(cos_ref(fs.number, fs.generation));
        fd.push_back({"AF", cos_array(std::move(af))});
    }
    if (layout.formula_attributes) fd.push_back({"A", cos_dict(*layout.formula_attributes)});
    doc.objects.emplace(formula, cos_dict(std::move(fd)));

    // wire into the enclosing node
    auto it = doc.objects.find(layout.parent);
    if (it != doc.objects.end() && it->second.dict()) {
        CosDict& pd = *it->second.dict();
        CosValue* k = dict_get(pd, "K");
        CosValue fref = cos_ref(formula.number, 0);
        if (!k) {
            dict_set(pd, "K", cos_array(CosArray{std::move(fref)}));
        } else if (k->array()) {
            k->array()->push_back(std::move(fref));
        } else {
            CosArray kids{*k, std::move(fref)};
            *k = cos_array(std::move(kids));
        }
    }

    if (!layout.associated_files.empty()) register_associated_files(doc, layout.associated_files);
    return formula;
}

void regenerate_parent_tree(Document& doc) {
    StructTree tree;
    try {
        tree = parse_structure(doc);
    } catch (const Error&) {
        return;
    }

    // page -> mcid -> claiming element
    std::map<ObjectId, std::map<std::int64_t, ObjectId>> by_page;
    for (const auto& [id, elem] : tree.elems) {
        if (!elem.effective_page) continue;
        for (const StructKid& kid : elem.kids)
            if (const std::int64_t* m = kid.mcid()) by_page[*elem.effective_page][*m] = id;
    }

    CosArray nums;
    std::int64_t next_key = 0;
    for (ObjectId page : page_ids(doc)) {
        auto it = doc.objects.find(page);
        if (it == doc.objects.end() || !it->second.dict()) continue;
        CosDict& pd = *it->second.dict();
        auto claims = by_page.find(page);
        if (claims == by_page.end() || claims->second.empty()) continue;
        std::int64_t key;
        if (auto sp = get_int(doc, pd, "StructParents")) {
            key = *sp;
        } else {
            key = next_key;
            dict_set(pd, "StructParents", cos_int(key));
        }
        next_key = std::max(next_key, key + 1);
        std::int64_t top = claims->second.rbegin()->first;
        CosArray row(static_cast<std::size_t>(top) + 1, cos_null());
        for (const auto& [mcid, elem] : claims->second)
            row[static_cast<std::size_t>(mcid)] = cos_ref(elem.number, elem.generation);
        nums.push_back(cos_int(key));
        nums.push_back(cos_array(std::move(row)));
    }

    auto root_it = doc.objects.find(tree.root_id);
    if (root_it == doc.objects.end() || !root_it->second.dict()) return;
    CosDict& rd = *root_it->second.dict();
    CosDict pt;
    pt.push_back({"Nums", cos_array(std::move(nums))});
    dict_set(rd, "ParentTree", cos_dict(std::move(pt)));
    dict_set(rd, "ParentTreeNextKey", cos_int(next_key));
}

void ensure_role_map_entry(Document& doc, const std::string& from, const std::string& to) {
    const CosDict* cat = catalog(doc);
    if (!cat) return;
    const CosValue* rootv = dict_get(*cat, "StructTreeRoot");
    if (!rootv || !rootv->ref()) return;
    auto it = doc.objects.find(*rootv->ref());
    if (it == doc.objects.end() || !it->second.dict()) return;
    CosDict& rd = *it->second.dict();
    CosValue* rm = dict_get(rd, "RoleMap");
    if (rm && rm->ref()) {
        auto target = doc.objects.find(*rm->ref());
        if (target == doc.objects.end() || !target->second.dict()) return;
        dict_set(*target->second.dict(), from, cos_name(to));
        return;
    }
    if (rm && rm->dict()) {
        dict_set(*rm->dict(), from, cos_name(to));
        return;
    }
    CosDict fresh;
    fresh.push_back({from, cos_name(to)});
    dict_set(rd, "RoleMap", cos_dict(std::move(fresh)));
}

std::optional<ObjectId> find_elem_by_id(const StructTree& tree, std::string_view elem_id) {
    for (const auto& [id, elem] : tree.elems)
        if (elem.elem_id && *elem.elem_id == elem_id) return id;
    return std::nullopt;
}

} // namespace mathtag
