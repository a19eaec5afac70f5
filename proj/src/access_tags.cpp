// SPDX-License-Identifier: Apache-2.0

#include "mathtag/access_tags.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "mathtag/content_stream.hpp"
#include "mathtag/errors.hpp"
#include "mathtag/structure_tree.hpp"
#include "mathtag/text_codec.hpp"

namespace mathtag {

Bytes opening_payload(std::string_view latex) {
    std::string raw = "\r<latex>\r";
    raw.append(latex);
    raw += "\r</latex>\r<content>\r";
    return Bytes(raw.begin(), raw.end());
}

Bytes closing_payload() {
    static constexpr std::string_view raw = "\r</content>\r";
    return Bytes(raw.begin(), raw.end());
}

Bytes encode_opening(std::string_view latex) { return encode_literal(opening_payload(latex)); }

Bytes encode_closing() { return encode_literal(closing_payload()); }

namespace {

std::u32string_view trimmed(std::u32string_view line) {
    std::size_t b = 0;
    std::size_t e = line.size();
    auto blank = [](char32_t c) { return c == U' ' || c == U'\t' || c == U'\n'; };
    while (b < e && blank(line[b])) ++b;
    while (e > b && blank(line[e - 1])) --e;
    return line.substr(b, e - b);
}

std::vector<std::u32string_view> split_cr(const std::u32string& text) {
    std::vector<std::u32string_view> lines;
    std::size_t at = 0;
    while (true) {
        std::size_t cr = text.find(U'\r', at);
        if (cr == std::u32string::npos) {
            lines.push_back(std::u32string_view(text).substr(at));
            return lines;
        }
        lines.push_back(std::u32string_view(text).substr(at, cr - at));
        at = cr + 1;
    }
}

std::string line_bytes(std::u32string_view line) {
    std::u32string s(line);
    if (is_latin1(s)) {
        Bytes b = latin1_bytes(s);
        return std::string(b.begin(), b.end());
    }
    return to_utf8(s);
}

} // namespace

std::optional<AccessTagPayload> decode_payload(const TextString& actual_text) {
    auto lines = split_cr(actual_text.text);
    std::size_t first = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!trimmed(lines[i]).empty()) {
            first = i;
            break;
        }
    }
    if (first == lines.size()) return std::nullopt;

    if (trimmed(lines[first]) == U"</content>") {
        for (std::size_t i = first + 1; i < lines.size(); ++i)
            if (!trimmed(lines[i]).empty()) return std::nullopt;
        AccessTagPayload p;
        p.kind = AccessTagPayload::Kind::Closing;
        return p;
    }
    if (trimmed(lines[first]) != U"<latex>") return std::nullopt;

    std::size_t close = lines.size();
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (trimmed(lines[i]) == U"</latex>") {
            close = i;
            break;
        }
    }
    if (close == lines.size())
        throw Error(ErrorCode::MalformedDelimiters, "opening payload has no </latex> line");
    if (close + 1 >= lines.size() || trimmed(lines[close + 1]) != U"<content>")
        throw Error(ErrorCode::MalformedDelimiters, "opening payload has no <content> line");
    for (std::size_t i = close + 2; i < lines.size(); ++i)
        if (!trimmed(lines[i]).empty())
            throw Error(ErrorCode::MalformedDelimiters, "text after the <content> line");

    std::string latex;
    for (std::size_t i = first + 1; i < close; ++i) {
        if (i > first + 1) latex.push_back('\r');
        latex += line_bytes(lines[i]);
    }
    AccessTagPayload p;
    p.kind = AccessTagPayload::Kind::Opening;
    p.latex = std::move(latex);
    return p;
}

InjectTarget InjectTarget::structure(ObjectId elem) {
    InjectTarget t;
    t.kind = Kind::Structure;
    t.element = elem;
    return t;
}

InjectTarget InjectTarget::named_resource(std::string name) {
    InjectTarget t;
    t.kind = Kind::Resource;
    t.resource = std::move(name);
    return t;
}

InjectTarget InjectTarget::mcid_range(ObjectId page, std::int64_t first, std::int64_t last) {
    InjectTarget t;
    t.kind = Kind::Range;
    t.page = page;
    t.first_mcid = first;
    t.last_mcid = last;
    return t;
}

namespace {

std::optional<std::int64_t> bdc_mcid(const ContentOp& op) {
    const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&op);
    if (!bm || !bm->attrs) return std::nullopt;
    const CosValue* v = dict_get(*bm->attrs, "MCID");
    if (!v) return std::nullopt;
    return v->integer();
}

std::size_t matching_emc(const std::vector<ContentOp>& ops, std::size_t bdc) {
    int depth = 0;
    for (std::size_t j = bdc; j < ops.size(); ++j) {
        if (std::holds_alternative<OpBeginMarked>(ops[j])) ++depth;
        else if (std::holds_alternative<OpEndMarked>(ops[j])) {
            --depth;
            if (depth == 0) return j;
        }
    }
    throw Error(ErrorCode::UnbalancedMarkedContent, "marked span never closes");
}

std::optional<std::pair<std::size_t, std::size_t>> span_bounds(const std::vector<ContentOp>& ops,
                                                               std::int64_t mcid) {
    for (std::size_t i = 0; i < ops.size(); ++i) {
        auto m = bdc_mcid(ops[i]);
        if (m && *m == mcid) return std::make_pair(i, matching_emc(ops, i));
    }
    return std::nullopt;
}

// The BDC opening the span whose EMC sits at index j.
const OpBeginMarked* span_ending_at(const std::vector<ContentOp>& ops, std::size_t j) {
    int depth = 0;
    for (std::size_t i = j + 1; i-- > 0;) {
        if (std::holds_alternative<OpEndMarked>(ops[i])) ++depth;
        else if (const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&ops[i])) {
            --depth;
            if (depth == 0) return bm;
        }
    }
    return nullptr;
}

std::string pick_font(const Document& doc, ObjectId page) {
    const CosValue* res = page_attr(doc, page, "Resources");
    const CosValue* rv = res ? try_resolve(doc, *res) : nullptr;
    const CosDict* rd = rv ? rv->dict() : nullptr;
    const CosDict* fonts = rd ? get_dict(doc, *rd, "Font") : nullptr;
    if (!fonts || fonts->empty())
        throw Error(ErrorCode::UsageError, "page has no font resource for the fake space");
    return fonts->front().key;
}

std::vector<ContentOp> fake_space_ops(const std::string& tag, const std::string& font,
                                      Bytes payload, std::optional<std::int64_t> mcid) {
    OpBeginMarked bm;
    bm.tag = tag;
    CosDict attrs;
    if (mcid) dict_set(attrs, "MCID", cos_int(*mcid));
    dict_set(attrs, "ActualText", cos_literal(std::move(payload)));
    bm.attrs = std::move(attrs);

    OpSetFont tf;
    tf.font = font;
    tf.size = cos_int(1);
    OpShowText tj;
    tj.items.push_back(cos_literal(" "));

    std::vector<ContentOp> ops;
    ops.push_back(std::move(bm));
    ops.push_back(OpBeginText{});
    ops.push_back(std::move(tf));
    ops.push_back(std::move(tj));
    ops.push_back(OpEndText{});
    ops.push_back(OpEndMarked{});
    return ops;
}

struct Located {
    ObjectId page;
    std::vector<ContentOp> ops;
    std::size_t open_at = 0;  // opening group inserted before this index
    std::size_t close_at = 0; // closing group inserted at this index
};

Located locate_resource(const Document& doc, const std::string& name,
                        const InjectOptions& options) {
    for (ObjectId pg : page_ids(doc)) {
        std::vector<ContentOp> ops = parse_content(page_content(doc, pg));
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&ops[i]);
            if (!bm || bm->tag != "AF" || !bm->resource || *bm->resource != name) continue;
            std::size_t end = matching_emc(ops, i);

            int depth = 0;
            for (std::size_t j = i + 1; j < end; ++j) {
                if (const OpBeginMarked* child = std::get_if<OpBeginMarked>(&ops[j])) {
                    if (depth == 0 && child->tag == options.tag)
                        throw Error(ErrorCode::AlreadyTagged,
                                    "/" + name + " already carries /" + options.tag + " spans");
                    ++depth;
                } else if (std::holds_alternative<OpEndMarked>(ops[j])) {
                    --depth;
                }
            }

            Located loc;
            loc.page = pg;
            loc.open_at = i + 1;
            for (std::size_t j = i + 1; j < end; ++j) {
                if (std::holds_alternative<OpBeginMarked>(ops[j]) ||
                    std::holds_alternative<OpBeginText>(ops[j])) {
                    loc.open_at = j;
                    break;
                }
            }
            loc.close_at = end;
            loc.ops = std::move(ops);
            return loc;
        }
    }
    throw Error(ErrorCode::TargetNotFound, "no /AF wrapper named /" + name);
}

void check_adjacent_spans(const std::vector<ContentOp>& ops, std::size_t open_at,
                          std::size_t close_at, const std::string& tag) {
    if (open_at > 0 && std::holds_alternative<OpEndMarked>(ops[open_at - 1])) {
        const OpBeginMarked* bm = span_ending_at(ops, open_at - 1);
        if (bm && bm->tag == tag)
            throw Error(ErrorCode::AlreadyTagged, "an adjacent /" + tag + " span already exists");
    }
    if (close_at < ops.size()) {
        if (const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&ops[close_at]))
            if (bm->tag == tag)
                throw Error(ErrorCode::AlreadyTagged,
                            "an adjacent /" + tag + " span already exists");
    }
}

// Ancestor chain, element first, topmost last.
std::vector<ObjectId> ancestor_chain(const StructTree& tree, ObjectId elem) {
    std::vector<ObjectId> chain;
    ObjectId at = elem;
    while (true) {
        chain.push_back(at);
        auto it = tree.elems.find(at);
        if (it == tree.elems.end() || it->second.parent == tree.root_id) break;
        at = it->second.parent;
    }
    return chain;
}

// Nearest ancestor with /S /Formula of the elements owning the given MCIDs;
// their common ancestor when none is a Formula.
std::optional<ObjectId> find_formula_node(const StructTree& tree, ObjectId page,
                                          const std::set<std::int64_t>& mcids) {
    std::vector<ObjectId> owners;
    for (const auto& [id, elem] : tree.elems) {
        if (!elem.effective_page || !(*elem.effective_page == page)) continue;
        for (const StructKid& kid : elem.kids) {
            if (kid.mcid() && mcids.count(*kid.mcid()) &&
                std::find(owners.begin(), owners.end(), id) == owners.end())
                owners.push_back(id);
        }
    }
    if (owners.empty()) return std::nullopt;

    std::vector<ObjectId> acc = ancestor_chain(tree, owners.front());
    for (std::size_t i = 1; i < owners.size(); ++i) {
        std::set<ObjectId> in_acc(acc.begin(), acc.end());
        std::optional<ObjectId> meet;
        for (ObjectId e : ancestor_chain(tree, owners[i])) {
            if (in_acc.count(e)) {
                meet = e;
                break;
            }
        }
        if (!meet) return std::nullopt;
        acc.erase(acc.begin(), std::find(acc.begin(), acc.end(), *meet));
    }
    for (ObjectId e : acc)
        if (tree.elems.at(e).s == "Formula") return e;
    return acc.front();
}

ObjectId make_accesstag_elem(Document& doc, const std::string& role, ObjectId parent,
                             ObjectId page, std::int64_t mcid) {
    CosDict d;
    dict_set(d, "Type", cos_name("StructElem"));
    dict_set(d, "S", cos_name(role));
    dict_set(d, "P", cos_ref(parent.number));
    dict_set(d, "Pg", cos_ref(page.number));
    CosArray k;
    k.push_back(cos_int(mcid));
    dict_set(d, "K", cos_array(std::move(k)));
    ObjectId id = next_object_id(doc);
    doc.objects.emplace(id, cos_dict(std::move(d)));
    return id;
}

void wire_formula_kids(Document& doc, ObjectId formula, ObjectId opening, ObjectId closing) {
    auto it = doc.objects.find(formula);
    if (it == doc.objects.end())
        throw Error(ErrorCode::DanglingReference,
                    "no formula object " + std::to_string(formula.number));
    CosDict* fd = it->second.dict();
    if (!fd) throw Error(ErrorCode::SyntaxError, "formula element is not a dictionary");

    CosArray* arr = nullptr;
    CosValue* k = dict_get(*fd, "K");
    if (!k) {
        dict_set(*fd, "K", cos_array({}));
        arr = dict_get(*fd, "K")->array();
    } else if (k->array()) {
        arr = k->array();
    } else if (const ObjectId* kid = k->ref()) {
        auto kit = doc.objects.find(*kid);
        if (kit != doc.objects.end() && kit->second.array()) {
            arr = kit->second.array();
        } else {
            CosArray wrapped;
            wrapped.push_back(*k);
            dict_set(*fd, "K", cos_array(std::move(wrapped)));
            arr = dict_get(*fd, "K")->array();
        }
    } else {
        CosArray wrapped;
        wrapped.push_back(*k);
        dict_set(*fd, "K", cos_array(std::move(wrapped)));
        arr = dict_get(*fd, "K")->array();
    }
    arr->insert(arr->begin(), cos_ref(opening.number));
    arr->push_back(cos_ref(closing.number));
}

} // namespace

InjectResult inject_access_tags(Document& doc, const InjectTarget& target,
                                std::string_view latex, const InjectOptions& options) {
    std::optional<StructTree> tree;
    try {
        tree = parse_structure(doc);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingStructTreeRoot) throw;
    }

    Located loc;
    std::optional<ObjectId> formula;

    switch (target.kind) {
    case InjectTarget::Kind::Resource:
        loc = locate_resource(doc, target.resource, options);
        break;
    case InjectTarget::Kind::Structure: {
        if (!tree)
            throw Error(ErrorCode::MissingStructTreeRoot, "document has no structure tree");
        auto it = tree->elems.find(target.element);
        if (it == tree->elems.end())
            throw Error(ErrorCode::TargetNotFound,
                        "no structure element " + std::to_string(target.element.number));
        std::vector<std::pair<ObjectId, std::int64_t>> located;
        std::function<void(const StructElem&)> walk = [&](const StructElem& e) {
            for (const StructKid& kid : e.kids) {
                if (const std::int64_t* m = kid.mcid()) {
                    if (!e.effective_page)
                        throw Error(ErrorCode::DanglingMcid,
                                    "element " + std::to_string(e.id.number) +
                                        " has marked content but no page");
                    located.emplace_back(*e.effective_page, *m);
                } else if (const ObjectId* child = kid.elem()) {
                    walk(tree->elems.at(*child));
                }
            }
        };
        walk(it->second);
        if (located.empty())
            throw Error(ErrorCode::TargetNotFound,
                        "element " + std::to_string(target.element.number) +
                            " has no marked content");
        loc.page = located.front().first;
        for (const auto& [pg, m] : located)
            if (!(pg == loc.page))
                throw Error(ErrorCode::CrossesPageBoundary,
                            "element content spans more than one page");
        loc.ops = parse_content(page_content(doc, loc.page));
        std::size_t first = SIZE_MAX;
        std::size_t last = 0;
        for (const auto& [pg, m] : located) {
            auto bounds = span_bounds(loc.ops, m);
            if (!bounds)
                throw Error(ErrorCode::DanglingMcid,
                            "MCID " + std::to_string(m) + " not found in page content");
            first = std::min(first, bounds->first);
            last = std::max(last, bounds->second);
        }
        loc.open_at = first;
        loc.close_at = last + 1;
        check_adjacent_spans(loc.ops, loc.open_at, loc.close_at, options.tag);
        formula = target.element;
        break;
    }
    case InjectTarget::Kind::Range: {
        loc.page = target.page;
        loc.ops = parse_content(page_content(doc, loc.page));
        auto first = span_bounds(loc.ops, target.first_mcid);
        auto last = span_bounds(loc.ops, target.last_mcid);
        if (!first || !last)
            throw Error(ErrorCode::TargetNotFound, "MCID range not found on the page");
        if (last->second < first->first)
            throw Error(ErrorCode::TargetNotFound, "MCID range is reversed");
        loc.open_at = first->first;
        loc.close_at = last->second + 1;
        check_adjacent_spans(loc.ops, loc.open_at, loc.close_at, options.tag);
        break;
    }
    }

    std::set<std::int64_t> range_mcids;
    std::set<std::int64_t> page_mcids;
    for (std::size_t i = 0; i < loc.ops.size(); ++i) {
        if (auto m = bdc_mcid(loc.ops[i])) {
            page_mcids.insert(*m);
            if (i >= loc.open_at && i < loc.close_at) range_mcids.insert(*m);
        }
    }

    if (tree && !formula && !range_mcids.empty())
        formula = find_formula_node(*tree, loc.page, range_mcids);

    if (tree && formula) {
        const StructElem& fe = tree->elems.at(*formula);
        for (const StructKid& kid : fe.kids) {
            if (!kid.elem()) continue;
            auto kit = tree->elems.find(*kid.elem());
            if (kit != tree->elems.end() && kit->second.s == options.struct_role)
                throw Error(ErrorCode::AlreadyTagged,
                            "element " + std::to_string(formula->number) +
                                " already has /" + options.struct_role + " kids");
        }
    }

    bool wire = tree.has_value() && formula.has_value() && !range_mcids.empty();
    std::optional<std::int64_t> opening_mcid;
    std::optional<std::int64_t> closing_mcid;
    if (wire) {
        std::int64_t lowest = *range_mcids.begin();
        std::int64_t page_max = page_mcids.empty() ? -1 : *page_mcids.rbegin();
        if (lowest > 0 && !page_mcids.count(lowest - 1))
            opening_mcid = lowest - 1;
        else
            opening_mcid = page_max + 1;
        closing_mcid = std::max(page_max, *opening_mcid) + 1;
    }

    std::string font = options.font.empty() ? pick_font(doc, loc.page) : options.font;
    std::vector<ContentOp> opening =
        fake_space_ops(options.tag, font, opening_payload(latex), opening_mcid);
    std::vector<ContentOp> closing =
        fake_space_ops(options.tag, font, closing_payload(), closing_mcid);

    loc.ops.insert(loc.ops.begin() + static_cast<std::ptrdiff_t>(loc.close_at),
                   closing.begin(), closing.end());
    loc.ops.insert(loc.ops.begin() + static_cast<std::ptrdiff_t>(loc.open_at),
                   opening.begin(), opening.end());
    set_page_content(doc, loc.page, serialize_content(loc.ops));

    InjectResult result;
    result.page = loc.page;
    result.opening_mcid = opening_mcid;
    result.closing_mcid = closing_mcid;
    if (wire) {
        ObjectId open_elem =
            make_accesstag_elem(doc, options.struct_role, *formula, loc.page, *opening_mcid);
        ObjectId close_elem =
            make_accesstag_elem(doc, options.struct_role, *formula, loc.page, *closing_mcid);
        wire_formula_kids(doc, *formula, open_elem, close_elem);
        if (options.update_role_map) ensure_role_map_entry(doc, options.struct_role, "Custom");
        regenerate_parent_tree(doc);
        result.opening_elem = open_elem;
        result.closing_elem = close_elem;
    }
    return result;
}

} // namespace mathtag
