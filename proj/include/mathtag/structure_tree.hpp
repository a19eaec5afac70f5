// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mathtag/content_stream.hpp"
#include "mathtag/cos.hpp"

namespace mathtag {

// A /K kid: either a child element or a marked-content id on the element's
// effective page.
struct StructKid {
    std::variant<ObjectId, std::int64_t> v;

    const ObjectId* elem() const { return std::get_if<ObjectId>(&v); }
    const std::int64_t* mcid() const { return std::get_if<std::int64_t>(&v); }
    friend bool operator==(const StructKid&, const StructKid&) = default;
};

struct StructElem {
    ObjectId id;
    std::string s;
    std::vector<StructKid> kids;
    ObjectId parent;
    std::optional<ObjectId> page;           // own /Pg
    std::optional<ObjectId> effective_page; // own or inherited from the closest ancestor
    std::optional<CosDict> attributes;      // /A
    std::optional<std::string> elem_id;     // /ID bytes
    std::optional<TextString> title;        // /T
    std::vector<ObjectId> associated_files; // /AF
};

struct StructTree {
    ObjectId root_id;
    std::vector<ObjectId> root_kids;
    std::map<ObjectId, StructElem> elems;
    CosDict role_map;
    std::map<std::int64_t, std::vector<std::optional<ObjectId>>> parent_tree;
};

StructTree parse_structure(const Document& doc);

// Ordered depth-first MCID kids of the element, each resolved to its
// marked-content span on the effective page.
std::vector<SpanNode> resolve_marked_content(const Document& doc, const StructTree& tree,
                                             ObjectId elem);

// Sets (or, for an empty list, removes) the element's /AF array and keeps the
// /MarkInfo registry in step.
void attach_af_to_struct(Document& doc, ObjectId elem, const std::vector<ObjectId>& filespecs);

// Layout for a Formula subtree over content spans already present on a page.
struct FormulaLayout {
    struct Leaf {
        std::string role; // mi, mo, ...
        std::int64_t mcid;
        std::optional<CosDict> attributes;
    };
    ObjectId parent;
    std::vector<Leaf> leaves;                  // children of math/mrow, in order
    std::optional<std::int64_t> opening_mcid;  // leading accesstag
    std::optional<std::int64_t> closing_mcid;  // trailing accesstag
    std::vector<ObjectId> associated_files;
    std::optional<CosDict> formula_attributes; // /A of the Formula node
    std::optional<CosDict> math_attributes;    // /A of the math node
};

ObjectId build_formula_subtree(Document& doc, ObjectId page, const FormulaLayout& layout);

// Rebuilds /ParentTree (page /StructParents index -> MCID-indexed element
// array) from the current tree and page contents.
void regenerate_parent_tree(Document& doc);

// Ensures /RoleMap maps `from` to `to`.
void ensure_role_map_entry(Document& doc, const std::string& from, const std::string& to);

// Element lookup by /ID bytes.
std::optional<ObjectId> find_elem_by_id(const StructTree& tree, std::string_view elem_id);

} // namespace mathtag
