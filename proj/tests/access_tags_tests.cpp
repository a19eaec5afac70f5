// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"

#include "checks.hpp"
#include "fixtures.hpp"
#include "mathtag/access_tags.hpp"
#include "mathtag/attachments.hpp"
#include "mathtag/content_stream.hpp"
#include "mathtag/errors.hpp"
#include "mathtag/structure_tree.hpp"
#include "mathtag/validate.hpp"

using namespace mathtag;
using checks::bytes_of;
using checks::text_of;
using checks::thrown_code;

namespace {

TextString latin1_text(std::string_view s) {
    return decode_text(bytes_of(s), StringOrigin::Literal);
}

std::vector<ContentOp> page_ops(const Document& doc, ObjectId page) {
    return parse_content(page_content(doc, page));
}

// Strips every six-op fake-space group carrying the given tag.
std::vector<ContentOp> without_tag_groups(std::vector<ContentOp> ops, const std::string& tag) {
    for (std::size_t i = ops.size(); i-- > 0;) {
        const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&ops[i]);
        if (bm && bm->tag == tag)
            ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(i),
                      ops.begin() + static_cast<std::ptrdiff_t>(i) + 6);
    }
    return ops;
}

} // namespace

TEST_CASE("opening payloads carry CR-framed delimiter lines") {
    CHECK(opening_payload("k \\in \\RR") ==
          bytes_of("\r<latex>\rk \\in \\RR\r</latex>\r<content>\r"));
    CHECK(closing_payload() == bytes_of("\r</content>\r"));
}

TEST_CASE("encoded payloads match the escaped golden form") {
    CHECK(text_of(encode_opening("k \\in \\RR")) ==
          "\\015<latex>\\015k \\134in \\134RR\\015</latex>\\015<content>\\015");
    CHECK(text_of(encode_closing()) == "\\015</content>\\015");

    for (std::uint8_t b : encode_opening("f(x) = \\sqrt{x}\r+1")) {
        CHECK(b != '(');
        CHECK(b != ')');
        CHECK(b != '\r');
    }
    CHECK(decode_literal(encode_opening("f(x) = \\sqrt{x}\r+1")) ==
          opening_payload("f(x) = \\sqrt{x}\r+1"));
}

TEST_CASE("payload decoding recognizes both delimiters and rejects noise") {
    auto opening = decode_payload(latin1_text("\r<latex>\rk \\in \\RR\r</latex>\r<content>\r"));
    REQUIRE(opening.has_value());
    CHECK(opening->kind == AccessTagPayload::Kind::Opening);
    CHECK(opening->latex == "k \\in \\RR");

    auto closing = decode_payload(latin1_text("\r</content>\r"));
    REQUIRE(closing.has_value());
    CHECK(closing->kind == AccessTagPayload::Kind::Closing);
    CHECK(decode_payload(latin1_text("\r\r</content>\r\r"))->kind ==
          AccessTagPayload::Kind::Closing);

    CHECK(!decode_payload(latin1_text("hello")).has_value());
    CHECK(!decode_payload(latin1_text("")).has_value());
    CHECK(!decode_payload(latin1_text("x\r<latex>\ry\r</latex>\r<content>\r")).has_value());
    CHECK(!decode_payload(latin1_text("\r</content>\rgarbage")).has_value());
}

TEST_CASE("multi-line sources survive the payload round trip") {
    std::string latex = "\\begin{align}\ra &= b\\\\\rc &= d\r\\end{align}";
    auto p = decode_payload(decode_text(opening_payload(latex), StringOrigin::Literal));
    REQUIRE(p.has_value());
    CHECK(p->latex == latex);
}

TEST_CASE("delimiter lines match after trailing-whitespace trimming") {
    auto p = decode_payload(latin1_text("\r<latex> \rx\r</latex>\t\r<content>\n\r"));
    REQUIRE(p.has_value());
    CHECK(p->latex == "x");
}

TEST_CASE("half-open payloads are malformed rather than ignored") {
    CHECK(thrown_code([] { decode_payload(latin1_text("\r<latex>\rx")); }) ==
          ErrorCode::MalformedDelimiters);
    CHECK(thrown_code([] { decode_payload(latin1_text("\r<latex>\rx\r</latex>\r")); }) ==
          ErrorCode::MalformedDelimiters);
    CHECK(thrown_code([] {
              decode_payload(latin1_text("\r<latex>\rx\r</latex>\r<content>\rextra"));
          }) == ErrorCode::MalformedDelimiters);
}

TEST_CASE("resource injection reproduces the tagged fixture") {
    Document doc = parse_document(fixtures::fig_pre_pdf());
    InjectOptions opts;
    opts.font = "F79";
    InjectResult r =
        inject_access_tags(doc, InjectTarget::named_resource("inline-1"), "k \\in \\RR", opts);

    CHECK(r.page == ObjectId{5, 0});
    CHECK(r.opening_mcid == 8);
    CHECK(r.closing_mcid == 12);
    REQUIRE(r.opening_elem.has_value());
    REQUIRE(r.closing_elem.has_value());

    Document reference = parse_document(fixtures::fig_full_pdf());
    CHECK(page_ops(doc, r.page) == page_ops(reference, ObjectId{5, 0}));

    StructTree tree = parse_structure(doc);
    const StructElem& formula = tree.elems.at(ObjectId{112, 0});
    REQUIRE(formula.kids.size() == 3);
    CHECK(formula.kids[0].elem());
    CHECK(*formula.kids[0].elem() == *r.opening_elem);
    CHECK(*formula.kids[1].elem() == ObjectId{120, 0});
    CHECK(*formula.kids[2].elem() == *r.closing_elem);

    const StructElem& open_elem = tree.elems.at(*r.opening_elem);
    CHECK(open_elem.s == "accesstag");
    CHECK(open_elem.parent == ObjectId{112, 0});
    REQUIRE(open_elem.kids.size() == 1);
    CHECK(*open_elem.kids[0].mcid() == 8);
    CHECK(*tree.elems.at(*r.closing_elem).kids[0].mcid() == 12);

    const CosValue* mapped = dict_get(tree.role_map, "accesstag");
    REQUIRE(mapped);
    CHECK(*mapped->name() == "Custom");

    const auto& row = tree.parent_tree.at(0);
    REQUIRE(row.size() == 13);
    CHECK(row[8] == *r.opening_elem);
    CHECK(row[9] == ObjectId{114, 0});
    CHECK(row[12] == *r.closing_elem);

    auto spans = resolve_marked_content(doc, tree, ObjectId{112, 0});
    REQUIRE(spans.size() == 5);
    for (std::size_t i = 0; i < spans.size(); ++i) CHECK(*spans[i].mcid == 8 + i);

    CHECK(validate_bytes(serialize_document(doc)).empty());
}

TEST_CASE("injected payloads decode back from the page content") {
    Document doc = parse_document(fixtures::fig_pre_pdf());
    inject_access_tags(doc, InjectTarget::named_resource("inline-1"), "k \\in \\RR", {});

    Document again = parse_document(serialize_document(doc));
    auto tree = build_span_tree(page_ops(again, ObjectId{5, 0}));
    const SpanNode* open_span = find_span_by_mcid(tree, 8);
    REQUIRE(open_span);
    CHECK(open_span->tag == "AccessTag");
    REQUIRE(open_span->actual_text.has_value());
    auto p = decode_payload(*open_span->actual_text);
    REQUIRE(p.has_value());
    CHECK(p->latex == "k \\in \\RR");
    const SpanNode* close_span = find_span_by_mcid(tree, 12);
    REQUIRE(close_span);
    REQUIRE(close_span->actual_text.has_value());
    CHECK(decode_payload(*close_span->actual_text)->kind == AccessTagPayload::Kind::Closing);
}

TEST_CASE("structure injection brackets the element's own spans") {
    Document doc = parse_document(fixtures::fig_pre_pdf());
    std::vector<ContentOp> before = page_ops(doc, ObjectId{5, 0});
    InjectOptions opts;
    opts.font = "F79";
    InjectResult r =
        inject_access_tags(doc, InjectTarget::structure(ObjectId{112, 0}), "k \\in \\RR", opts);

    CHECK(r.opening_mcid == 8);
    CHECK(r.closing_mcid == 12);

    std::vector<ContentOp> after = page_ops(doc, r.page);
    REQUIRE(after.size() == before.size() + 12);
    const OpBeginMarked* open = std::get_if<OpBeginMarked>(&after[2]);
    REQUIRE(open);
    CHECK(open->tag == "AccessTag");

    const OpBeginMarked* close = std::get_if<OpBeginMarked>(&after[29]);
    REQUIRE(close);
    REQUIRE(close->attrs.has_value());
    CHECK(dict_get(*close->attrs, "MCID")->integer() == 12);
    const OpTransform* trailing = std::get_if<OpTransform>(&after[35]);
    REQUIRE(trailing);
    CHECK(trailing->horizontal_translation() == doctest::Approx(7.879));
    CHECK(std::holds_alternative<OpEndMarked>(after[36]));

    CHECK(validate_bytes(serialize_document(doc)).empty());
}

TEST_CASE("mcid-range injection wires through the nearest formula ancestor") {
    Document doc = parse_document(fixtures::fig_pre_pdf());
    InjectResult r = inject_access_tags(
        doc, InjectTarget::mcid_range(ObjectId{5, 0}, 9, 11), "k \\in \\RR", {});

    CHECK(r.opening_mcid == 8);
    CHECK(r.closing_mcid == 12);
    REQUIRE(r.opening_elem.has_value());

    StructTree tree = parse_structure(doc);
    const StructElem& formula = tree.elems.at(ObjectId{112, 0});
    REQUIRE(formula.kids.size() == 3);
    CHECK(*formula.kids[0].elem() == *r.opening_elem);

    auto spans = resolve_marked_content(doc, tree, ObjectId{112, 0});
    REQUIRE(spans.size() == 5);
    CHECK(*spans[0].mcid == 8);
    CHECK(*spans[4].mcid == 12);

    CHECK(validate_bytes(serialize_document(doc)).empty());
}

TEST_CASE("injection works without a structure tree") {
    Document doc = parse_document(fixtures::wrapped_untagged_pdf());
    InjectResult r =
        inject_access_tags(doc, InjectTarget::named_resource("snippet"), "E = mc^2", {});

    CHECK(!r.opening_mcid.has_value());
    CHECK(!r.closing_mcid.has_value());
    CHECK(!r.opening_elem.has_value());

    auto tree = build_span_tree(page_ops(doc, r.page));
    REQUIRE(tree.size() >= 2);
    const SpanNode* wrapper = tree[1].span();
    REQUIRE(wrapper);
    const SpanNode* open_span = wrapper->children.front().span();
    REQUIRE(open_span);
    CHECK(open_span->tag == "AccessTag");
    CHECK(!open_span->mcid.has_value());
    CHECK(decode_payload(*open_span->actual_text)->latex == "E = mc^2");

    CHECK(validate_bytes(serialize_document(doc)).empty());
}

TEST_CASE("a second injection is rejected as already tagged") {
    Document doc = parse_document(fixtures::fig_full_pdf());
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::named_resource("inline-1"), "x", {});
          }) == ErrorCode::AlreadyTagged);
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::structure(ObjectId{112, 0}), "x", {});
          }) == ErrorCode::AlreadyTagged);
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::mcid_range(ObjectId{5, 0}, 9, 11), "x", {});
          }) == ErrorCode::AlreadyTagged);
}

TEST_CASE("injection refuses content spread across pages") {
    Document doc = parse_document(fixtures::two_pages_pdf());
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::structure(ObjectId{10, 0}), "x", {});
          }) == ErrorCode::CrossesPageBoundary);
}

TEST_CASE("missing targets are reported by kind") {
    Document doc = parse_document(fixtures::fig_pre_pdf());
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::named_resource("nope"), "x", {});
          }) == ErrorCode::TargetNotFound);
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::structure(ObjectId{999, 0}), "x", {});
          }) == ErrorCode::TargetNotFound);
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::mcid_range(ObjectId{5, 0}, 50, 60), "x", {});
          }) == ErrorCode::TargetNotFound);

    Document bare = parse_document(fixtures::minimal_pdf());
    CHECK(thrown_code([&] {
              inject_access_tags(bare, InjectTarget::structure(ObjectId{1, 0}), "x", {});
          }) == ErrorCode::MissingStructTreeRoot);
}

TEST_CASE("a page without fonts cannot host the fake space") {
    Document doc = parse_document(fixtures::minimal_pdf());
    ObjectId page = page_ids(doc).front();
    wrap_content_span(doc, page, "bare", 0, 1);
    CHECK(thrown_code([&] {
              inject_access_tags(doc, InjectTarget::named_resource("bare"), "x", {});
          }) == ErrorCode::UsageError);
}

TEST_CASE("the marked-content tag and role map are configurable") {
    Document doc = parse_document(fixtures::fig_pre_pdf());
    InjectOptions opts;
    opts.tag = "Span";
    opts.update_role_map = false;
    InjectResult r =
        inject_access_tags(doc, InjectTarget::named_resource("inline-1"), "k \\in \\RR", opts);

    std::vector<ContentOp> ops = page_ops(doc, r.page);
    const OpBeginMarked* open = std::get_if<OpBeginMarked>(&ops[2]);
    REQUIRE(open);
    CHECK(open->tag == "Span");

    StructTree tree = parse_structure(doc);
    CHECK(tree.role_map.empty());
    CHECK(tree.elems.at(*r.opening_elem).s == "accesstag");
}

TEST_CASE("injection only ever adds the two fake-space groups") {
    struct Case {
        const char* name;
        InjectTarget target;
        std::string tag;
    };
    std::vector<Case> cases = {
        {"resource", InjectTarget::named_resource("inline-1"), "AccessTag"},
        {"structure", InjectTarget::structure(ObjectId{112, 0}), "AccessTag"},
        {"range", InjectTarget::mcid_range(ObjectId{5, 0}, 9, 11), "AccessTag"},
    };
    std::vector<std::string> sources = {
        "k \\in \\RR",
        "f(x) = (a)(b) % odd",
        "line one\rline two",
        "\\frac{1}{2} $x$",
    };
    for (const Case& c : cases) {
        for (const std::string& latex : sources) {
            CAPTURE(c.name);
            CAPTURE(latex);
            Document doc = parse_document(fixtures::fig_pre_pdf());
            std::vector<ContentOp> before = page_ops(doc, ObjectId{5, 0});
            InjectOptions opts;
            opts.font = "F79";
            InjectResult r = inject_access_tags(doc, c.target, latex, opts);
            std::vector<ContentOp> after = page_ops(doc, r.page);
            REQUIRE(after.size() == before.size() + 12);
            CHECK(without_tag_groups(after, c.tag) == before);
        }
    }
}
