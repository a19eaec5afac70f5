// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mathtag/cos.hpp"
#include "mathtag/text_codec.hpp"

namespace mathtag {

struct OpBeginText {
    friend bool operator==(const OpBeginText&, const OpBeginText&) { return true; }
};

struct OpEndText {
    friend bool operator==(const OpEndText&, const OpEndText&) { return true; }
};

struct OpSetFont {
    std::string font;
    CosValue size;
    friend bool operator==(const OpSetFont&, const OpSetFont&) = default;
};

// TJ: strings interleaved with kern numbers, preserved verbatim.
struct OpShowText {
    CosArray items;
    friend bool operator==(const OpShowText&, const OpShowText&) = default;
};

struct OpTransform {
    CosArray matrix; // six numbers
    friend bool operator==(const OpTransform&, const OpTransform&) = default;

    double horizontal_translation() const;
};

// BDC (inline dictionary or named resource) or BMC (neither).
struct OpBeginMarked {
    std::string tag;
    std::optional<CosDict> attrs;
    std::optional<std::string> resource;
    friend bool operator==(const OpBeginMarked&, const OpBeginMarked&) = default;
};

struct OpEndMarked {
    friend bool operator==(const OpEndMarked&, const OpEndMarked&) { return true; }
};

struct OpOther {
    std::string op;
    CosArray operands;
    friend bool operator==(const OpOther&, const OpOther&) = default;
};

using ContentOp = std::variant<OpBeginText, OpEndText, OpSetFont, OpShowText, OpTransform,
                               OpBeginMarked, OpEndMarked, OpOther>;

std::vector<ContentOp> parse_content(std::span<const std::uint8_t> bytes);

struct SpanChild;

// One BDC..EMC region. Attributes come from the inline dictionary (MCID,
// ActualText, Alt picked out; the rest kept in other_attrs) or from a named
// resource, never both.
struct SpanNode {
    std::string tag;
    std::optional<std::int64_t> mcid;
    std::optional<TextString> actual_text;
    std::optional<TextString> alt;
    std::optional<std::string> named_resource;
    CosDict other_attrs;
    bool inline_dict = false;
    std::vector<SpanChild> children;
};

struct SpanChild {
    std::variant<SpanNode, ContentOp> v;

    const SpanNode* span() const { return std::get_if<SpanNode>(&v); }
    SpanNode* span() { return std::get_if<SpanNode>(&v); }
    const ContentOp* op() const { return std::get_if<ContentOp>(&v); }
};

bool operator==(const SpanNode& a, const SpanNode& b);
bool operator==(const SpanChild& a, const SpanChild& b);

std::vector<SpanChild> build_span_tree(const std::vector<ContentOp>& ops);
std::vector<ContentOp> flatten_span_tree(const std::vector<SpanChild>& tree);

Bytes serialize_content(const std::vector<ContentOp>& ops);
Bytes serialize_content(const std::vector<SpanChild>& tree);

// Unique span carrying this MCID, nullptr when absent.
const SpanNode* find_span_by_mcid(const std::vector<SpanChild>& tree, std::int64_t mcid);

// The BDC attribute dictionary a span serializes to (MCID, ActualText, Alt,
// then the preserved remainder).
CosDict span_attributes(const SpanNode& span);

} // namespace mathtag
