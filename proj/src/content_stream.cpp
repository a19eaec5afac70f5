// SPDX-License-Identifier: Apache-2.0

#include "mathtag/content_stream.hpp"

#include <algorithm>

#include "mathtag/errors.hpp"

namespace mathtag {

namespace {

bool is_ws(std::uint8_t c) {
    return c == '\0' || c == '\t' || c == '\n' || c == '\f' || c == '\r' || c == ' ';
}

bool is_delim(std::uint8_t c) {
    switch (c) {
    case '(': case ')': case '<': case '>': case '[': case ']':
    case '{': case '}': case '/': case '%':
        return true;
    default:
        return false;
    }
}

bool starts_value(std::uint8_t c) {
    return c == '(' || c == '<' || c == '[' || c == '/' || c == '+' || c == '-' || c == '.' ||
           (c >= '0' && c <= '9');
}

bool is_number(const CosValue& v) {
    return v.integer().has_value() || std::holds_alternative<double>(v.v);
}

bool is_string(const CosValue& v) { return v.literal() || v.hex_bytes(); }

TextString decode_attr_string(const CosValue& v) {
    if (const Bytes* b = v.literal())
        return decode_text(std::span<const std::uint8_t>(b->data(), b->size()),
                           StringOrigin::Literal);
    const Bytes* h = v.hex_bytes();
    return decode_text(std::span<const std::uint8_t>(h->data(), h->size()), StringOrigin::Hex);
}

} // namespace

double OpTransform::horizontal_translation() const {
    if (matrix.size() != 6) return 0.0;
    return matrix[4].number().value_or(0.0);
}

std::vector<ContentOp> parse_content(std::span<const std::uint8_t> bytes) {
    std::vector<ContentOp> ops;
    CosArray operands;
    std::size_t pos = 0;
    bool in_text = false;
    const std::size_t n = bytes.size();

    auto operand_error = [&](const char* op, std::size_t at) {
        throw Error(ErrorCode::SyntaxError,
                    std::string("bad operands for ") + op, at);
    };

    while (true) {
        while (pos < n) {
            std::uint8_t c = bytes[pos];
            if (is_ws(c)) {
                ++pos;
            } else if (c == '%') {
                while (pos < n && bytes[pos] != '\n' && bytes[pos] != '\r') ++pos;
            } else {
                break;
            }
        }
        if (pos >= n) break;

        std::uint8_t c = bytes[pos];
        if (starts_value(c)) {
            auto [value, next] = parse_value(bytes, pos);
            operands.push_back(std::move(value));
            pos = next;
            continue;
        }
        if (is_delim(c))
            throw Error(ErrorCode::SyntaxError, "unexpected delimiter in content stream", pos);

        std::size_t at = pos;
        std::size_t start = pos;
        while (pos < n && !is_ws(bytes[pos]) && !is_delim(bytes[pos])) ++pos;
        std::string op(reinterpret_cast<const char*>(bytes.data()) + start, pos - start);

        if (op == "true" || op == "false" || op == "null") {
            operands.push_back(op == "true" ? cos_bool(true)
                                            : op == "false" ? cos_bool(false) : cos_null());
            continue;
        }

        if (op == "BT") {
            if (in_text)
                throw Error(ErrorCode::UnbalancedTextBlock, "BT inside a text block", at);
            in_text = true;
            ops.push_back(OpBeginText{});
        } else if (op == "ET") {
            if (!in_text)
                throw Error(ErrorCode::UnbalancedTextBlock, "ET without BT", at);
            in_text = false;
            ops.push_back(OpEndText{});
        } else if (op == "Tf") {
            if (operands.size() != 2 || !operands[0].name() || !is_number(operands[1]))
                operand_error("Tf", at);
            ops.push_back(OpSetFont{*operands[0].name(), operands[1]});
        } else if (op == "TJ") {
            if (!in_text)
                throw Error(ErrorCode::UnbalancedTextBlock, "TJ outside BT/ET", at);
            if (operands.size() != 1 || !operands[0].array()) operand_error("TJ", at);
            for (const CosValue& item : *operands[0].array())
                if (!is_string(item) && !is_number(item)) operand_error("TJ", at);
            ops.push_back(OpShowText{std::move(*operands[0].array())});
        } else if (op == "cm") {
            if (operands.size() != 6) operand_error("cm", at);
            for (const CosValue& v : operands)
                if (!is_number(v)) operand_error("cm", at);
            ops.push_back(OpTransform{std::move(operands)});
            operands = CosArray{};
            continue;
        } else if (op == "BDC") {
            if (operands.size() != 2 || !operands[0].name() ||
                (!operands[1].dict() && !operands[1].name()))
                operand_error("BDC", at);
            OpBeginMarked bm;
            bm.tag = *operands[0].name();
            if (operands[1].dict())
                bm.attrs = std::move(*operands[1].dict());
            else
                bm.resource = *operands[1].name();
            ops.push_back(std::move(bm));
        } else if (op == "BMC") {
            if (operands.size() != 1 || !operands[0].name()) operand_error("BMC", at);
            ops.push_back(OpBeginMarked{*operands[0].name(), std::nullopt, std::nullopt});
        } else if (op == "EMC") {
            if (!operands.empty()) operand_error("EMC", at);
            ops.push_back(OpEndMarked{});
        } else if (op == "BI") {
            throw Error(ErrorCode::UnsupportedFeature, "inline images are not supported", at);
        } else {
            ops.push_back(OpOther{std::move(op), std::move(operands)});
            operands = CosArray{};
            continue;
        }
        operands.clear();
    }

    if (!operands.empty())
        throw Error(ErrorCode::SyntaxError, "operands with no operator at end of stream", pos);
    if (in_text)
        throw Error(ErrorCode::UnbalancedTextBlock, "BT without ET at end of stream", pos);
    return ops;
}

bool operator==(const SpanNode& a, const SpanNode& b) {
    return a.tag == b.tag && a.mcid == b.mcid && a.actual_text == b.actual_text &&
           a.alt == b.alt && a.named_resource == b.named_resource &&
           a.other_attrs == b.other_attrs && a.inline_dict == b.inline_dict &&
           a.children == b.children;
}

bool operator==(const SpanChild& a, const SpanChild& b) { return a.v == b.v; }

namespace {

SpanNode span_from_bdc(const OpBeginMarked& bm) {
    SpanNode s;
    s.tag = bm.tag;
    if (bm.resource) {
        s.named_resource = bm.resource;
        return s;
    }
    if (!bm.attrs) return s;
    s.inline_dict = true;
    for (const DictEntry& e : *bm.attrs) {
        if (e.key == "MCID" && !s.mcid && e.value.integer()) {
            s.mcid = *e.value.integer();
        } else if (e.key == "ActualText" && !s.actual_text &&
                   (e.value.literal() || e.value.hex_bytes())) {
            s.actual_text = decode_attr_string(e.value);
        } else if (e.key == "Alt" && !s.alt && (e.value.literal() || e.value.hex_bytes())) {
            s.alt = decode_attr_string(e.value);
        } else {
            s.other_attrs.push_back(e);
        }
    }
    return s;
}

} // namespace

CosDict span_attributes(const SpanNode& span) {
    CosDict d;
    if (span.mcid) d.push_back({"MCID", cos_int(*span.mcid)});
    auto encode = [](const TextString& t) -> CosValue {
        if (t.origin == StringOrigin::Hex) return cos_hex(encode_text_utf16be(t.text));
        if (is_latin1(t.text)) return cos_literal(latin1_bytes(t.text));
        return cos_hex(encode_text_utf16be(t.text));
    };
    if (span.actual_text) d.push_back({"ActualText", encode(*span.actual_text)});
    if (span.alt) d.push_back({"Alt", encode(*span.alt)});
    for (const DictEntry& e : span.other_attrs) d.push_back(e);
    return d;
}

std::vector<SpanChild> build_span_tree(const std::vector<ContentOp>& ops) {
    std::vector<SpanChild> top;
    std::vector<SpanNode> stack;
    std::size_t index = 0;
    auto sink = [&]() -> std::vector<SpanChild>& {
        return stack.empty() ? top : stack.back().children;
    };
    for (const ContentOp& op : ops) {
        if (const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&op)) {
            stack.push_back(span_from_bdc(*bm));
        } else if (std::holds_alternative<OpEndMarked>(op)) {
            if (stack.empty())
                throw Error(ErrorCode::UnbalancedMarkedContent,
                            "EMC with no open span at op " + std::to_string(index), index);
            SpanNode done = std::move(stack.back());
            stack.pop_back();
            sink().push_back(SpanChild{std::move(done)});
        } else {
            sink().push_back(SpanChild{op});
        }
        ++index;
    }
    if (!stack.empty())
        throw Error(ErrorCode::UnbalancedMarkedContent,
                    std::to_string(stack.size()) + " marked-content span(s) left open",
                    index);
    return top;
}

namespace {

void flatten_into(const std::vector<SpanChild>& tree, std::vector<ContentOp>& out) {
    for (const SpanChild& child : tree) {
        if (const SpanNode* s = child.span()) {
            OpBeginMarked bm;
            bm.tag = s->tag;
            if (s->named_resource)
                bm.resource = s->named_resource;
            else if (s->inline_dict)
                bm.attrs = span_attributes(*s);
            out.push_back(std::move(bm));
            flatten_into(s->children, out);
            out.push_back(OpEndMarked{});
        } else {
            out.push_back(*child.op());
        }
    }
}

void append_bytes(Bytes& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

void append_operand(Bytes& out, const CosValue& v) {
    Bytes b = serialize_value(v);
    out.insert(out.end(), b.begin(), b.end());
}

} // namespace

std::vector<ContentOp> flatten_span_tree(const std::vector<SpanChild>& tree) {
    std::vector<ContentOp> ops;
    flatten_into(tree, ops);
    return ops;
}

Bytes serialize_content(const std::vector<ContentOp>& ops) {
    Bytes out;
    bool in_text = false;
    for (const ContentOp& op : ops) {
        if (!out.empty()) out.push_back('\n');
        if (std::holds_alternative<OpBeginText>(op)) {
            in_text = true;
            append_bytes(out, "BT");
        } else if (std::holds_alternative<OpEndText>(op)) {
            in_text = false;
            append_bytes(out, "ET");
        } else if (const OpSetFont* f = std::get_if<OpSetFont>(&op)) {
            out.push_back('/');
            append_bytes(out, encode_name(f->font));
            out.push_back(' ');
            append_operand(out, f->size);
            append_bytes(out, " Tf");
        } else if (const OpShowText* t = std::get_if<OpShowText>(&op)) {
            if (!in_text)
                throw Error(ErrorCode::WellFormedness, "show-text outside BT/ET");
            append_operand(out, cos_array(t->items));
            append_bytes(out, "TJ");
        } else if (const OpTransform* m = std::get_if<OpTransform>(&op)) {
            for (const CosValue& v : m->matrix) {
                append_operand(out, v);
                out.push_back(' ');
            }
            append_bytes(out, "cm");
        } else if (const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&op)) {
            out.push_back('/');
            append_bytes(out, encode_name(bm->tag));
            out.push_back(' ');
            if (bm->attrs) {
                append_operand(out, cos_dict(*bm->attrs));
                append_bytes(out, " BDC");
            } else if (bm->resource) {
                out.push_back('/');
                append_bytes(out, encode_name(*bm->resource));
                append_bytes(out, " BDC");
            } else {
                append_bytes(out, "BMC");
            }
        } else if (std::holds_alternative<OpEndMarked>(op)) {
            append_bytes(out, "EMC");
        } else if (const OpOther* o = std::get_if<OpOther>(&op)) {
            for (const CosValue& v : o->operands) {
                append_operand(out, v);
                out.push_back(' ');
            }
            append_bytes(out, o->op);
        }
    }
    return out;
}

Bytes serialize_content(const std::vector<SpanChild>& tree) {
    return serialize_content(flatten_span_tree(tree));
}

namespace {

void find_mcid_walk(const std::vector<SpanChild>& tree, std::int64_t mcid,
                    const SpanNode** found) {
    for (const SpanChild& child : tree) {
        const SpanNode* s = child.span();
        if (!s) continue;
        if (s->mcid && *s->mcid == mcid) {
            if (*found)
                throw Error(ErrorCode::DuplicateMcid,
                            "MCID " + std::to_string(mcid) + " appears more than once");
            *found = s;
        }
        find_mcid_walk(s->children, mcid, found);
    }
}

} // namespace

const SpanNode* find_span_by_mcid(const std::vector<SpanChild>& tree, std::int64_t mcid) {
    const SpanNode* found = nullptr;
    find_mcid_walk(tree, mcid, &found);
    return found;
}

} // namespace mathtag
