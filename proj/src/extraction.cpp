// SPDX-License-Identifier: Apache-2.0

#include "mathtag/extraction.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "mathtag/access_tags.hpp"
#include "mathtag/content_stream.hpp"
#include "mathtag/errors.hpp"
#include "mathtag/structure_tree.hpp"

namespace mathtag {

Scope Scope::document() { return Scope{}; }

Scope Scope::page(ObjectId page) {
    Scope s;
    s.kind = Kind::Page;
    s.object = page;
    return s;
}

Scope Scope::struct_elem(ObjectId elem) {
    Scope s;
    s.kind = Kind::Struct;
    s.object = elem;
    return s;
}

namespace {

std::u32string latin1_text(const Bytes& bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    for (std::uint8_t b : bytes) out.push_back(static_cast<char32_t>(b));
    return out;
}

std::u32string show_text_glyphs(const OpShowText& op) {
    std::u32string out;
    for (const CosValue& item : op.items) {
        if (const Bytes* b = item.literal()) out += latin1_text(*b);
        else if (const Bytes* h = item.hex_bytes()) out += latin1_text(*h);
    }
    return out;
}

struct Walker {
    bool prefer_alt = false;
    const std::set<std::int64_t>* claimed = nullptr; // nullptr: everything in scope

    std::vector<ExtractedRun> runs;
    double font_size = std::numeric_limits<double>::infinity();
    bool pending_space = false;
    std::size_t page_index = 0;

    void emit(ExtractedRun run) {
        run.page_index = page_index;
        run.order = runs.size();
        if (pending_space && !runs.empty()) run.space_before = true;
        pending_space = false;
        runs.push_back(std::move(run));
    }

    void handle_op(const ContentOp& op, bool contribute) {
        if (const OpSetFont* tf = std::get_if<OpSetFont>(&op)) {
            if (auto n = tf->size.number()) font_size = *n;
        } else if (const OpTransform* cm = std::get_if<OpTransform>(&op)) {
            double tx = cm->horizontal_translation();
            if (tx > font_size) pending_space = true;
        } else if (const OpShowText* tj = std::get_if<OpShowText>(&op)) {
            if (contribute) {
                ExtractedRun run;
                run.text = show_text_glyphs(*tj);
                run.provenance = ExtractedRun::Provenance::RawGlyphs;
                if (!run.text.empty()) emit(std::move(run));
            }
        }
    }

    // suppressed: replacement text of an ancestor already covers this region.
    // in_scope: a claimed span (or the scope root) encloses it.
    void walk(const std::vector<SpanChild>& children, bool suppressed, bool in_scope) {
        for (const SpanChild& child : children) {
            if (const ContentOp* op = child.op()) {
                handle_op(*op, !suppressed && in_scope);
                continue;
            }
            const SpanNode& span = *child.span();
            bool span_in_scope =
                in_scope || (claimed && span.mcid && claimed->count(*span.mcid));
            // Copy view: /ActualText only; a span with just /Alt recurses.
            // Accessible view: /Alt outranks /ActualText.
            const TextString* replacement = nullptr;
            if (prefer_alt && span.alt) replacement = &*span.alt;
            else if (span.actual_text) replacement = &*span.actual_text;

            if (replacement && !suppressed && span_in_scope) {
                ExtractedRun run;
                run.text = replacement->text;
                run.provenance = (prefer_alt && span.alt)
                                     ? ExtractedRun::Provenance::Alt
                                     : ExtractedRun::Provenance::ActualText;
                run.tag = span.tag;
                run.mcid = span.mcid;
                emit(std::move(run));
            }
            bool child_suppressed = suppressed || replacement != nullptr;
            walk(span.children, child_suppressed, span_in_scope);
        }
    }
};

std::vector<std::pair<ObjectId, std::int64_t>> subtree_mcids(const StructTree& tree,
                                                             ObjectId elem) {
    std::vector<std::pair<ObjectId, std::int64_t>> out;
    std::vector<const StructElem*> stack;
    auto it = tree.elems.find(elem);
    if (it == tree.elems.end())
        throw Error(ErrorCode::TargetNotFound,
                    "no structure element " + std::to_string(elem.number));

    // Recursive in kid order; explicit frames keep the order depth-first.
    std::function<void(const StructElem&)> walk = [&](const StructElem& e) {
        for (const StructKid& kid : e.kids) {
            if (const std::int64_t* m = kid.mcid()) {
                if (!e.effective_page)
                    throw Error(ErrorCode::DanglingMcid,
                                "element " + std::to_string(e.id.number) +
                                    " has marked content but no page");
                out.emplace_back(*e.effective_page, *m);
            } else if (const ObjectId* child = kid.elem()) {
                walk(tree.elems.at(*child));
            }
        }
    };
    walk(it->second);
    return out;
}

std::vector<ExtractedRun> runs_for(const Document& doc, const Scope& scope, bool prefer_alt) {
    std::vector<ObjectId> pages = page_ids(doc);
    Walker walker;
    walker.prefer_alt = prefer_alt;

    if (scope.kind == Scope::Kind::Struct) {
        StructTree tree = parse_structure(doc);
        auto located = subtree_mcids(tree, scope.object);
        std::map<ObjectId, std::set<std::int64_t>> per_page;
        for (const auto& [pg, m] : located) per_page[pg].insert(m);
        for (std::size_t pi = 0; pi < pages.size(); ++pi) {
            auto it = per_page.find(pages[pi]);
            if (it == per_page.end()) continue;
            walker.page_index = pi;
            walker.font_size = std::numeric_limits<double>::infinity();
            walker.pending_space = false;
            walker.claimed = &it->second;
            auto tree_ops = build_span_tree(parse_content(page_content(doc, pages[pi])));
            walker.walk(tree_ops, false, false);
        }
        return std::move(walker.runs);
    }

    for (std::size_t pi = 0; pi < pages.size(); ++pi) {
        if (scope.kind == Scope::Kind::Page && !(pages[pi] == scope.object)) continue;
        walker.page_index = pi;
        walker.font_size = std::numeric_limits<double>::infinity();
        walker.pending_space = false;
        walker.claimed = nullptr;
        auto tree_ops = build_span_tree(parse_content(page_content(doc, pages[pi])));
        walker.walk(tree_ops, false, true);
    }
    if (scope.kind == Scope::Kind::Page) {
        bool known = std::find(pages.begin(), pages.end(), scope.object) != pages.end();
        if (!known)
            throw Error(ErrorCode::TargetNotFound,
                        "no page object " + std::to_string(scope.object.number));
    }
    return std::move(walker.runs);
}

std::u32string join_runs(const std::vector<ExtractedRun>& runs) {
    std::u32string out;
    for (const ExtractedRun& run : runs) {
        if (run.space_before && !out.empty()) out.push_back(U' ');
        out += run.text;
    }
    return out;
}

std::u32string_view trim_line(std::u32string_view line) {
    std::size_t b = 0;
    std::size_t e = line.size();
    auto blank = [](char32_t c) { return c == U' ' || c == U'\t'; };
    while (b < e && blank(line[b])) ++b;
    while (e > b && blank(line[e - 1])) --e;
    return line.substr(b, e - b);
}

std::vector<std::u32string> split_lines(const std::u32string& text) {
    std::vector<std::u32string> lines;
    std::u32string cur;
    for (char32_t c : text) {
        if (c == U'\r' || c == U'\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    lines.push_back(cur);
    return lines;
}

std::string line_to_bytes(const std::u32string& line) {
    if (is_latin1(line)) {
        Bytes b = latin1_bytes(line);
        return std::string(b.begin(), b.end());
    }
    return to_utf8(line);
}

// <latex>..</latex> blocks in extracted page text, by whole lines.
std::vector<std::string> scan_latex_blocks(const std::u32string& text, std::size_t page_index) {
    std::vector<std::string> out;
    auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size()) {
        if (trim_line(lines[i]) != U"<latex>") {
            ++i;
            continue;
        }
        std::size_t close = lines.size();
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (trim_line(lines[j]) == U"</latex>") {
                close = j;
                break;
            }
        }
        if (close == lines.size())
            throw Error(ErrorCode::UnbalancedDelimiters,
                        "page " + std::to_string(page_index) +
                            ": <latex> line without a </latex> line");
        std::string source;
        for (std::size_t j = i + 1; j < close; ++j) {
            if (j > i + 1) source.push_back('\r');
            source += line_to_bytes(lines[j]);
        }
        out.push_back(std::move(source));
        i = close + 1;
    }
    return out;
}

void collect_span_entries(const std::vector<SpanChild>& children, std::size_t page_index,
                          std::vector<HarvestEntry>& out) {
    for (const SpanChild& child : children) {
        const SpanNode* span = child.span();
        if (!span) continue;
        if (span->actual_text) {
            std::optional<AccessTagPayload> payload;
            try {
                payload = decode_payload(*span->actual_text);
            } catch (const Error& e) {
                throw Error(ErrorCode::UnbalancedDelimiters,
                            "page " + std::to_string(page_index) + ": " + e.what());
            }
            if (payload && payload->kind == AccessTagPayload::Kind::Opening) {
                HarvestEntry entry;
                entry.latex = payload->latex;
                entry.page_index = page_index;
                entry.mcid = span->mcid;
                out.push_back(std::move(entry));
            }
        }
        collect_span_entries(span->children, page_index, out);
    }
}

} // namespace

std::vector<ExtractedRun> copy_runs(const Document& doc, const Scope& scope) {
    return runs_for(doc, scope, false);
}

std::u32string copy_text(const Document& doc, const Scope& scope) {
    return join_runs(copy_runs(doc, scope));
}

std::vector<ExtractedRun> accessible_runs(const Document& doc, const Scope& scope) {
    return runs_for(doc, scope, true);
}

std::u32string accessible_text(const Document& doc, const Scope& scope) {
    return join_runs(accessible_runs(doc, scope));
}

std::vector<HarvestEntry> harvest_latex(const Document& doc) {
    std::vector<HarvestEntry> out;
    std::vector<ObjectId> pages = page_ids(doc);
    for (std::size_t pi = 0; pi < pages.size(); ++pi) {
        std::vector<HarvestEntry> page_entries;
        auto tree = build_span_tree(parse_content(page_content(doc, pages[pi])));
        collect_span_entries(tree, pi, page_entries);

        std::u32string text = copy_text(doc, Scope::page(pages[pi]));
        std::vector<std::string> scanned = scan_latex_blocks(text, pi);
        std::vector<bool> matched(page_entries.size(), false);
        for (std::string& source : scanned) {
            bool found = false;
            for (std::size_t k = 0; k < page_entries.size(); ++k) {
                if (!matched[k] && page_entries[k].latex == source) {
                    matched[k] = true;
                    found = true;
                    break;
                }
            }
            if (!found) {
                HarvestEntry entry;
                entry.latex = std::move(source);
                entry.page_index = pi;
                page_entries.push_back(std::move(entry));
            }
        }
        for (HarvestEntry& e : page_entries) out.push_back(std::move(e));
    }
    return out;
}

std::vector<FileReport> association_report(const Document& doc) {
    std::vector<FileReport> out;
    std::vector<AttachmentInfo> infos = list_attachments(doc);
    if (infos.empty()) return out;

    std::optional<StructTree> tree;
    try {
        tree = parse_structure(doc);
    } catch (const Error&) {
        // Unstructured or broken tree; structure targets are absent then.
    }
    std::vector<ObjectId> pages = page_ids(doc);

    for (AttachmentInfo& info : infos) {
        FileReport report;
        report.targets.reserve(info.targets.size());
        for (const AssociationTarget& target : info.targets) {
            TargetReport tr;
            tr.target = target;
            if (target.kind == AssociationTarget::Kind::Structure && tree) {
                for (const auto& [pg, m] : subtree_mcids(*tree, target.object))
                    tr.mcids.push_back(m);
                tr.text = copy_text(doc, Scope::struct_elem(target.object));
            } else if (target.kind == AssociationTarget::Kind::ContentSpan) {
                auto pit = std::find(pages.begin(), pages.end(), target.object);
                if (pit != pages.end()) {
                    std::size_t pi = static_cast<std::size_t>(pit - pages.begin());
                    tr.page_index = pi;
                    auto ops = parse_content(page_content(doc, target.object));
                    for (std::size_t i = 0; i < ops.size(); ++i) {
                        const OpBeginMarked* bm = std::get_if<OpBeginMarked>(&ops[i]);
                        if (!bm || bm->tag != "AF" || !bm->resource ||
                            *bm->resource != target.resource)
                            continue;
                        int depth = 0;
                        for (std::size_t j = i; j < ops.size(); ++j) {
                            if (std::holds_alternative<OpBeginMarked>(ops[j])) ++depth;
                            else if (std::holds_alternative<OpEndMarked>(ops[j])) {
                                --depth;
                                if (depth == 0) {
                                    tr.span_ops = j - i - 1;
                                    break;
                                }
                            }
                        }
                        break;
                    }
                }
            }
            report.targets.push_back(std::move(tr));
        }
        report.info = std::move(info);
        out.push_back(std::move(report));
    }
    return out;
}

} // namespace mathtag
