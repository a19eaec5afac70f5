// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathtag/attachments.hpp"
#include "mathtag/cos.hpp"

namespace mathtag {

struct Scope {
    enum class Kind { Document, Page, Struct };
    Kind kind = Kind::Document;
    ObjectId object; // page or structure element

    static Scope document();
    static Scope page(ObjectId page);
    static Scope struct_elem(ObjectId elem);
};

struct ExtractedRun {
    enum class Provenance { RawGlyphs, ActualText, Alt };
    std::u32string text;
    Provenance provenance = Provenance::RawGlyphs;
    std::string tag; // span tag for ActualText/Alt runs
    std::optional<std::int64_t> mcid;
    std::size_t page_index = 0;
    std::size_t order = 0;
    bool space_before = false; // word gap inferred from a positioning op
};

// Clipboard view: a span's /ActualText replaces everything inside it,
// outermost span wins. Untagged glyphs fall back to Latin-1 string bytes.
std::vector<ExtractedRun> copy_runs(const Document& doc, const Scope& scope);
std::u32string copy_text(const Document& doc, const Scope& scope);

// Accessible view: /Alt outranks /ActualText, then the same fallbacks.
std::vector<ExtractedRun> accessible_runs(const Document& doc, const Scope& scope);
std::u32string accessible_text(const Document& doc, const Scope& scope);

struct HarvestEntry {
    std::string latex;
    std::size_t page_index = 0;
    std::optional<std::int64_t> mcid; // opening span, when recovered from one
};

// LaTeX sources from access-tag spans, plus <latex> blocks found in the
// copy_text line scan that no span accounts for. Page order.
std::vector<HarvestEntry> harvest_latex(const Document& doc);

struct TargetReport {
    AssociationTarget target;
    std::vector<std::int64_t> mcids;       // structure targets
    std::u32string text;                   // structure targets, ActualText view
    std::optional<std::size_t> page_index; // content-span targets
    std::size_t span_ops = 0;              // ops inside the named wrapper
};

struct FileReport {
    AttachmentInfo info;
    std::vector<TargetReport> targets;
};

std::vector<FileReport> association_report(const Document& doc);

} // namespace mathtag
