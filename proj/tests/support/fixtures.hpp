// SPDX-License-Identifier: Apache-2.0

// Hand-assembled PDF fixtures. Offsets and xref tables are computed by the
// local builder, independent of the library writer, so parser tests do not
// lean on the code under test.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mathtag/text_codec.hpp"

namespace fixtures {

using mathtag::Bytes;

Bytes minimal_pdf();          // catalog, pages, page, content: 4 objects
Bytes untagged_pdf();         // plain text page, no marked content
Bytes wrapped_untagged_pdf(); // /AF wrapper + attachment, no structure tree
Bytes fig_pre_pdf();          // tagged formula, wrapper, attachments; no fake spaces
Bytes fig_full_pdf();         // fake-space spans and accesstag elements present
Bytes two_pages_pdf();        // structure element with kids on two pages
Bytes strings_pdf();          // string/name/number escape torture
Bytes deep_name_tree_pdf();   // two-level /Kids name tree
Bytes xobject_af_pdf();       // association hung off a form XObject
Bytes freelist_pdf();         // xref with a free-entry chain

std::vector<std::pair<std::string, Bytes>> corpus();

Bytes inline_tex_payload(); // 16 bytes
Bytes inline_xml_payload(); // 164 bytes

// MD5 digests computed with independent tools (python hashlib and GNU
// md5sum agree), frozen here as oracles.
inline constexpr char kMd5InlineTex[] = "E5263647976A4F5937236A24BFC90AAA";
inline constexpr char kMd5InlineXml[] = "4F6F1F6895A017250C4F61C0247CFE67";
inline constexpr char kMd5Empty[] = "D41D8CD98F00B204E9800998ECF8427E";
inline constexpr char kMd5Soln[] = "DA08E45204DFD39F91F8AC1B4CB7BE85";
inline constexpr char kMd5Savedefs[] = "4F273DB4E6934C42F6D8073415BFDA61";
inline constexpr char kMd5Snippet[] = "9217D865DF233D5C0E554888F0B67820";
inline constexpr char kMd5Graph[] = "4BC83648582B9E7F9E34D435B19A7900";
inline constexpr char kMd5Alpha[] = "9F9F90DBE3E5EE1218C86B8839DB1995";

} // namespace fixtures
