// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>

namespace fixtures {
namespace {

class PdfBuilder {
public:
    PdfBuilder() { out_ = "%PDF-1.7\n%\xE2\xE3\xCF\xD3\n"; }

    void obj(std::int64_t num, const std::string& body) {
        offsets_.emplace_back(num, out_.size());
        out_ += std::to_string(num) + " 0 obj\n" + body + "\nendobj\n";
    }

    // dict_entries: the text between << and >>, without /Length.
    void stream_obj(std::int64_t num, const std::string& dict_entries, const std::string& data) {
        offsets_.emplace_back(num, out_.size());
        out_ += std::to_string(num) + " 0 obj\n<<" + dict_entries + "/Length " +
                std::to_string(data.size()) + ">>\nstream\n" + data + "\nendstream\nendobj\n";
    }

    void free_obj(std::int64_t num) { frees_.push_back(num); }

    Bytes finish(std::int64_t root) {
        struct Entry {
            std::int64_t num;
            std::size_t offset;
            bool in_use;
        };
        std::vector<Entry> entries;
        entries.push_back({0, 0, false});
        for (const auto& [num, off] : offsets_) entries.push_back({num, off, true});
        for (std::int64_t num : frees_) entries.push_back({num, 0, false});
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.num < b.num; });

        // Free entries chain to the next free number, last one to 0.
        std::vector<std::size_t> free_idx;
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (!entries[i].in_use) free_idx.push_back(i);
        for (std::size_t i = 0; i + 1 < free_idx.size(); ++i)
            entries[free_idx[i]].offset =
                static_cast<std::size_t>(entries[free_idx[i + 1]].num);

        std::size_t xref_at = out_.size();
        out_ += "xref\n";
        std::int64_t max_num = 0;
        for (std::size_t i = 0; i < entries.size();) {
            std::size_t j = i;
            while (j + 1 < entries.size() && entries[j + 1].num == entries[j].num + 1) ++j;
            out_ += std::to_string(entries[i].num) + " " + std::to_string(j - i + 1) + "\n";
            for (std::size_t k = i; k <= j; ++k) {
                char line[24];
                std::snprintf(line, sizeof line, "%010zu %05d %c \n", entries[k].offset,
                              entries[k].in_use ? 0 : (entries[k].num == 0 ? 65535 : 1),
                              entries[k].in_use ? 'n' : 'f');
                out_ += line;
                max_num = std::max(max_num, entries[k].num);
            }
            i = j + 1;
        }
        out_ += "trailer\n<</Size " + std::to_string(max_num + 1) + "/Root " +
                std::to_string(root) + " 0 R>>\nstartxref\n" + std::to_string(xref_at) +
                "\n%%EOF\n";
        return Bytes(out_.begin(), out_.end());
    }

private:
    std::string out_;
    std::vector<std::pair<std::int64_t, std::size_t>> offsets_;
    std::vector<std::int64_t> frees_;
};

const char* kFigSpans =
    R"(/mi <</MCID 9
 /ActualText<FEFFD835DC58>/Alt(  k  )
>>BDC
BT
/F30 10.9091 Tf
 [(k)]TJ
ET
EMC
1 0 0 1 6.023 0 cm
/mo <</MCID 10
 /ActualText<FEFF2208>/Alt(  as element of  )
>>BDC
1 0 0 1 3.03 0 cm
BT
/F33 10.9091 Tf
 [(2)]TJ
ET
EMC
1 0 0 1 10.303 0 cm
/mi <</MCID 11
 /ActualText<FEFF211D>/Alt(  real numbers  )
>>BDC
BT
/F42 10.9091 Tf
 [(R)]TJ
ET
EMC)";

std::string fig_content(bool full) {
    std::string s = "/AF /inline-1 BDC\n1 0 0 1 51.508 0 cm\n";
    if (full) {
        s += "/AccessTag <</MCID 8 /ActualText\n"
             " (\\015<latex>\\015k \\134in \\134RR\\015</latex>\\015<content>\\015)\n"
             ">>BDC\nBT\n/F79 1 Tf\n [( )]TJ\nET\nEMC\n";
    }
    s += kFigSpans;
    s += "\n1 0 0 1 7.879 0 cm\n";
    if (full) {
        s += "/AccessTag <</MCID 12\n  /ActualText (\\015</content>\\015)\n"
             ">>BDC\nBT\n/F79 1 Tf\n [( )]TJ\nET\nEMC\n";
    }
    s += "EMC";
    return s;
}

std::string soln_payload() {
    return "\\documentclass{article}\n\\input{2013-Assign2-soln-savedefs}\n"
           "\\begin{document}\n\\( k \\in \\RR \\)\n\\end{document}\n";
}

std::string savedefs_payload() { return "\\newcommand{\\RR}{\\mathbb{R}}\n"; }

Bytes fig_pdf(bool full) {
    PdfBuilder b;
    b.obj(5, R"(<<
/Type /Page
/Contents 91 0 R
/Resources 90 0 R
/MediaBox [0 0 595.276 841.89]
/Tabs/S
/Parent 773 0 R
/StructParents 0
>>)");
    b.obj(20, "<< /inline-1 [27 0 R 29 0 R] >>");
    b.stream_obj(21,
                 "\n/Type/EmbeddedFile \n/Subtype/application#2Fx-tex\n/Params <<\n"
                 "/ModDate (D:20140131090000+11'00') \n/Size 107 /CheckSum\n  (" +
                     std::string(kMd5Soln) + ")>> \n",
                 soln_payload());
    b.obj(22, R"(<</Type/Filespec
/F (2013-Assign2-soln.tex)/UF (2013-Assign2-soln.tex)
/Desc (Complete LaTeX source of the document)
/AFRelationship /Source
/EF<</F 21 0 R>> >>)");
    b.stream_obj(23,
                 "\n/Type/EmbeddedFile \n/Subtype/application#2Fx-tex\n/Params <<\n"
                 "/ModDate (D:20140131090500+11'00') \n/Size 29 /CheckSum\n  (" +
                     std::string(kMd5Savedefs) + ")>> \n",
                 savedefs_payload());
    b.obj(24, R"(<</Type/Filespec
/F (2013-Assign2-soln-savedefs.tex)/UF (2013-Assign2-soln-savedefs.tex)
/Desc (Preamble macro definitions)
/AFRelationship /Data
/EF<</F 23 0 R>> >>)");
    b.stream_obj(25,
                 "/Type/XObject /Subtype/Image /Width 1 /Height 1 "
                 "/ColorSpace/DeviceGray /BitsPerComponent 8 ",
                 std::string(1, '\x80'));
    {
        Bytes tex = inline_tex_payload();
        b.stream_obj(26,
                     "\n/Type/EmbeddedFile \n/Subtype/application#2Fx-tex\n/Params <<\n"
                     "/ModDate (D:20140201111224+11'00') \n/Size (16) /CheckSum\n  (" +
                         std::string(kMd5InlineTex) + ")>> \n",
                     std::string(tex.begin(), tex.end()));
    }
    b.obj(27, R"(<</Type/Filespec
/F (inline-1.tex)/UF (inline-1.tex)
/Desc (TeX source for inline math)
/AFRelationship /Source
/EF<</F 26 0 R>> >>)");
    {
        Bytes xml = inline_xml_payload();
        b.stream_obj(28,
                     "\n/Type/EmbeddedFile \n/Subtype/application#2Fmathml+xml\n/Params <<\n"
                     "/ModDate (D:20140131152820+11'00') \n/Size (164) /CheckSum\n  (" +
                         std::string(kMd5InlineXml) + ")>> \n",
                     std::string(xml.begin(), xml.end()));
    }
    b.obj(29, R"(<</Type/Filespec
/F (inline-1.xml)/UF (inline-1.xml)
/Desc (MathML version of inline math)
/AFRelationship /Supplement
/EF<</F 28 0 R>> >>)");
    b.obj(90, R"(<<
 /Properties 20 0 R
 /Font << /F30 97 0 R /F33 102 0 R
   /F42 105 0 R /F79 100 0 R >>
/XObject << /Im1 25 0 R >>
/ProcSet [ /PDF /Text ]
>>)");
    b.stream_obj(91, "", fig_content(full));
    b.obj(93, full ? "[null null null null null null null null 113 0 R 114 0 R 116 0 R "
                     "118 0 R 122 0 R]"
                   : "[null null null null null null null null null 114 0 R 116 0 R 118 0 R]");
    b.obj(94, "<</Nums [0 93 0 R]>>");
    b.obj(95, full ? R"(<<
/Type /StructTreeRoot
/K [109 0 R]
/ParentTree 94 0 R
/ParentTreeNextKey 1
/RoleMap <</accesstag /Custom>>
>>)"
                   : R"(<<
/Type /StructTreeRoot
/K [109 0 R]
/ParentTree 94 0 R
/ParentTreeNextKey 1
>>)");
    b.obj(97, "<</Type/Font /Subtype/Type1 /BaseFont/CMMI11>>");
    b.obj(100, "<</Type/Font /Subtype/Type1 /BaseFont/CMR10>>");
    b.obj(102, "<</Type/Font /Subtype/Type1 /BaseFont/CMSY11>>");
    b.obj(105, "<</Type/Font /Subtype/Type1 /BaseFont/MSBM10>>");
    b.obj(109, R"(<<
/Type/StructElem/S/P
/P 95 0 R
/K [112 0 R]
/Pg 5 0 R
>>)");
    b.obj(112, full ? R"(<<
/K [
113 0 R
120 0 R
122 0 R
]
/P 109 0 R
/Type/StructElem/S/Formula
/ID(Math0.1)/T(InlineMath 0.1)
/AF [27 0 R 29 0 R] /A <</O/XML-1.01 >>
>>)"
                    : R"(<<
/K [
120 0 R
]
/P 109 0 R
/Type/StructElem/S/Formula
/ID(Math0.1)/T(InlineMath 0.1)
/AF [27 0 R 29 0 R] /A <</O/XML-1.01 >>
>>)");
    if (full)
        b.obj(113, R"(<<
/K [ 8 ]
/Pg 5 0 R
/P 112 0 R
/Type/StructElem/S/accesstag
>>)");
    b.obj(114, R"(<<
/K [ 9 ]
/Pg 5 0 R
/P 121 0 R
/Type/StructElem/S/mi
>>)");
    b.obj(116, R"(<<
/K [ 10 ]
/Pg 5 0 R
/P 121 0 R
/Type/StructElem/S/mo
/A<</O/XML-1.00/class(MathClass-rel)>>
>>)");
    b.obj(118, R"(<<
/K [ 11 ]
/Pg 5 0 R
/P 121 0 R
/Type/StructElem/S/mi
>>)");
    b.obj(120, R"(<<
/K [ 121 0 R ]
/P 112 0 R
/Type/StructElem/S/math
/A<</O/XML-1.00
/xmlns(http://www.w3.org/1998/Math/MathML)
/display(inline)>>
>>)");
    b.obj(121, R"(<<
/K [
114 0 R
116 0 R
118 0 R
]
/P 120 0 R
/Type/StructElem/S/mrow
>>)");
    if (full)
        b.obj(122, R"(<<
/K [ 12 ]
/Pg 5 0 R
/P 112 0 R
/Type/StructElem/S/accesstag
>>)");
    b.obj(773, "<</Type /Pages /Kids [5 0 R] /Count 1>>");
    b.obj(1859, "[ 22 0 R 24 0 R 27 0 R 29 0 R ]");
    b.obj(1860,
          "<</Names [ (2013-Assign2-soln-savedefs.tex) 24 0 R (2013-Assign2-soln.tex) 22 0 R\n"
          " (inline-1.tex) 27 0 R (inline-1.xml) 29 0 R ]>>");
    b.obj(2080, R"(<<
/EmbeddedFiles 1860 0 R
>>)");
    b.obj(2081, R"(<<
/Type /Catalog
/Pages 773 0 R
/Names 2080 0 R
/ViewerPreferences <</DisplayDocTitle true >>
/Lang (en-US)
/MarkInfo <</Marked true /AF 1859 0 R>>
/AF [ 22 0 R 24 0 R]
/StructTreeRoot 95 0 R
>>)");
    return b.finish(2081);
}

} // namespace

Bytes inline_tex_payload() {
    static const char kText[] = "\\( k \\in \\RR \\)\n";
    return Bytes(kText, kText + sizeof kText - 1);
}

Bytes inline_xml_payload() {
    static const char kText[] =
        "<math \n"
        " xmlns=\"http://www.w3.org/1998/Math/MathML\" \n"
        " display=\"inline\" ><mrow\n"
        "><mi\n"
        ">k</mi> <mo\n"
        "class=\"MathClass-rel\">&#x2208;</mo> <mi \n"
        ">&#x211D;</mi></mrow></math>\n";
    return Bytes(kText, kText + sizeof kText - 1);
}

Bytes minimal_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R] /Count 1>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 4 0 R /MediaBox [0 0 612 792] "
             "/Resources <<>>>>");
    b.stream_obj(4, "", "BT\nET");
    return b.finish(1);
}

Bytes untagged_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R] /Count 1>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 4 0 R /MediaBox [0 0 612 792] "
             "/Resources <</Font <</F1 5 0 R>>>>>>");
    b.stream_obj(4, "", "1 0 0 1 72 720 cm\nBT\n/F1 24 Tf\n [(Hello, world!)]TJ\nET");
    b.obj(5, "<</Type/Font /Subtype/Type1 /BaseFont/Helvetica>>");
    return b.finish(1);
}

Bytes wrapped_untagged_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R\n"
             "/Names <</EmbeddedFiles <</Names [(snippet.tex) 7 0 R]>>>>\n"
             "/MarkInfo <</Marked true /AF 9 0 R>>>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R] /Count 1>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 4 0 R /MediaBox [0 0 612 792] "
             "/Resources 5 0 R>>");
    b.stream_obj(4, "", "q\n/AF /snippet BDC\nBT\n/F1 10 Tf\n [(E = mc2)]TJ\nET\nEMC\nQ");
    b.obj(5, "<</Properties <</snippet [7 0 R]>> /Font <</F1 10 0 R>>>>");
    b.stream_obj(6,
                 "/Type/EmbeddedFile /Subtype/application#2Fx-tex\n"
                 "/Params <</ModDate (D:20140201090000+11'00') /Size 9 /CheckSum (" +
                     std::string(kMd5Snippet) + ")>>\n",
                 "E = mc^2\n");
    b.obj(7, "<</Type/Filespec /F (snippet.tex)/UF (snippet.tex)\n"
             "/Desc (TeX source of the relation)\n"
             "/AFRelationship /Source /EF<</F 6 0 R>>>>");
    b.obj(9, "[7 0 R]");
    b.obj(10, "<</Type/Font /Subtype/Type1 /BaseFont/Helvetica>>");
    return b.finish(1);
}

Bytes fig_pre_pdf() { return fig_pdf(false); }

Bytes fig_full_pdf() { return fig_pdf(true); }

Bytes two_pages_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R /StructTreeRoot 9 0 R "
             "/MarkInfo <</Marked true>>>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R 4 0 R] /Count 2>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 5 0 R /MediaBox [0 0 612 792] "
             "/Resources 7 0 R /StructParents 0>>");
    b.obj(4, "<</Type /Page /Parent 2 0 R /Contents 6 0 R /MediaBox [0 0 612 792] "
             "/Resources 7 0 R /StructParents 1>>");
    b.stream_obj(5, "", "/P <</MCID 0>>BDC\nBT\n/F1 10 Tf\n [(page one)]TJ\nET\nEMC");
    b.stream_obj(6, "", "/P <</MCID 0>>BDC\nBT\n/F1 10 Tf\n [(page two)]TJ\nET\nEMC");
    b.obj(7, "<</Font <</F1 8 0 R>>>>");
    b.obj(8, "<</Type/Font /Subtype/Type1 /BaseFont/Helvetica>>");
    b.obj(9, "<</Type /StructTreeRoot /K [10 0 R] /ParentTree 12 0 R "
             "/ParentTreeNextKey 2>>");
    b.obj(10, "<</Type/StructElem/S/Sect /P 9 0 R /ID(Sect1) /K [11 0 R 13 0 R]>>");
    b.obj(11, "<</Type/StructElem/S/P /P 10 0 R /Pg 3 0 R /K [0]>>");
    b.obj(12, "<</Nums [0 [11 0 R] 1 [13 0 R]]>>");
    b.obj(13, "<</Type/StructElem/S/P /P 10 0 R /Pg 4 0 R /K [0]>>");
    return b.finish(1);
}

Bytes strings_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R /Probe 5 0 R>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R] /Count 1>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 4 0 R /MediaBox [0 0 612 792] "
             "/Resources <</Font <</F1 6 0 R>>>>>>");
    b.stream_obj(4, "",
                 "q\n0.25 0 0 0.25 101.6 628.399 cm\nBT\n/F1 8 Tf\n"
                 " [(A) -120 <42> 3.5 (C)]TJ\nET\nQ\nBT /F1 8 Tf (plain) Tj ET");
    b.obj(5, R"(<<
/L1 (a\(b\)c\\d)
/L2 (tab\there\nnl\rcr)
/L3 (\101\102\103)
/L4 (\0127)
/L5 (balanced (inner (deep)) text)
/H1 <FEFFD835DC58>
/H2 <FEFF2208>
/H3 <48656C6C6F>
/H4 <4A6>
/N1 /application#2Fx-tex
/N2 /Has#20Space
/R [0.5 -3.14 +17 .5 -.002 42. 0 123456789]
/Nested [[1 2] [3 [4 [5]]] <</X [true false null]>>]
/Ref 4 0 R
>>)");
    b.obj(6, "<</Type/Font /Subtype/Type1 /BaseFont/Courier>>");
    return b.finish(1);
}

Bytes deep_name_tree_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R /Names <</EmbeddedFiles 3 0 R>>>>");
    b.obj(2, "<</Type /Pages /Kids [7 0 R] /Count 1>>");
    b.obj(3, "<</Kids [4 0 R 5 0 R]>>");
    b.obj(4, "<</Limits [(a.txt) (b.txt)] /Names [(a.txt) 8 0 R (b.txt) 9 0 R]>>");
    b.obj(5, "<</Limits [(c.txt) (c.txt)] /Names [(c.txt) 10 0 R]>>");
    b.obj(7, "<</Type /Page /Parent 2 0 R /Contents 14 0 R /MediaBox [0 0 100 100]>>");
    b.obj(8, "<</Type/Filespec /F (a.txt)/UF (a.txt) /Desc (first) "
             "/AFRelationship /Data /EF<</F 11 0 R>>>>");
    b.obj(9, "<</Type/Filespec /F (b.txt)/UF (b.txt) /Desc (second) "
             "/AFRelationship /Data /EF<</F 12 0 R>>>>");
    b.obj(10, "<</Type/Filespec /F (c.txt)/UF (c.txt) /Desc (third) "
              "/AFRelationship /Data /EF<</F 13 0 R>>>>");
    b.stream_obj(11,
                 "/Type/EmbeddedFile /Params <</Size 6 /CheckSum (" +
                     std::string(kMd5Alpha) + ")>>",
                 "alpha\n");
    b.stream_obj(12, "/Type/EmbeddedFile ", "bravo\n");
    b.stream_obj(13, "/Type/EmbeddedFile /Params <</Size 8>>", "charlie\n");
    b.stream_obj(14, "", "BT\nET");
    return b.finish(1);
}

Bytes xobject_af_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R\n"
             "/Names <</EmbeddedFiles <</Names [(graph.dat) 5 0 R]>>>>\n"
             "/MarkInfo <</Marked true /AF [5 0 R]>>>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R] /Count 1>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 8 0 R /MediaBox [0 0 612 792] "
             "/Resources <</XObject <</Im1 4 0 R>>>>>>");
    b.stream_obj(4, "/Type/XObject /Subtype/Form /BBox [0 0 10 10] /AF [5 0 R] ",
                 "0 0 10 10 re f");
    b.obj(5, "<</Type/Filespec /F (graph.dat)/UF (graph.dat) /Desc (plotted data) "
             "/AFRelationship /Data /EF<</F 6 0 R>>>>");
    b.stream_obj(6,
                 "/Type/EmbeddedFile /Params <</ModDate (D:20140202000000+11'00') "
                 "/Size 21 /CheckSum (" +
                     std::string(kMd5Graph) + ")>>",
                 "% graph data\n0 0\n1 1\n");
    b.stream_obj(8, "", "q /Im1 Do Q");
    return b.finish(1);
}

Bytes freelist_pdf() {
    PdfBuilder b;
    b.obj(1, "<</Type /Catalog /Pages 2 0 R>>");
    b.obj(2, "<</Type /Pages /Kids [3 0 R] /Count 1>>");
    b.obj(3, "<</Type /Page /Parent 2 0 R /Contents 5 0 R /MediaBox [0 0 200 200] "
             "/Resources <</Font <</F1 6 0 R>>>>>>");
    b.free_obj(4);
    b.stream_obj(5, "", "BT /F1 12 Tf [(free list survivor)]TJ ET");
    b.obj(6, "<</Type/Font /Subtype/Type1 /BaseFont/Times-Roman>>");
    return b.finish(1);
}

std::vector<std::pair<std::string, Bytes>> corpus() {
    return {
        {"minimal", minimal_pdf()},
        {"untagged", untagged_pdf()},
        {"wrapped-untagged", wrapped_untagged_pdf()},
        {"fig-pre", fig_pre_pdf()},
        {"fig-full", fig_full_pdf()},
        {"two-pages", two_pages_pdf()},
        {"strings", strings_pdf()},
        {"deep-name-tree", deep_name_tree_pdf()},
        {"xobject-af", xobject_af_pdf()},
        {"freelist", freelist_pdf()},
    };
}

} // namespace fixtures
