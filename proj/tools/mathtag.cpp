// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mathtag/access_tags.hpp"
#include "mathtag/attachments.hpp"
#include "mathtag/content_stream.hpp"
#include "mathtag/cos.hpp"
#include "mathtag/errors.hpp"
#include "mathtag/extraction.hpp"
#include "mathtag/io.hpp"
#include "mathtag/structure_tree.hpp"
#include "mathtag/text_codec.hpp"
#include "mathtag/validate.hpp"

namespace {

using mathtag::Bytes;
using mathtag::Document;
using mathtag::Error;
using mathtag::ErrorCode;
using mathtag::ObjectId;
using Json = nlohmann::ordered_json;

constexpr const char* kDefaultModDate = "D:20140101000000+00'00'";

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::UsageError:
    case ErrorCode::UnknownTarget:
    case ErrorCode::NotAFilespec:
        return 3;
    case ErrorCode::NameNotFound:
    case ErrorCode::TargetNotFound:
        return 4;
    case ErrorCode::UnsupportedFeature:
    case ErrorCode::UnsupportedMethod:
    case ErrorCode::CrossesPageBoundary:
    case ErrorCode::AlreadyTagged:
    case ErrorCode::DuplicateName:
        return 5;
    case ErrorCode::IntegrityMismatch:
        return 1;
    default:
        return 2;
    }
}

Document load(const std::string& path) {
    Bytes bytes = mathtag::read_file(path);
    return mathtag::parse_document(bytes);
}

void guard_output(const std::string& input, const std::string& output) {
    if (output.empty()) throw Error(ErrorCode::UsageError, "an output path is required");
    std::error_code ec;
    auto in = std::filesystem::weakly_canonical(input, ec);
    auto out = std::filesystem::weakly_canonical(output, ec);
    if (in == out) throw Error(ErrorCode::UsageError, "refusing to overwrite the input file");
}

struct Selector {
    enum class Kind { Doc, Page, Struct, Res };
    Kind kind = Kind::Doc;
    std::int64_t page = 0;
    std::string text; // struct /ID or resource name
};

Selector parse_selector(const std::string& s) {
    Selector sel;
    if (s == "doc") return sel;
    if (s.rfind("page:", 0) == 0) {
        sel.kind = Selector::Kind::Page;
        try {
            sel.page = std::stoll(s.substr(5));
        } catch (const std::exception&) {
            throw Error(ErrorCode::UsageError, "bad page number in selector: " + s);
        }
        return sel;
    }
    if (s.rfind("struct:", 0) == 0) {
        sel.kind = Selector::Kind::Struct;
        sel.text = s.substr(7);
        return sel;
    }
    if (s.rfind("res:", 0) == 0) {
        sel.kind = Selector::Kind::Res;
        sel.text = s.substr(4);
        return sel;
    }
    throw Error(ErrorCode::UsageError,
                "bad target selector (doc | page:<n> | struct:<ID> | res:<name>): " + s);
}

ObjectId page_at(const Document& doc, std::int64_t index) {
    std::vector<ObjectId> pages = mathtag::page_ids(doc);
    if (index < 0 || static_cast<std::size_t>(index) >= pages.size())
        throw Error(ErrorCode::TargetNotFound, "no page " + std::to_string(index));
    return pages[static_cast<std::size_t>(index)];
}

ObjectId elem_by_id(const Document& doc, const std::string& id) {
    mathtag::StructTree tree = mathtag::parse_structure(doc);
    auto found = mathtag::find_elem_by_id(tree, id);
    if (!found) throw Error(ErrorCode::TargetNotFound, "no structure element /ID " + id);
    return *found;
}

std::string utf8_normalized(const std::u32string& text) {
    std::string out = mathtag::to_utf8(text);
    std::string normalized;
    normalized.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '\r') {
            normalized.push_back('\n');
            if (i + 1 < out.size() && out[i + 1] == '\n') ++i;
        } else {
            normalized.push_back(out[i]);
        }
    }
    return normalized;
}

const char* target_kind_name(mathtag::AssociationTarget::Kind kind) {
    using Kind = mathtag::AssociationTarget::Kind;
    switch (kind) {
    case Kind::Document: return "document";
    case Kind::Page: return "page";
    case Kind::ContentSpan: return "content-span";
    case Kind::Structure: return "structure";
    case Kind::XObject: return "xobject";
    case Kind::Annotation: return "annotation";
    }
    return "unknown";
}

Json target_json(const mathtag::AssociationTarget& t) {
    Json j;
    j["kind"] = target_kind_name(t.kind);
    if (t.kind != mathtag::AssociationTarget::Kind::Document) j["object"] = t.object.number;
    if (!t.resource.empty()) j["resource"] = t.resource;
    return j;
}

Json attachment_json(const mathtag::AttachmentInfo& info) {
    Json j;
    j["name"] = info.name;
    j["filespec"] = info.filespec.number;
    j["desc"] = info.desc;
    j["relationship"] =
        info.relationship ? mathtag::af_relationship_name(*info.relationship) : "";
    j["subtype"] = info.subtype;
    j["size"] = info.declared_size;
    j["payload_size"] = info.payload_size;
    j["size_ok"] = info.size_ok;
    j["checksum_ok"] = info.checksum_ok;
    j["registered"] = info.registered;
    Json targets = Json::array();
    for (const auto& t : info.targets) targets.push_back(target_json(t));
    j["targets"] = std::move(targets);
    return j;
}

void print_structure(const Document& doc) {
    mathtag::StructTree tree = mathtag::parse_structure(doc);
    std::function<void(ObjectId, int)> dump = [&](ObjectId id, int depth) {
        const mathtag::StructElem& elem = tree.elems.at(id);
        std::string line(static_cast<std::size_t>(depth) * 2, ' ');
        line += "/" + elem.s + " " + std::to_string(id.number);
        if (elem.elem_id) line += " ID=" + *elem.elem_id;
        if (elem.title) line += " T=\"" + mathtag::to_utf8(elem.title->text) + "\"";
        if (!elem.associated_files.empty()) {
            line += " AF=[";
            for (std::size_t i = 0; i < elem.associated_files.size(); ++i) {
                if (i) line += ",";
                line += std::to_string(elem.associated_files[i].number);
            }
            line += "]";
        }
        std::string mcids;
        for (const mathtag::StructKid& kid : elem.kids) {
            if (const std::int64_t* m = kid.mcid()) {
                if (!mcids.empty()) mcids += ",";
                mcids += std::to_string(*m);
            }
        }
        if (!mcids.empty()) line += " MCIDs[" + mcids + "]";
        std::cout << line << "\n";
        for (const mathtag::StructKid& kid : elem.kids)
            if (const ObjectId* child = kid.elem()) dump(*child, depth + 1);
    };
    std::cout << "StructTreeRoot " << tree.root_id.number << "\n";
    for (ObjectId kid : tree.root_kids) dump(kid, 1);
}

void print_objects(const Document& doc) {
    for (const auto& [id, value] : doc.objects) {
        std::string kind;
        const mathtag::CosDict* d = value.dict();
        if (value.stream()) {
            kind = "stream";
            d = &value.stream()->dict;
        } else if (d) {
            kind = "dict";
        } else if (value.array()) {
            kind = "array";
        } else {
            kind = "value";
        }
        std::string line = std::to_string(id.number) + " " + std::to_string(id.generation) +
                           ": " + kind;
        if (d) {
            if (const std::string* type = mathtag::get_name(doc, *d, "Type"))
                line += " /Type /" + *type;
        }
        if (const mathtag::CosStream* s = value.stream())
            line += " (" + std::to_string(s->data.size()) + " bytes)";
        std::cout << line << "\n";
    }
}

int cmd_inspect(const std::string& input, bool structure, bool objects,
                std::optional<std::int64_t> content_page, bool json) {
    Document doc = load(input);
    if (structure) {
        print_structure(doc);
        return 0;
    }
    if (objects) {
        print_objects(doc);
        return 0;
    }
    if (content_page) {
        Bytes content = mathtag::page_content(doc, page_at(doc, *content_page));
        Bytes text = mathtag::serialize_content(mathtag::parse_content(content));
        std::cout.write(reinterpret_cast<const char*>(text.data()),
                        static_cast<std::streamsize>(text.size()));
        std::cout << "\n";
        return 0;
    }
    std::size_t pages = mathtag::page_ids(doc).size();
    std::size_t attachments = mathtag::embedded_file_entries(doc).size();
    bool tagged = false;
    if (const mathtag::CosDict* cat = mathtag::catalog(doc))
        tagged = mathtag::dict_get(*cat, "StructTreeRoot") != nullptr;
    if (json) {
        Json j;
        j["schema"] = "mathtag.inspect/1";
        j["version"] = doc.version;
        j["objects"] = doc.objects.size();
        j["pages"] = pages;
        j["attachments"] = attachments;
        j["tagged"] = tagged;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "PDF " << doc.version << ", " << doc.objects.size() << " objects, "
                  << pages << " page" << (pages == 1 ? "" : "s") << ", " << attachments
                  << " attachment" << (attachments == 1 ? "" : "s") << ", "
                  << (tagged ? "tagged" : "untagged") << "\n";
    }
    return 0;
}

int cmd_attach(const std::string& input, const std::string& output, const std::string& file,
               std::string name, const std::string& desc, const std::string& relationship,
               std::string mime, const std::string& target, const std::string& mod_date) {
    guard_output(input, output);
    Document doc = load(input);
    Bytes payload = mathtag::read_file(file);

    if (name.empty()) name = std::filesystem::path(file).filename().string();
    auto rel = mathtag::af_relationship_from(relationship);
    if (!rel)
        throw Error(ErrorCode::UsageError,
                    "bad relationship (Source | Supplement | Data | Alternative | "
                    "Unspecified): " +
                        relationship);
    if (mime.empty()) {
        std::string ext = std::filesystem::path(name).extension().string();
        if (ext == ".tex") mime = "application/x-tex";
        else if (ext == ".xml") mime = "application/mathml+xml";
        else mime = "application/octet-stream";
    }

    mathtag::EmbedOptions options;
    options.name = name;
    options.desc = desc;
    options.relationship = *rel;
    options.mime = mime;
    options.mod_date = mod_date;
    ObjectId filespec = mathtag::embed_file(doc, payload, options);

    Selector sel = parse_selector(target);
    mathtag::AssociationTarget at;
    switch (sel.kind) {
    case Selector::Kind::Doc:
        at.kind = mathtag::AssociationTarget::Kind::Document;
        break;
    case Selector::Kind::Page:
        at.kind = mathtag::AssociationTarget::Kind::Page;
        at.object = page_at(doc, sel.page);
        break;
    case Selector::Kind::Struct:
        at.kind = mathtag::AssociationTarget::Kind::Structure;
        at.object = elem_by_id(doc, sel.text);
        break;
    case Selector::Kind::Res: {
        at.kind = mathtag::AssociationTarget::Kind::ContentSpan;
        at.resource = sel.text;
        std::vector<ObjectId> pages = mathtag::page_ids(doc);
        if (pages.empty()) throw Error(ErrorCode::TargetNotFound, "document has no pages");
        at.object = pages.front();
        for (ObjectId pg : pages) {
            auto ops = mathtag::parse_content(mathtag::page_content(doc, pg));
            bool found = false;
            for (const mathtag::ContentOp& op : ops) {
                const mathtag::OpBeginMarked* bm = std::get_if<mathtag::OpBeginMarked>(&op);
                if (bm && bm->tag == "AF" && bm->resource && *bm->resource == sel.text) {
                    found = true;
                    break;
                }
            }
            if (found) {
                at.object = pg;
                break;
            }
        }
        break;
    }
    }
    mathtag::associate(doc, {filespec}, at);
    mathtag::write_file(output, mathtag::serialize_document(doc));
    std::cout << "attached " << name << " (" << payload.size() << " bytes) as "
              << mathtag::af_relationship_name(*rel) << ", filespec "
              << filespec.number << "\n";
    return 0;
}

int cmd_list(const std::string& input, bool json) {
    Document doc = load(input);
    auto infos = mathtag::list_attachments(doc);
    if (json) {
        Json j;
        j["schema"] = "mathtag.list/1";
        Json items = Json::array();
        for (const auto& info : infos) items.push_back(attachment_json(info));
        j["attachments"] = std::move(items);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (const auto& info : infos) {
        std::cout << info.name << "  "
                  << (info.relationship ? mathtag::af_relationship_name(*info.relationship)
                                        : "-")
                  << "  " << info.payload_size << " bytes"
                  << (info.checksum_ok ? "" : "  [checksum!]")
                  << (info.size_ok ? "" : "  [size!]")
                  << (info.registered ? "" : "  [unregistered]");
        if (!info.desc.empty()) std::cout << "  " << info.desc;
        if (!info.targets.empty()) {
            std::cout << "  targets:";
            for (const auto& t : info.targets) {
                std::cout << " " << target_kind_name(t.kind);
                if (t.kind != mathtag::AssociationTarget::Kind::Document) {
                    std::cout << "(" << t.object.number;
                    if (!t.resource.empty()) std::cout << ",/" << t.resource;
                    std::cout << ")";
                }
            }
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_extract(const std::string& input, const std::string& name, std::string output,
                bool to_stdout, bool json) {
    Document doc = load(input);
    mathtag::ExtractedAttachment result = mathtag::extract_attachment(doc, name);
    if (to_stdout) {
        std::cout.write(reinterpret_cast<const char*>(result.payload.data()),
                        static_cast<std::streamsize>(result.payload.size()));
        return 0;
    }
    if (output.empty()) output = name;
    guard_output(input, output);
    mathtag::write_file(output, result.payload);
    if (json) {
        Json j;
        j["schema"] = "mathtag.extract/1";
        j["output"] = output;
        j["attachment"] = attachment_json(result.info);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "extracted " << name << " (" << result.payload.size() << " bytes) to "
                  << output << "\n";
    }
    return 0;
}

int cmd_inject(const std::string& input, const std::string& output, std::string latex,
               const std::string& latex_file, const std::string& target,
               const std::string& mcids, const std::string& tag, const std::string& role,
               const std::string& font, bool no_role_map) {
    guard_output(input, output);
    Document doc = load(input);
    if (!latex_file.empty()) {
        Bytes bytes = mathtag::read_file(latex_file);
        latex.assign(bytes.begin(), bytes.end());
        while (!latex.empty() && (latex.back() == '\n' || latex.back() == '\r'))
            latex.pop_back();
    }
    if (latex.empty()) throw Error(ErrorCode::UsageError, "no latex source given");

    Selector sel = parse_selector(target);
    mathtag::InjectTarget it;
    switch (sel.kind) {
    case Selector::Kind::Struct:
        it = mathtag::InjectTarget::structure(elem_by_id(doc, sel.text));
        break;
    case Selector::Kind::Res:
        it = mathtag::InjectTarget::named_resource(sel.text);
        break;
    case Selector::Kind::Page: {
        if (mcids.empty())
            throw Error(ErrorCode::UsageError,
                        "page targets need --mcids <first>:<last>");
        std::size_t colon = mcids.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorCode::UsageError, "bad --mcids (expected <first>:<last>)");
        std::int64_t first = 0;
        std::int64_t last = 0;
        try {
            first = std::stoll(mcids.substr(0, colon));
            last = std::stoll(mcids.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::UsageError, "bad --mcids (expected <first>:<last>)");
        }
        it = mathtag::InjectTarget::mcid_range(page_at(doc, sel.page), first, last);
        break;
    }
    case Selector::Kind::Doc:
        throw Error(ErrorCode::UsageError, "inject needs struct:, res:, or page: targets");
    }

    mathtag::InjectOptions options;
    if (!tag.empty()) options.tag = tag;
    if (!role.empty()) options.struct_role = role;
    options.update_role_map = !no_role_map;
    options.font = font;

    mathtag::InjectResult result = mathtag::inject_access_tags(doc, it, latex, options);
    mathtag::write_file(output, mathtag::serialize_document(doc));
    std::cout << "injected access tags on page object " << result.page.number;
    if (result.opening_mcid)
        std::cout << ", MCIDs " << *result.opening_mcid << " and " << *result.closing_mcid;
    std::cout << "\n";
    return 0;
}

int cmd_copy(const std::string& input, const std::string& scope, bool accessible) {
    Document doc = load(input);
    Selector sel = parse_selector(scope);
    mathtag::Scope s = mathtag::Scope::document();
    switch (sel.kind) {
    case Selector::Kind::Doc: break;
    case Selector::Kind::Page: s = mathtag::Scope::page(page_at(doc, sel.page)); break;
    case Selector::Kind::Struct: s = mathtag::Scope::struct_elem(elem_by_id(doc, sel.text)); break;
    case Selector::Kind::Res:
        throw Error(ErrorCode::UsageError, "copy scopes are doc, page:<n>, or struct:<ID>");
    }
    std::u32string text =
        accessible ? mathtag::accessible_text(doc, s) : mathtag::copy_text(doc, s);
    std::cout << utf8_normalized(text) << "\n";
    return 0;
}

int cmd_harvest(const std::string& input, bool json) {
    Document doc = load(input);
    auto entries = mathtag::harvest_latex(doc);
    if (json) {
        Json j;
        j["schema"] = "mathtag.harvest/1";
        Json items = Json::array();
        for (const auto& e : entries) {
            Json item;
            item["latex"] = e.latex;
            item["page"] = e.page_index;
            if (e.mcid) item["mcid"] = *e.mcid;
            items.push_back(std::move(item));
        }
        j["formulas"] = std::move(items);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (const auto& e : entries) {
        std::string text = e.latex;
        for (char& c : text)
            if (c == '\r') c = '\n';
        std::cout << text << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& input, bool json) {
    Bytes bytes = mathtag::read_file(input);
    std::vector<mathtag::Finding> findings = mathtag::validate_bytes(bytes);
    if (json) {
        Json j;
        j["schema"] = "mathtag.validate/1";
        Json items = Json::array();
        for (const auto& f : findings) {
            Json item;
            item["code"] = f.code;
            item["message"] = f.message;
            item["where"] = f.where;
            items.push_back(std::move(item));
        }
        j["findings"] = std::move(items);
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& f : findings)
            std::cout << f.code << " (" << f.where << "): " << f.message << "\n";
        if (findings.empty()) std::cout << "clean\n";
    }
    return findings.empty() ? 0 : 1;
}

int cmd_report(const std::string& input, bool json) {
    Document doc = load(input);
    auto reports = mathtag::association_report(doc);
    if (json) {
        Json j;
        j["schema"] = "mathtag.report/1";
        Json items = Json::array();
        for (const auto& r : reports) {
            Json item;
            item["attachment"] = attachment_json(r.info);
            Json targets = Json::array();
            for (const auto& t : r.targets) {
                Json tj = target_json(t.target);
                if (!t.mcids.empty()) tj["mcids"] = t.mcids;
                if (!t.text.empty()) tj["text"] = mathtag::to_utf8(t.text);
                if (t.page_index) tj["page"] = *t.page_index;
                if (t.span_ops) tj["span_ops"] = t.span_ops;
                targets.push_back(std::move(tj));
            }
            item["targets"] = std::move(targets);
            items.push_back(std::move(item));
        }
        j["files"] = std::move(items);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (const auto& r : reports) {
        std::cout << r.info.name << "\n";
        for (const auto& t : r.targets) {
            std::cout << "  " << target_kind_name(t.target.kind);
            if (t.target.kind != mathtag::AssociationTarget::Kind::Document)
                std::cout << " " << t.target.object.number;
            if (!t.target.resource.empty()) std::cout << " /" << t.target.resource;
            if (!t.mcids.empty()) {
                std::cout << " MCIDs[";
                for (std::size_t i = 0; i < t.mcids.size(); ++i) {
                    if (i) std::cout << ",";
                    std::cout << t.mcids[i];
                }
                std::cout << "]";
            }
            if (!t.text.empty()) std::cout << " text \"" << utf8_normalized(t.text) << "\"";
            std::cout << "\n";
        }
        if (r.targets.empty()) std::cout << "  (not associated)\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Read, tag, and recover math source in uncompressed PDFs"};
    app.require_subcommand(1);

    std::string input;
    std::string output;
    std::string file;
    std::string name;
    std::string desc;
    std::string relationship = "Unspecified";
    std::string mime;
    std::string target = "doc";
    std::string mod_date = kDefaultModDate;
    std::string latex;
    std::string latex_file;
    std::string mcids;
    std::string tag;
    std::string role;
    std::string font;
    std::string scope = "doc";
    bool json = false;
    bool structure = false;
    bool objects = false;
    bool accessible = false;
    bool to_stdout = false;
    bool no_role_map = false;
    std::int64_t content_page = -1;

    CLI::App* inspect = app.add_subcommand("inspect", "Summarize a file or dump its pieces");
    inspect->add_option("input", input)->required();
    inspect->add_flag("--structure", structure, "dump the structure tree");
    inspect->add_flag("--objects", objects, "list every object");
    inspect->add_option("--content", content_page, "dump the content ops of a page");
    inspect->add_flag("--json", json);

    CLI::App* attach = app.add_subcommand("attach", "Embed a file and associate it");
    attach->add_option("input", input)->required();
    attach->add_option("-o,--output", output)->required();
    attach->add_option("--file", file)->required();
    attach->add_option("--name", name, "attachment name (default: file basename)");
    attach->add_option("--desc", desc);
    attach->add_option("--relationship", relationship,
                       "Source | Supplement | Data | Alternative | Unspecified");
    attach->add_option("--mime", mime, "subtype (default from the extension)");
    attach->add_option("--target", target, "doc | page:<n> | struct:<ID> | res:<name>");
    attach->add_option("--mod-date", mod_date, "PDF date for /Params /ModDate");

    CLI::App* list = app.add_subcommand("list", "List attachments");
    list->add_option("input", input)->required();
    list->add_flag("--json", json);

    CLI::App* extract = app.add_subcommand("extract", "Write an attachment payload out");
    extract->add_option("input", input)->required();
    extract->add_option("--name", name)->required();
    extract->add_option("-o,--output", output, "output path (default: the attachment name)");
    extract->add_flag("--stdout", to_stdout, "write the payload to stdout");
    extract->add_flag("--json", json);

    CLI::App* inject = app.add_subcommand("inject", "Wrap a formula in access-tag fake spaces");
    inject->add_option("input", input)->required();
    inject->add_option("-o,--output", output)->required();
    inject->add_option("--latex", latex, "source text");
    inject->add_option("--latex-file", latex_file, "file with the source text");
    inject->add_option("--target", target, "struct:<ID> | res:<name> | page:<n> with --mcids");
    inject->add_option("--mcids", mcids, "<first>:<last> for page targets");
    inject->add_option("--tag", tag, "marked-content tag (default AccessTag)");
    inject->add_option("--role", role, "structure role (default accesstag)");
    inject->add_option("--font", font, "page font resource for the fake space");
    inject->add_flag("--no-role-map", no_role_map, "skip the /RoleMap entry");

    CLI::App* copy = app.add_subcommand("copy", "Clipboard-view text extraction");
    copy->add_option("input", input)->required();
    copy->add_option("--scope", scope, "doc | page:<n> | struct:<ID>");
    copy->add_flag("--accessible", accessible, "use the /Alt accessible view");

    CLI::App* harvest = app.add_subcommand("harvest", "Recover LaTeX sources from access tags");
    harvest->add_option("input", input)->required();
    harvest->add_flag("--json", json);

    CLI::App* report = app.add_subcommand("report", "Associated-file report with targets");
    report->add_option("input", input)->required();
    report->add_flag("--json", json);

    CLI::App* validate = app.add_subcommand("validate", "Cross-object consistency checks");
    validate->add_option("input", input)->required();
    validate->add_flag("--json", json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (inspect->parsed())
            return cmd_inspect(input, structure, objects,
                               content_page >= 0 ? std::optional<std::int64_t>(content_page)
                                                 : std::nullopt,
                               json);
        if (attach->parsed())
            return cmd_attach(input, output, file, name, desc, relationship, mime, target,
                              mod_date);
        if (list->parsed()) return cmd_list(input, json);
        if (extract->parsed()) return cmd_extract(input, name, output, to_stdout, json);
        if (inject->parsed())
            return cmd_inject(input, output, latex, latex_file, target, mcids, tag, role, font,
                              no_role_map);
        if (copy->parsed()) return cmd_copy(input, scope, accessible);
        if (harvest->parsed()) return cmd_harvest(input, json);
        if (report->parsed()) return cmd_report(input, json);
        if (validate->parsed()) return cmd_validate(input, json);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 3;
}
