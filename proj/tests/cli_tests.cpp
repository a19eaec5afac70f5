// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "doctest.h"

#include "checks.hpp"
#include "fixtures.hpp"
#include "mutations.hpp"
#include "mathtag/io.hpp"

using Json = nlohmann::json;
namespace fs = std::filesystem;
using checks::text_of;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("mathtag-cli-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    out += "'";
    return out;
}

CliResult run_cli(const std::vector<std::string>& args) {
    static int counter = 0;
    fs::path out_path = work_dir() / ("stdout-" + std::to_string(counter) + ".txt");
    fs::path err_path = work_dir() / ("stderr-" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd = shell_quote(MATHTAG_BIN);
    for (const std::string& a : args) cmd += " " + shell_quote(a);
    cmd += " > " + shell_quote(out_path.string()) + " 2> " + shell_quote(err_path.string());

    int rc = std::system(cmd.c_str());
    CliResult r;
    if (rc != -1 && WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
    r.out = read_text(out_path);
    r.err = read_text(err_path);
    return r;
}

struct Inputs {
    std::string fig_full;
    std::string fig_pre;
    std::string minimal;
    std::string xml_payload;
};

const Inputs& inputs() {
    static const Inputs paths = [] {
        Inputs p;
        p.fig_full = (work_dir() / "fig-full.pdf").string();
        p.fig_pre = (work_dir() / "fig-pre.pdf").string();
        p.minimal = (work_dir() / "minimal.pdf").string();
        p.xml_payload = (work_dir() / "inline-1.xml").string();
        mathtag::write_file(p.fig_full, fixtures::fig_full_pdf());
        mathtag::write_file(p.fig_pre, fixtures::fig_pre_pdf());
        mathtag::write_file(p.minimal, fixtures::minimal_pdf());
        mathtag::write_file(p.xml_payload, fixtures::inline_xml_payload());
        return p;
    }();
    return paths;
}

std::string out_path(const std::string& name) { return (work_dir() / name).string(); }

const Json* attachment_named(const Json& list, const std::string& name) {
    for (const Json& item : list)
        if (item.at("name") == name) return &item;
    return nullptr;
}

} // namespace

TEST_CASE("inspect summarizes a file") {
    CliResult r = run_cli({"inspect", inputs().fig_full});
    CHECK(r.code == 0);
    CHECK(r.out.find("1 page, 4 attachments, tagged") != std::string::npos);

    CliResult pre = run_cli({"inspect", inputs().minimal});
    CHECK(pre.code == 0);
    CHECK(pre.out.find("untagged") != std::string::npos);
}

TEST_CASE("inspect --json reports the document shape") {
    CliResult r = run_cli({"inspect", inputs().fig_full, "--json"});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    CHECK(j.at("schema") == "mathtag.inspect/1");
    CHECK(j.at("pages") == 1);
    CHECK(j.at("attachments") == 4);
    CHECK(j.at("tagged") == true);
}

TEST_CASE("inspect --structure dumps the element tree") {
    CliResult r = run_cli({"inspect", inputs().fig_full, "--structure"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("/Formula 112") != std::string::npos);
    CHECK(r.out.find("ID=Math0.1") != std::string::npos);
}

TEST_CASE("list --json carries integrity flags and targets") {
    CliResult r = run_cli({"list", inputs().fig_full, "--json"});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    const Json& items = j.at("attachments");
    REQUIRE(items.size() == 4);

    const Json* tex = attachment_named(items, "inline-1.tex");
    REQUIRE(tex);
    CHECK(tex->at("relationship") == "Source");
    CHECK(tex->at("subtype") == "application/x-tex");
    CHECK(tex->at("size") == 16);
    CHECK(tex->at("payload_size") == 16);
    CHECK(tex->at("size_ok") == true);
    CHECK(tex->at("checksum_ok") == true);
    CHECK(tex->at("registered") == true);

    bool structure = false;
    bool span = false;
    for (const Json& t : tex->at("targets")) {
        if (t.at("kind") == "structure" && t.at("object") == 112) structure = true;
        if (t.at("kind") == "content-span" && t.at("resource") == "inline-1") span = true;
    }
    CHECK(structure);
    CHECK(span);
}

TEST_CASE("extract --stdout writes the exact payload") {
    CliResult r = run_cli({"extract", inputs().fig_full, "--name", "inline-1.tex", "--stdout"});
    REQUIRE(r.code == 0);
    CHECK(r.out == text_of(fixtures::inline_tex_payload()));
}

TEST_CASE("extract reports a missing attachment") {
    CliResult r = run_cli({"extract", inputs().fig_full, "--name", "nope.tex", "--stdout"});
    CHECK(r.code == 4);
    CHECK(!r.err.empty());
}

TEST_CASE("attach embeds, lists, and validates clean") {
    std::string attached = out_path("attached.pdf");
    CliResult r = run_cli({"attach", inputs().minimal, "-o", attached, "--file",
                           inputs().xml_payload, "--relationship", "Supplement", "--desc",
                           "MathML for the formula"});
    REQUIRE(r.code == 0);

    CliResult list = run_cli({"list", attached, "--json"});
    REQUIRE(list.code == 0);
    Json j = Json::parse(list.out);
    const Json* xml = attachment_named(j.at("attachments"), "inline-1.xml");
    REQUIRE(xml);
    CHECK(xml->at("relationship") == "Supplement");
    CHECK(xml->at("size") == 164);
    CHECK(xml->at("checksum_ok") == true);
    CHECK(xml->at("registered") == true);

    CliResult v = run_cli({"validate", attached});
    CHECK(v.code == 0);
    CHECK(v.out.find("clean") != std::string::npos);
}

TEST_CASE("attach rejects duplicate names") {
    std::string first = out_path("dup-first.pdf");
    REQUIRE(run_cli({"attach", inputs().minimal, "-o", first, "--file", inputs().xml_payload})
                .code == 0);
    CliResult r = run_cli({"attach", first, "-o", out_path("dup-second.pdf"), "--file",
                           inputs().xml_payload});
    CHECK(r.code == 5);
}

TEST_CASE("attach refuses to overwrite its input") {
    CliResult r = run_cli({"attach", inputs().minimal, "-o", inputs().minimal, "--file",
                           inputs().xml_payload});
    CHECK(r.code == 3);
}

TEST_CASE("bad option values are usage errors") {
    CliResult rel = run_cli({"attach", inputs().minimal, "-o", out_path("never.pdf"), "--file",
                             inputs().xml_payload, "--relationship", "Bogus"});
    CHECK(rel.code == 3);

    CliResult sel = run_cli({"copy", inputs().fig_full, "--scope", "bogus:thing"});
    CHECK(sel.code == 3);
}

TEST_CASE("a missing input file fails without a stack trace") {
    CliResult r = run_cli({"list", out_path("does-not-exist.pdf")});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("inject, then harvest and copy round the source trip") {
    std::string tagged = out_path("tagged.pdf");
    CliResult r = run_cli({"inject", inputs().fig_pre, "-o", tagged, "--latex", "k \\in \\RR",
                           "--target", "res:inline-1", "--font", "F79"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("MCIDs 8 and 12") != std::string::npos);

    CliResult h = run_cli({"harvest", tagged, "--json"});
    REQUIRE(h.code == 0);
    Json j = Json::parse(h.out);
    REQUIRE(j.at("formulas").size() == 1);
    CHECK(j.at("formulas")[0].at("latex") == "k \\in \\RR");
    CHECK(j.at("formulas")[0].at("page") == 0);
    CHECK(j.at("formulas")[0].at("mcid") == 8);

    CliResult c = run_cli({"copy", tagged});
    REQUIRE(c.code == 0);
    CHECK(c.out.find("<latex>\nk \\in \\RR\n</latex>") != std::string::npos);

    CliResult v = run_cli({"validate", tagged});
    CHECK(v.code == 0);
}

TEST_CASE("inject needs a source and a resolvable target") {
    CliResult no_latex = run_cli({"inject", inputs().fig_pre, "-o", out_path("never2.pdf"),
                                  "--target", "res:inline-1"});
    CHECK(no_latex.code == 3);

    CliResult bad_target = run_cli({"inject", inputs().fig_pre, "-o", out_path("never3.pdf"),
                                    "--latex", "x", "--target", "res:nope"});
    CHECK(bad_target.code == 4);

    CliResult again = run_cli({"inject", inputs().fig_full, "-o", out_path("never4.pdf"),
                               "--latex", "x", "--target", "res:inline-1"});
    CHECK(again.code == 5);
}

TEST_CASE("copy narrows to a structure element by its ID") {
    CliResult r = run_cli({"copy", inputs().fig_full, "--scope", "struct:Math0.1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("<latex>") != std::string::npos);
    CHECK(r.out.find("k \\in \\RR") != std::string::npos);
    CHECK(r.out.find("\U0001D458\u2208\u211D") != std::string::npos);

    CliResult acc = run_cli({"copy", inputs().fig_pre, "--accessible"});
    REQUIRE(acc.code == 0);
    CHECK(acc.out.find("as element of") != std::string::npos);
}

TEST_CASE("validate flags a corrupted file with exit one") {
    const mutations::Mutation& m = mutations::all().front();
    std::string corrupted = out_path("corrupted.pdf");
    mathtag::write_file(corrupted, m.apply(fixtures::fig_full_pdf()));

    CliResult r = run_cli({"validate", corrupted, "--json"});
    CHECK(r.code == 1);
    Json j = Json::parse(r.out);
    bool found = false;
    for (const Json& f : j.at("findings"))
        if (f.at("code") == m.expected_code) found = true;
    CHECK(found);
}

TEST_CASE("report ties attachments to structure and spans") {
    CliResult r = run_cli({"report", inputs().fig_full, "--json"});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    const Json* tex = nullptr;
    for (const Json& item : j.at("files"))
        if (item.at("attachment").at("name") == "inline-1.tex") tex = &item;
    REQUIRE(tex);
    bool mcids_seen = false;
    bool span_seen = false;
    for (const Json& t : tex->at("targets")) {
        if (t.contains("mcids") && t.at("mcids") == Json::array({8, 9, 10, 11, 12}))
            mcids_seen = true;
        if (t.at("kind") == "content-span" && t.contains("span_ops") && t.at("span_ops") > 0)
            span_seen = true;
    }
    CHECK(mcids_seen);
    CHECK(span_seen);
}

TEST_CASE("unknown subcommands are parse errors") {
    CliResult r = run_cli({"frobnicate", inputs().fig_full});
    CHECK(r.code == 3);
    CliResult none = run_cli({});
    CHECK(none.code == 3);
}
