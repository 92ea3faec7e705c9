// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "cli_runner.hpp"
#include "properties.hpp"

#include "ontomerge/ingest.hpp"
#include "ontomerge/json_codec.hpp"
#include "ontomerge/matcher.hpp"
#include "ontomerge/service.hpp"
#include "ontomerge/xml.hpp"

#include <httplib.h>

#include <chrono>
#include <iostream>
#include <thread>

using namespace ontomerge;
using testing_support::fixture;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
    void require_empty(const std::string& err, const std::string& what)
    {
        require(err.empty(), what + ": " + err);
    }
};

Ontology lift_xml(const std::string& file, const std::string& name)
{
    ingest::LiftConfig config;
    config.ontology_name = name;
    std::vector<std::filesystem::path> files{fixture("xml/" + file)};
    return ingest::lift_files(files, config);
}

std::set<std::string> class_names(const Ontology& o)
{
    std::set<std::string> out;
    for (const auto& [n, _] : o.classes())
        out.insert(n);
    return out;
}

std::string lower(std::string s)
{
    for (auto& c : s)
        c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

using Row = std::tuple<std::string, std::string, std::string>; // property, domain class, range

/// One row per (property, domain class). Class names are compared
/// case-insensitively because the published reference rows capitalize some
/// of them inconsistently (Issue / issue, Author / author).
std::set<Row> rows(const Ontology& o, SlotKind kind)
{
    std::set<Row> out;
    for (const auto& [name, slot] : o.slots()) {
        if (slot.kind != kind)
            continue;
        std::string range;
        if (slot.is_object()) {
            for (const auto& c : slot.range_classes())
                range += (range.empty() ? "" : ",") + lower(c);
        } else {
            range = std::string(to_string(slot.range_kind()));
        }
        for (const auto& d : slot.domain)
            out.emplace(name, lower(d), range);
    }
    return out;
}

// Reference property rows of the bibliography experiment.
const std::set<Row> kObjectRowsTwoSource = {
    {"hasbiblioentry", "bibliography", "biblioentry"}, {"hasvendor", "bibliography", "vendor"},
    {"hasbook", "vendor", "book"},                     {"hasauthor", "book", "author"},
    {"hasauthor", "biblioentry", "author"},            {"haspublisher", "biblioentry", "publisher"},
};
const std::set<Row> kObjectRowsSigmod = {
    {"hasissue", "sigmodrecord", "issue"}, {"hasarticles", "issue", "articles"},
    {"hasarticle", "articles", "article"}, {"hasauthors", "article", "authors"},
    {"hasauthor", "authors", "author"},
};
const std::set<Row> kDatatypeRowsTwoSource = {
    {"id", "bibliography", "NCName"}, {"id", "biblioentry", "NCName"}, {"id", "vendor", "NCName"},
    {"name", "vendor", "NCName"},     {"email", "vendor", "string"},   {"phone", "vendor", "NMTOKEN"},
    {"title", "book", "string"},      {"publisher", "book", "string"}, {"year", "book", "integer"},
    {"price", "book", "decimal"},     {"title", "biblioentry", "string"}, {"pubdate", "biblioentry", "integer"},
    {"firstname", "author", "NCName"}, {"lastname", "author", "NCName"},
};
const std::set<Row> kDatatypeRowsSigmod = {
    {"volume", "issue", "integer"},    {"number", "issue", "integer"},  {"title", "article", "string"},
    {"initPage", "article", "integer"}, {"endPage", "article", "integer"}, {"position", "author", "integer"},
    {"surname", "author", "NCName"},
};

std::set<Row> unite(const std::set<Row>& a, const std::set<Row>& b)
{
    auto out = a;
    out.insert(b.begin(), b.end());
    return out;
}

Outcome criterion1()
{
    Outcome o;
    o.require(class_names(lift_xml("ruby_bibliography.xml", "Ruby_bibliography")) ==
                  std::set<std::string>{"bibliography", "biblioentry", "author", "publisher"},
              "Ruby class set differs");
    o.require(class_names(lift_xml("niagara_bib.xml", "Niagara_bib")) ==
                  std::set<std::string>{"bib", "vendor", "book", "author"},
              "Niagara class set differs");
    return o;
}

Outcome criterion2()
{
    Outcome o;
    auto niagara = lift_xml("niagara_bib.xml", "Niagara_bib");
    auto ruby = lift_xml("ruby_bibliography.xml", "Ruby_bibliography");
    std::map<std::string, XsdKind> expected{{"name", XsdKind::NCName},      {"email", XsdKind::String},
                                            {"phone", XsdKind::NMTOKEN},    {"title", XsdKind::String},
                                            {"publisher", XsdKind::String}, {"year", XsdKind::Integer},
                                            {"price", XsdKind::Decimal},    {"id", XsdKind::NCName}};
    for (const auto& [slot, kind] : expected) {
        const auto* s = niagara.find_slot(slot);
        o.require(s && !s->is_object() && s->range_kind() == kind, "Niagara " + slot);
    }
    const auto* id = ruby.find_slot("id");
    o.require(id && !id->is_object() && id->range_kind() == XsdKind::NCName, "Ruby id");
    return o;
}

Outcome criterion3()
{
    Outcome o;
    auto two = replay(load_script(fixture("scripts/bibliography.merge"))).session().merged();
    o.require(write_canonical(two) == xml::read_file(fixture("golden/bibliography.canonical")),
              "two-source canonical export differs from golden file");
    o.require(rows(two, SlotKind::Object) == kObjectRowsTwoSource, "two-source object properties differ from the reference rows");
    o.require(rows(two, SlotKind::Datatype) == kDatatypeRowsTwoSource,
              "two-source datatype properties differ from the reference rows");
    auto three = replay(load_script(fixture("scripts/bibliography_sigmod.merge"))).session().merged();
    o.require(write_canonical(three) == xml::read_file(fixture("golden/bibliography_sigmod.canonical")),
              "three-source canonical export differs from golden file");
    o.require(rows(three, SlotKind::Object) == unite(kObjectRowsTwoSource, kObjectRowsSigmod),
              "three-source object properties differ from the reference rows");
    o.require(rows(three, SlotKind::Datatype) == unite(kDatatypeRowsTwoSource, kDatatypeRowsSigmod),
              "three-source datatype properties differ from the reference rows");
    return o;
}

Outcome criterion4()
{
    Outcome o;
    auto list = matcher::initial_matches(read_owl_file(fixture("owl/ruby_bibliography.owl")),
                                         read_owl_file(fixture("owl/niagara_bib.owl")), matcher::MatchConfig{});
    auto has = [&](const std::string& key) {
        return std::any_of(list.begin(), list.end(), [&](const Suggestion& s) { return s.key() == key; });
    };
    o.require(has("merge-classes a=author@Ruby_bibliography b=author@Niagara_bib"), "author/author missing");
    o.require(!has("merge-classes a=bibliography@Ruby_bibliography b=bib@Niagara_bib"), "bibliography/bib present");
    return o;
}

Outcome criterion5()
{
    Outcome o;
    auto advisor = replay(load_script(fixture("scripts/gender_sex.merge")));
    const auto& list = advisor.suggestions();
    auto it = std::find_if(list.begin(), list.end(),
                           [](const Suggestion& s) { return s.key() == "merge-classes a=Gender@Census b=Sex@Clinic"; });
    o.require(it != list.end(), "no standing merge-classes(Gender, Sex) suggestion");
    if (it != list.end())
        o.require(it->explanations.front().kind == ExplanationKind::SlotMergeFollowup,
                  "suggestion is not explained as a slot-merge follow-up");
    return o;
}

Outcome criterion6()
{
    Outcome o;
    properties::RandomOpsStats stats;
    o.require_empty(properties::random_operation_sequences(1000, 30, 20260101, &stats), "(a) random sequences");
    o.require(stats.sequences == 1000, "(a) not all sequences completed");
    o.require_empty(properties::levenshtein_exhaustive(7), "(b) exhaustive Levenshtein");
    o.require_empty(properties::levenshtein_metric(10000, 42), "(b) metric axioms");
    o.require_empty(properties::ngram_bounds(10000, 43), "(c) n-gram bounds");
    o.require_empty(properties::undo_restores(200, 12, 44), "(d) undo");
    o.require_empty(properties::self_merge_counts(300, 45), "(e) self merge");
    o.require_empty(properties::owl_fixpoint(), "(f) OWL fixpoint");
    if (o.pass)
        o.detail = std::to_string(stats.applied) + " operations applied, " + std::to_string(stats.rejected) +
                   " rejected";
    return o;
}

/// Replays a merge script against a running service and returns the canonical export.
std::string replay_over_http(httplib::Client& client, const std::filesystem::path& path, std::string& error)
{
    auto script = load_script(path);
    json sources = json::array();
    for (const auto& s : script.sources) {
        auto file = s.path.is_absolute() ? s.path : script.base_dir / s.path;
        sources.push_back({{"name", s.name},
                           {"format", file.extension() == ".xml" ? "xml" : "owl"},
                           {"content", xml::read_file(file)}});
    }
    json body = {{"sources", sources},
                 {"config",
                  {{"merged", script.engine.merged_name},
                   {"suffix_policy", std::string(to_string(script.engine.suffix_policy))},
                   {"threshold", script.match.threshold}}}};
    auto created = client.Post("/sessions", body.dump(), "application/json");
    if (!created || created->status != 201) {
        error = "create failed";
        return {};
    }
    auto id = json::parse(created->body)["id"].get<std::string>();
    std::uint64_t version = 0;
    for (const auto& step : script.steps) {
        auto res = client.Post("/sessions/" + id + "/operations",
                               json{{"state_version", version}, {"op", to_line(step.op)}}.dump(), "application/json");
        if (!res || res->status != 200) {
            error = "step '" + to_line(step.op) + "' failed";
            return {};
        }
        version = json::parse(res->body)["state_version"].get<std::uint64_t>();
    }
    auto exported = client.Get("/sessions/" + id + "/export?format=canonical");
    if (!exported || exported->status != 200) {
        error = "export failed";
        return {};
    }
    return exported->body;
}

Outcome criterion7()
{
    Outcome o;
    service::Server server;
    int port = server.bind_any_port();
    if (port <= 0) {
        o.require(false, "cannot bind a port");
        return o;
    }
    std::thread thread([&] { server.run(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);
    std::size_t compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator(fixture("scripts"))) {
        if (entry.path().extension() != ".merge")
            continue;
        auto via_cli = cli::run("merge --script " + cli::quote(entry.path().string()));
        o.require(via_cli.status == 0, entry.path().filename().string() + ": CLI failed");
        std::string error;
        auto via_http = replay_over_http(client, entry.path(), error);
        o.require(error.empty(), entry.path().filename().string() + ": " + error);
        o.require(via_cli.out == via_http, entry.path().filename().string() + ": exports differ");
        ++compared;
    }
    server.stop();
    thread.join();
    o.require(compared >= 3, "expected at least three scripts");
    if (o.pass)
        o.detail = std::to_string(compared) + " scripts byte-identical";
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int number;
        const char* title;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "fixture lift, exact class sets", criterion1},
        {2, "datatype inference, exact ranges", criterion2},
        {3, "replay golden test (two- and three-source)", criterion3},
        {4, "initial matches contain author/author, not bibliography/bib", criterion4},
        {5, "slot-merge follow-up proposes merge-classes(Gender, Sex)", criterion5},
        {6, "property suites (a)-(f)", criterion6},
        {7, "CLI and HTTP service give byte-identical exports", criterion7},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        std::cout << "criterion " << c.number << ": " << (out.pass ? "PASS" : "FAIL") << "  " << c.title;
        if (!out.detail.empty())
            std::cout << " (" << out.detail << ")";
        std::cout << " [" << ms.count() << " ms]\n";
        failures += !out.pass;
    }
    return failures == 0 ? 0 : 1;
}
