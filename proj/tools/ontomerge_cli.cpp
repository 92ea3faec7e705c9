// ontomerge: lift XML sources, list initial matches, run merges, convert
// ontologies between OWL and canonical text, and serve the HTTP API.

#include "ontomerge/advisor.hpp"
#include "ontomerge/ingest.hpp"
#include "ontomerge/matcher.hpp"
#include "ontomerge/owl_io.hpp"
#include "ontomerge/script.hpp"
#include "ontomerge/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace ontomerge;

namespace {

service::Server* active_server = nullptr;

void on_signal(int)
{
    if (active_server)
        active_server->stop();
}

void print_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

std::string render(const Ontology& o, const std::string& format)
{
    return format == "owl" ? write_owl(o) : write_canonical(o);
}

/// Writes to `out` atomically, or to stdout when it is empty or "-".
void emit(const std::string& text, const std::string& out)
{
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text_file(out, text);
}

/// OWL files keep their own ontology name; XML files are named after their stem.
Ontology load_any(const fs::path& path, std::vector<std::string>& warnings)
{
    if (path.extension() == ".xml")
        return load_source(path, path.stem().string(), &warnings);
    return read_owl_file(path, &warnings);
}

matcher::MatchConfig match_config(double threshold, const std::string& synonyms)
{
    matcher::MatchConfig config;
    config.threshold = threshold;
    if (!synonyms.empty())
        config.synonyms = matcher::load_synonyms(synonyms);
    config.check();
    return config;
}

void print_suggestion(const Suggestion& s)
{
    std::cout << std::fixed << std::setprecision(4) << s.score << '\t' << s.key() << '\n';
    for (const auto& e : s.explanations)
        std::cout << "\t" << to_string(e.kind) << ": " << e.text << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ontology merge workbench"};
    app.require_subcommand(1);

    // lift
    auto* lift = app.add_subcommand("lift", "Lift XML documents into a source ontology");
    std::vector<std::string> lift_files;
    std::string lift_name, lift_xsd, lift_out, lift_format = "owl";
    bool lift_instances = false;
    lift->add_option("files", lift_files, "XML documents sharing one root element")->required()->check(CLI::ExistingFile);
    lift->add_option("--name", lift_name, "Ontology name")->required();
    lift->add_option("--xsd", lift_xsd, "Schema to use instead of inference")->check(CLI::ExistingFile);
    lift->add_flag("--with-instances", lift_instances, "Emit one instance per element occurrence");
    lift->add_option("-o,--output", lift_out, "Output file (default stdout)");
    lift->add_option("--format", lift_format, "owl or canonical")->check(CLI::IsMember({"owl", "canonical"}));

    // match
    auto* match = app.add_subcommand("match", "List the initial matches between two ontologies");
    std::string match_a, match_b, match_synonyms;
    double match_threshold = matcher::MatchConfig{}.threshold;
    match->add_option("first", match_a)->required()->check(CLI::ExistingFile);
    match->add_option("second", match_b)->required()->check(CLI::ExistingFile);
    match->add_option("--threshold", match_threshold, "Minimum score");
    match->add_option("--synonyms", match_synonyms, "Synonym table")->check(CLI::ExistingFile);

    // merge
    auto* merge = app.add_subcommand("merge", "Replay a merge script or merge automatically");
    std::string merge_script, merge_out, merge_format = "canonical", merge_preferred, merge_policy, merge_name,
                                          merge_synonyms;
    std::vector<std::string> merge_sources;
    bool merge_auto = false, merge_strict = false;
    double merge_threshold = matcher::MatchConfig{}.threshold;
    auto* script_opt = merge->add_option("--script", merge_script, "Merge script")->check(CLI::ExistingFile);
    auto* auto_opt = merge->add_flag("--auto", merge_auto, "Apply suggestions until none reaches the threshold");
    script_opt->excludes(auto_opt);
    merge->add_option("sources", merge_sources, "Source ontologies for --auto")->check(CLI::ExistingFile);
    merge->add_option("--preferred", merge_preferred, "Source whose version wins conflicts");
    merge->add_flag("--strict", merge_strict, "Fail on conflicts when no preferred source is given");
    auto* threshold_opt = merge->add_option("--threshold", merge_threshold, "Suggestion threshold");
    merge->add_option("--suffix-policy", merge_policy, "suffix-on-collision or always-suffix")
        ->check(CLI::IsMember({"suffix-on-collision", "always-suffix"}));
    merge->add_option("--merged-name", merge_name, "Name of the merged ontology");
    merge->add_option("--synonyms", merge_synonyms, "Synonym table")->check(CLI::ExistingFile);
    merge->add_option("-o,--output", merge_out, "Output file (default stdout)");
    merge->add_option("--format", merge_format, "canonical or owl")->check(CLI::IsMember({"canonical", "owl"}));

    // export
    auto* exp = app.add_subcommand("export", "Convert an OWL ontology");
    std::string export_in, export_out;
    bool export_canonical = false, export_owl = false;
    exp->add_option("input", export_in)->required()->check(CLI::ExistingFile);
    auto* canonical_flag = exp->add_flag("--canonical", export_canonical, "Canonical text");
    exp->add_flag("--owl", export_owl, "OWL (RDF/XML)")->excludes(canonical_flag);
    exp->add_option("-o,--output", export_out, "Output file (default stdout)");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
    std::string serve_host = "127.0.0.1", serve_data;
    int serve_port = 8080;
    serve->add_option("--host", serve_host);
    serve->add_option("--port", serve_port)->check(CLI::Range(0, 65535));
    serve->add_option("--data-dir", serve_data, "Directory for persisted sessions");

    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> warnings;
    try {
        if (*lift) {
            ingest::LiftConfig config;
            config.ontology_name = lift_name;
            config.with_instances = lift_instances;
            std::vector<fs::path> files(lift_files.begin(), lift_files.end());
            std::optional<fs::path> xsd;
            if (!lift_xsd.empty())
                xsd = lift_xsd;
            auto o = ingest::lift_files(files, config, xsd, &warnings);
            print_warnings(warnings);
            emit(render(o, lift_format), lift_out);
        } else if (*match) {
            auto a = load_any(match_a, warnings);
            auto b = load_any(match_b, warnings);
            print_warnings(warnings);
            for (const auto& s : matcher::initial_matches(a, b, match_config(match_threshold, match_synonyms)))
                print_suggestion(s);
        } else if (*merge) {
            std::optional<Advisor> advisor;
            if (!merge_script.empty()) {
                auto script = load_script(merge_script);
                if (*threshold_opt)
                    script.match.threshold = merge_threshold;
                if (!merge_synonyms.empty())
                    script.match.synonyms = matcher::load_synonyms(merge_synonyms);
                advisor.emplace(replay(script, &warnings));
            } else if (merge_auto) {
                if (merge_sources.size() < 2)
                    throw Error(ErrorCode::InvalidArgument, "--auto needs at least two source files");
                std::vector<Ontology> sources;
                for (const auto& p : merge_sources)
                    sources.push_back(load_any(p, warnings));
                EngineConfig engine;
                if (!merge_name.empty())
                    engine.merged_name = merge_name;
                if (!merge_policy.empty())
                    engine.suffix_policy = *parse_suffix_policy(merge_policy);
                AdvisorConfig config;
                config.match = match_config(merge_threshold, merge_synonyms);
                advisor.emplace(MergeSession(std::move(sources), engine), config);
                if (!merge_preferred.empty())
                    advisor->step(SetPreferred{merge_preferred});
                auto report = advisor->auto_merge(merge_strict);
                for (const auto& n : report.notes)
                    std::cerr << "note: " << n << '\n';
                for (const auto& c : report.unresolved)
                    std::cerr << "unresolved: " << to_string(c.kind) << ": " << c.description << '\n';
                std::cerr << report.operations << " operations applied\n";
            } else {
                throw Error(ErrorCode::InvalidArgument, "merge needs --script or --auto");
            }
            print_warnings(warnings);
            emit(render(advisor->session().merged(), merge_format), merge_out);
        } else if (*exp) {
            auto o = read_owl_file(export_in, &warnings);
            print_warnings(warnings);
            emit(render(o, export_owl ? "owl" : "canonical"), export_out);
        } else if (*serve) {
            service::ServiceConfig config;
            if (!serve_data.empty())
                config.data_dir = fs::path(serve_data);
            service::Server server(config);
            for (const auto& e : server.restore_errors())
                std::cerr << "warning: could not restore " << e << '\n';
            bool bound = serve_port == 0 ? (serve_port = server.bind_any_port(serve_host)) > 0
                                         : server.bind(serve_host, serve_port);
            if (!bound)
                throw Error(ErrorCode::IoFailure, "cannot bind " + serve_host + ":" + std::to_string(serve_port));
            std::cerr << "listening on http://" << serve_host << ':' << serve_port << '\n';
            active_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.run();
            active_server = nullptr;
        }
    } catch (const Error& e) {
        print_warnings(warnings);
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
