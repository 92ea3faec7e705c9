#include "ontomerge/script.hpp"

#include "ontomerge/ingest.hpp"
#include "ontomerge/owl_io.hpp"
#include "ontomerge/xml.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace ontomerge {

namespace {

[[noreturn]] void syntax(int line, const std::string& message)
{
    throw Error(ErrorCode::ScriptSyntax, "line " + std::to_string(line) + ": " + message);
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string format_threshold(double t)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%g", t);
    return buffer;
}

} // namespace

MergeScript parse_script(std::string_view text, const std::filesystem::path& base_dir)
{
    MergeScript script;
    script.base_dir = base_dir;
    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    bool seen_step = false;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        auto line = trim(raw);
        if (line.empty())
            continue;
        std::istringstream words(line);
        std::string head;
        words >> head;
        if (head == "source") {
            if (seen_step)
                syntax(number, "source lines must precede the operations");
            std::string name, path, extra;
            if (!(words >> name >> path) || (words >> extra))
                syntax(number, "expected 'source <name> <path>'");
            for (const auto& s : script.sources)
                if (s.name == name)
                    syntax(number, "source '" + name + "' declared twice");
            script.sources.push_back(ScriptSource{name, path});
        } else if (head == "config") {
            if (seen_step)
                syntax(number, "the config line must precede the operations");
            std::string token;
            while (words >> token) {
                auto eq = token.find('=');
                if (eq == std::string::npos)
                    syntax(number, "expected key=value, got '" + token + "'");
                auto key = token.substr(0, eq), value = token.substr(eq + 1);
                if (key == "merged") {
                    if (!is_ncname(value))
                        syntax(number, "merged ontology name '" + value + "' is not a valid name");
                    script.engine.merged_name = value;
                } else if (key == "suffix-policy") {
                    auto policy = parse_suffix_policy(value);
                    if (!policy)
                        syntax(number, "unknown suffix policy '" + value + "'");
                    script.engine.suffix_policy = *policy;
                } else if (key == "threshold") {
                    double t = 0;
                    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), t);
                    if (ec != std::errc() || ptr != value.data() + value.size() || t < 0.0 || t > 1.0)
                        syntax(number, "threshold must be a number in [0,1]");
                    script.match.threshold = t;
                } else {
                    syntax(number, "unknown config key '" + key + "'");
                }
            }
        } else {
            seen_step = true;
            try {
                script.steps.push_back(ScriptStep{number, parse_operation(line)});
            } catch (const Error& e) {
                syntax(number, e.what());
            }
        }
    }
    return script;
}

MergeScript load_script(const std::filesystem::path& path)
{
    return parse_script(xml::read_file(path), path.parent_path());
}

std::string write_script(const MergeScript& script)
{
    std::ostringstream out;
    for (const auto& s : script.sources)
        out << "source " << s.name << " " << s.path.generic_string() << "\n";
    out << "config merged=" << script.engine.merged_name << " suffix-policy=" << to_string(script.engine.suffix_policy)
        << " threshold=" << format_threshold(script.match.threshold) << "\n";
    for (const auto& step : script.steps)
        out << to_line(step.op) << "\n";
    return out.str();
}

Ontology load_source(const std::filesystem::path& path, const std::string& name, std::vector<std::string>* warnings)
{
    Ontology o;
    if (path.extension() == ".xml") {
        ingest::LiftConfig config;
        config.ontology_name = name;
        std::vector<std::filesystem::path> files{path};
        o = ingest::lift_files(files, config, std::nullopt, warnings);
    } else {
        o = read_owl_file(path, warnings);
    }
    o.set_name(name);
    return o;
}

Advisor replay(const MergeScript& script, std::vector<std::string>* warnings)
{
    std::vector<Ontology> sources;
    for (const auto& s : script.sources) {
        auto path = s.path.is_absolute() ? s.path : script.base_dir / s.path;
        sources.push_back(load_source(path, s.name, warnings));
    }
    AdvisorConfig config;
    config.match = script.match;
    Advisor advisor(MergeSession(std::move(sources), script.engine), config);
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        try {
            advisor.step(step.op);
        } catch (const Error& e) {
            throw StepError(i + 1, e.code(),
                            "step " + std::to_string(i + 1) + " (line " + std::to_string(step.line) + ") failed: " +
                                std::string(to_string(e.code())) + ": " + e.what());
        }
    }
    return advisor;
}

} // namespace ontomerge
