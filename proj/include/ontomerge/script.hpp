#pragma once
// Merge scripts: a header naming the source ontologies, then one operation
// per line.
//
//   # comment
//   source Ruby_bibliography ../owl/Ruby_bibliography.owl
//   source Niagara_bib ../owl/Niagara_bib.owl
//   config merged=GlobalOntology suffix-policy=suffix-on-collision threshold=0.8
//   merge-classes a=author@Ruby_bibliography b=author@Niagara_bib
//
// Source paths are relative to the script's directory. A source whose path
// ends in .xml is lifted from the XML document; anything else is read as OWL.

#include "ontomerge/advisor.hpp"
#include "ontomerge/error.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ontomerge {

struct ScriptSource {
    std::string name;
    std::filesystem::path path; // as written in the script
};

struct ScriptStep {
    int line = 0;
    Operation op;
};

struct MergeScript {
    std::vector<ScriptSource> sources;
    EngineConfig engine;
    matcher::MatchConfig match;
    std::vector<ScriptStep> steps;
    std::filesystem::path base_dir; // for resolving source paths
};

/// Throws script-syntax with the offending line number.
MergeScript parse_script(std::string_view text, const std::filesystem::path& base_dir = {});
MergeScript load_script(const std::filesystem::path& path);

/// Header and steps in script form. Matcher settings other than the
/// threshold are not represented.
std::string write_script(const MergeScript& script);

/// Failure of one script step; `index` is 1-based.
class StepError : public Error {
public:
    StepError(std::size_t index, ErrorCode cause, const std::string& message)
        : Error(ErrorCode::StepFailure, message), index_(index), cause_(cause)
    {
    }
    std::size_t index() const noexcept { return index_; }
    ErrorCode cause() const noexcept { return cause_; }

private:
    std::size_t index_;
    ErrorCode cause_;
};

/// Loads one source ontology and names it `name`.
Ontology load_source(const std::filesystem::path& path, const std::string& name,
                     std::vector<std::string>* warnings = nullptr);

/// Loads the sources and applies every step through the advisor.
/// Throws step-failure (StepError) on the first failing step.
Advisor replay(const MergeScript& script, std::vector<std::string>* warnings = nullptr);

} // namespace ontomerge
