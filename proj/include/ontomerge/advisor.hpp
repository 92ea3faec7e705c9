#pragma once
// The interactive cycle around a MergeSession: standing suggestions,
// conflict detection, focus ordering and preferred-ontology resolution.

#include "ontomerge/engine.hpp"
#include "ontomerge/matcher.hpp"
#include "ontomerge/suggestion.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ontomerge {

enum class ConflictKind {
    NameCollision,
    DanglingReference,
    RedundantSubclass,
    RangeViolation,
    CardinalityViolation,
    DatatypeMismatch,
};

std::string_view to_string(ConflictKind kind);

struct Resolution {
    Operation op;
    std::set<std::string> favors; // source ontologies whose version this resolution keeps; empty = neutral
    std::string text;
};

struct Conflict {
    ConflictKind kind = ConflictKind::DanglingReference;
    std::vector<FrameId> frames; // merged-ontology frames, most specific first
    std::string description;
    std::vector<Resolution> resolutions;

    std::string key() const;
};

/// Full scan of the merged ontology.
std::vector<Conflict> detect_conflicts(const MergeSession& session);

/// Conflicts involving at least one of the given merged frames.
std::vector<Conflict> detect_conflicts(const MergeSession& session, const std::set<FrameId>& frames);

/// Moves suggestions related to frames touched by the last `window` records
/// to the front, keeping relative order, and marks each moved one with a
/// focus-move explanation.
std::vector<Suggestion> refocus(std::vector<Suggestion> suggestions, std::span<const AppliedRecord> history,
                                std::size_t window = 3);

struct AdvisorConfig {
    matcher::MatchConfig match;
    std::size_t focus_window = 3;
    double followup_score = 0.9;
};

struct StepResult {
    AppliedRecord record;
    std::vector<Suggestion> suggestions;
    std::vector<Conflict> conflicts; // conflicts on frames the operation touched
    std::optional<Explanation> explanation;
};

struct AutoMergeReport {
    std::size_t operations = 0;
    std::vector<Conflict> unresolved;
    std::vector<std::string> notes;
};

class Advisor {
public:
    explicit Advisor(MergeSession session, AdvisorConfig config = {});

    const MergeSession& session() const { return session_; }
    const AdvisorConfig& config() const { return config_; }
    const std::vector<Suggestion>& suggestions() const { return suggestions_; }
    const std::vector<AppliedRecord>& history() const { return history_; }
    std::vector<Conflict> conflicts() const { return detect_conflicts(session_); }

    StepResult step(const Operation& op);

    /// Reverts the last operation by replaying the log; dismissals persist.
    void undo();

    /// Hides a suggestion (by key) for the rest of the session. Returns false,
    /// recording nothing, if no standing suggestion has that key, unless
    /// `require_standing` is off.
    bool dismiss(const std::string& key, bool require_standing = true);
    const std::set<std::string>& dismissed() const { return dismissed_; }

    bool is_valid(const Suggestion& s) const;

    /// Applies the resolution the preferred ontology favors. nullopt when the
    /// preferred ontology's version already stands.
    /// Throws no-preferred-set, unresolvable.
    std::optional<StepResult> resolve_with_preferred(const Conflict& conflict);

    /// Applies the best suggestion until none reaches the threshold, resolving
    /// conflicts through the preferred ontology, then copies whatever source
    /// classes and slots remain without an image. With `strict`, a missing
    /// preferred ontology is an error.
    AutoMergeReport auto_merge(bool strict = false);

private:
    void seed();
    void prune();

    MergeSession session_;
    AdvisorConfig config_;
    std::vector<Suggestion> suggestions_;
    std::vector<AppliedRecord> history_;
    std::set<std::string> consumed_;
    std::set<std::string> dismissed_;
};

} // namespace ontomerge
