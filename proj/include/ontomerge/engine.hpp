#pragma once
// Merge engine: the merged ontology under construction, the image maps from
// source frames to merged frames, and the operation log.
//
// Every operation is applied to a copy of the session state and committed
// only if it succeeds, so a failing operation never leaves partial changes.
// Undo replays the log from the initial state.

#include "ontomerge/model.hpp"
#include "ontomerge/operation.hpp"
#include "ontomerge/suggestion.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ontomerge {

enum class SuffixPolicy {
    SuffixOnCollision, // copies keep their name unless it is taken
    AlwaysSuffix,      // copies are always named <name>_<source>
};

std::string_view to_string(SuffixPolicy policy);
std::optional<SuffixPolicy> parse_suffix_policy(std::string_view text);

struct EngineConfig {
    std::string merged_name = "GlobalOntology";
    SuffixPolicy suffix_policy = SuffixPolicy::SuffixOnCollision;
};

/// A merged datatype slot whose inputs disagreed on the range kind.
struct DatatypeMismatch {
    std::string slot;
    std::vector<std::pair<std::string, XsdKind>> candidates; // (source ontology, kind)

    bool operator==(const DatatypeMismatch&) const = default;
};

/// An operation the engine proposes after applying another one.
struct FollowUp {
    Operation op;
    ExplanationKind kind = ExplanationKind::SlotMergeFollowup;
    std::string text;
    std::vector<FrameId> evidence;
};

struct AppliedRecord {
    Operation op;
    std::optional<FrameId> result;
    std::vector<FrameId> created;
    std::vector<FrameId> deleted;
    std::vector<FrameId> rewritten;
    std::set<FrameId> touched; // source and merged frames the operation involved
    std::vector<FollowUp> followups;
    std::vector<std::string> notes;
};

class MergeSession {
public:
    /// Throws invalid-argument with fewer than two sources or clashing names.
    explicit MergeSession(std::vector<Ontology> sources, EngineConfig config = {});

    const std::vector<Ontology>& sources() const { return sources_; }
    const Ontology* source(std::string_view name) const;
    const EngineConfig& config() const { return config_; }
    const Ontology& merged() const { return state_.merged; }
    const std::optional<std::string>& preferred() const { return state_.preferred; }
    const std::vector<Operation>& log() const { return log_; }
    const std::vector<DatatypeMismatch>& mismatches() const { return state_.mismatches; }

    /// source frame -> local name of its image in the merged ontology
    const std::map<FrameId, std::string>& image_map(FrameKind kind) const;
    std::optional<std::string> image(FrameKind kind, const FrameId& source_frame) const;
    std::vector<FrameId> preimages(FrameKind kind, std::string_view merged_name) const;
    /// Frames created by an edit (create-class, or a merge of frames with no preimages).
    bool is_explicit(FrameKind kind, std::string_view merged_name) const;

    /// Resolves a frame reference to a merged local name: merged frames
    /// directly, source frames through their image. nullopt if neither.
    std::optional<std::string> merged_frame(FrameKind kind, const FrameId& ref) const;
    /// Whether the reference names an existing source or merged frame.
    bool resolves(FrameKind kind, const FrameId& ref) const;

    /// Strips a `_<source>` or `_<source>_<k>` suffix added by the collision policy.
    std::string base_name(std::string_view name) const;

    AppliedRecord apply(const Operation& op);

    /// Restores the state before the last operation. Throws empty-log.
    void undo();

    FrameId merge_classes(const FrameId& a, const FrameId& b, std::optional<std::string> name = std::nullopt);
    FrameId merge_slots(const FrameId& a, const FrameId& b, std::optional<std::string> name = std::nullopt);
    FrameId merge_instances(const FrameId& a, const FrameId& b, std::optional<std::string> name = std::nullopt,
                            bool confirm = false);
    FrameId shallow_copy_class(const FrameId& cls);
    FrameId deep_copy_class(const FrameId& cls);
    FrameId copy_slot(const FrameId& slot);

    struct State {
        Ontology merged;
        std::array<std::map<FrameId, std::string>, 3> images;
        std::array<std::set<std::string>, 3> explicit_frames;
        std::optional<std::string> preferred;
        std::vector<DatatypeMismatch> mismatches;
    };

private:
    std::vector<Ontology> sources_;
    EngineConfig config_;
    State state_;
    std::vector<Operation> log_;
};

} // namespace ontomerge
