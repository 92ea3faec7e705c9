#pragma once

#include "ontomerge/operation.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ontomerge {

enum class ExplanationKind {
    LexicalMatch,
    SlotMergeFollowup,
    InstanceValueFollowup,
    FocusMove,
    PreferredResolution,
};

std::string_view to_string(ExplanationKind kind);

struct Explanation {
    ExplanationKind kind = ExplanationKind::LexicalMatch;
    std::string text;
    std::vector<FrameId> evidence;
    std::optional<double> score;
};

struct Suggestion {
    Operation proposed;
    double score = 0.0;
    std::vector<Explanation> explanations; // first entry: why it was suggested
    std::set<FrameId> related;

    /// Identity of the proposed operation (its text form).
    std::string key() const { return to_line(proposed); }
};

} // namespace ontomerge
