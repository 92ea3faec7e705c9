#pragma once
// Lexical name similarity and the initial match list.

#include "ontomerge/model.hpp"
#include "ontomerge/suggestion.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ontomerge::matcher {

enum class Strategy { Exact, Synonym, Levenshtein, Ngram };

std::string_view to_string(Strategy s);

/// Unordered name pairs, compared on normalized (lowercased, token-joined) forms.
class SynonymTable {
public:
    void add(std::string_view a, std::string_view b);
    bool contains(std::string_view a, std::string_view b) const;
    std::size_t size() const { return pairs_.size(); }

private:
    std::set<std::pair<std::string, std::string>> pairs_;
};

/// One pair per line, two names separated by a tab; '#' starts a comment.
SynonymTable parse_synonyms(std::string_view text);
SynonymTable load_synonyms(const std::filesystem::path& path);

struct MatchConfig {
    double threshold = 0.8;
    int ngram_n = 3;
    std::map<Strategy, double> weights{
        {Strategy::Exact, 1.0}, {Strategy::Synonym, 1.0}, {Strategy::Levenshtein, 1.0}, {Strategy::Ngram, 1.0}};
    SynonymTable synonyms;

    /// Throws invalid-argument unless some weight is positive and threshold lies in [0,1].
    void check() const;
    double weight(Strategy s) const;
};

/// Lowercased tokens split on underscores, hyphens, whitespace and camelCase
/// boundaries; digits stay attached to their token. Throws empty-name.
std::vector<std::string> normalize_name(std::string_view name);

/// Tokens of normalize_name concatenated.
std::string joined_form(std::string_view name);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - d / max(|a|,|b|); 1 when both are empty.
double levenshtein_similarity(std::string_view a, std::string_view b);

/// Dice coefficient over character n-gram multisets of the lowercased strings,
/// each padded with n-1 boundary markers per side. Throws invalid-n if n < 1.
double ngram_similarity(std::string_view a, std::string_view b, int n);

struct Similarity {
    double score = 0.0;
    Strategy winner = Strategy::Exact;
};

/// Weighted maximum over the enabled strategies, capped at 1.
Similarity score_names(std::string_view a, std::string_view b, const MatchConfig& config);

inline double name_similarity(std::string_view a, std::string_view b, const MatchConfig& config)
{
    return score_names(a, b, config).score;
}

/// Cross-ontology class pairs and same-kind slot pairs scoring at least the
/// threshold, sorted by score descending then by pair names.
std::vector<Suggestion> initial_matches(const Ontology& first, const Ontology& second, const MatchConfig& config);

} // namespace ontomerge::matcher
