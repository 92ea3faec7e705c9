#include "ontomerge/matcher.hpp"

#include "ontomerge/error.hpp"
#include "ontomerge/xml.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace ontomerge::matcher {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
char lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

std::string format_score(double score)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", score);
    return buffer;
}

} // namespace

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::Exact: return "exact";
    case Strategy::Synonym: return "synonym";
    case Strategy::Levenshtein: return "levenshtein";
    case Strategy::Ngram: return "ngram";
    }
    return "exact";
}

void SynonymTable::add(std::string_view a, std::string_view b)
{
    auto x = joined_form(a);
    auto y = joined_form(b);
    if (y < x)
        std::swap(x, y);
    pairs_.emplace(std::move(x), std::move(y));
}

bool SynonymTable::contains(std::string_view a, std::string_view b) const
{
    if (pairs_.empty() || a.empty() || b.empty())
        return false;
    auto x = joined_form(a);
    auto y = joined_form(b);
    if (y < x)
        std::swap(x, y);
    return pairs_.contains({x, y});
}

SynonymTable parse_synonyms(std::string_view text)
{
    SynonymTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
            line.find('\t', tab + 1) != std::string::npos)
            throw Error(ErrorCode::InvalidArgument,
                        "synonym table line " + std::to_string(number) + ": expected two tab-separated names");
        table.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return table;
}

SynonymTable load_synonyms(const std::filesystem::path& path)
{
    return parse_synonyms(xml::read_file(path));
}

void MatchConfig::check() const
{
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0,1]");
    if (ngram_n < 1)
        throw Error(ErrorCode::InvalidN, "n-gram size must be at least 1");
    bool any = false;
    for (const auto& [s, w] : weights) {
        if (w < 0.0)
            throw Error(ErrorCode::InvalidArgument, "strategy weights must be non-negative");
        any = any || w > 0.0;
    }
    if (!any)
        throw Error(ErrorCode::InvalidArgument, "at least one strategy weight must be positive");
}

double MatchConfig::weight(Strategy s) const
{
    auto it = weights.find(s);
    return it == weights.end() ? 0.0 : it->second;
}

std::vector<std::string> normalize_name(std::string_view name)
{
    if (name.empty())
        throw Error(ErrorCode::EmptyName, "cannot normalize an empty name");
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty())
            tokens.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '_' || c == '-' || c == ' ' || c == '\t') {
            flush();
            continue;
        }
        if (is_upper(c) && !current.empty()) {
            char prev = name[i - 1];
            bool next_lower = i + 1 < name.size() && is_lower(name[i + 1]);
            // fooBar, foo2Bar | XMLParser -> xml, parser
            if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower))
                flush();
        }
        current += lower(c);
    }
    flush();
    if (tokens.empty())
        throw Error(ErrorCode::EmptyName, "name '" + std::string(name) + "' has no letters or digits");
    return tokens;
}

std::string joined_form(std::string_view name)
{
    auto tokens = normalize_name(name);
    return std::accumulate(tokens.begin(), tokens.end(), std::string());
}

std::size_t levenshtein(std::string_view a, std::string_view b)
{
    if (a.size() < b.size())
        std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t above = row[j];
            std::size_t substitution = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
            diagonal = above;
        }
    }
    return row[b.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b)
{
    std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0)
        return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double ngram_similarity(std::string_view a, std::string_view b, int n)
{
    if (n < 1)
        throw Error(ErrorCode::InvalidN, "n-gram size must be at least 1");
    if (a.empty() && b.empty())
        return 1.0;
    constexpr char kBoundary = '\x01';
    auto grams = [n](std::string_view s) {
        std::string padded(static_cast<std::size_t>(n - 1), kBoundary);
        padded += lowercase(s);
        padded.append(static_cast<std::size_t>(n - 1), kBoundary);
        std::map<std::string, std::size_t> out;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= padded.size(); ++i)
            ++out[padded.substr(i, static_cast<std::size_t>(n))];
        return out;
    };
    auto ga = grams(a);
    auto gb = grams(b);
    std::size_t total = 0, shared = 0;
    for (const auto& [g, count] : ga) {
        total += count;
        if (auto it = gb.find(g); it != gb.end())
            shared += std::min(count, it->second);
    }
    for (const auto& [g, count] : gb)
        total += count;
    if (total == 0)
        return 1.0;
    return 2.0 * static_cast<double>(shared) / static_cast<double>(total);
}

Similarity score_names(std::string_view a, std::string_view b, const MatchConfig& config)
{
    Similarity best;
    auto consider = [&](Strategy s, auto&& compute) {
        double w = config.weight(s);
        if (w <= 0.0)
            return;
        double score = std::min(1.0, w * compute());
        if (score > best.score) {
            best.score = score;
            best.winner = s;
        }
    };
    auto ta = a.empty() ? std::vector<std::string>{} : normalize_name(a);
    auto tb = b.empty() ? std::vector<std::string>{} : normalize_name(b);
    auto ja = std::accumulate(ta.begin(), ta.end(), std::string());
    auto jb = std::accumulate(tb.begin(), tb.end(), std::string());

    consider(Strategy::Exact, [&] { return ta == tb ? 1.0 : 0.0; });
    consider(Strategy::Synonym, [&] { return config.synonyms.contains(a, b) ? 1.0 : 0.0; });
    consider(Strategy::Levenshtein, [&] { return levenshtein_similarity(ja, jb); });
    consider(Strategy::Ngram, [&] { return ngram_similarity(ja, jb, config.ngram_n); });
    return best;
}

std::vector<Suggestion> initial_matches(const Ontology& first, const Ontology& second, const MatchConfig& config)
{
    config.check();
    struct Ranked {
        Suggestion suggestion;
        std::string a, b;
        int kind;
    };
    std::vector<Ranked> ranked;

    auto explain = [](std::string_view what, const std::string& a, const std::string& b, const Similarity& sim) {
        return std::string(what) + " names '" + a + "' and '" + b + "' match by " +
               std::string(to_string(sim.winner)) + " similarity " + format_score(sim.score);
    };

    for (const auto& [na, ca] : first.classes()) {
        for (const auto& [nb, cb] : second.classes()) {
            auto sim = score_names(na, nb, config);
            if (sim.score < config.threshold)
                continue;
            Suggestion s;
            s.proposed = MergeClasses{first.id(na), second.id(nb), std::nullopt};
            s.score = sim.score;
            s.explanations.push_back(Explanation{ExplanationKind::LexicalMatch, explain("class", na, nb, sim),
                                                 {first.id(na), second.id(nb)}, sim.score});
            s.related = {first.id(na), second.id(nb)};
            ranked.push_back(Ranked{std::move(s), na, nb, 0});
        }
    }
    for (const auto& [na, sa] : first.slots()) {
        for (const auto& [nb, sb] : second.slots()) {
            if (sa.kind != sb.kind)
                continue;
            auto sim = score_names(na, nb, config);
            if (sim.score < config.threshold)
                continue;
            Suggestion s;
            s.proposed = MergeSlots{first.id(na), second.id(nb), std::nullopt};
            s.score = sim.score;
            s.explanations.push_back(Explanation{ExplanationKind::LexicalMatch, explain("slot", na, nb, sim),
                                                 {first.id(na), second.id(nb)}, sim.score});
            s.related = {first.id(na), second.id(nb)};
            for (const auto& d : sa.domain)
                s.related.insert(first.id(d));
            for (const auto& d : sb.domain)
                s.related.insert(second.id(d));
            if (sa.is_object())
                for (const auto& r : sa.range_classes())
                    s.related.insert(first.id(r));
            if (sb.is_object())
                for (const auto& r : sb.range_classes())
                    s.related.insert(second.id(r));
            ranked.push_back(Ranked{std::move(s), na, nb, 1});
        }
    }

    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
        if (x.suggestion.score != y.suggestion.score)
            return x.suggestion.score > y.suggestion.score;
        return std::tie(x.a, x.b, x.kind) < std::tie(y.a, y.b, y.kind);
    });
    std::vector<Suggestion> out;
    out.reserve(ranked.size());
    for (auto& r : ranked)
        out.push_back(std::move(r.suggestion));
    return out;
}

} // namespace ontomerge::matcher
