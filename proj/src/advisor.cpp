#include "ontomerge/advisor.hpp"

#include "ontomerge/error.hpp"

#include <algorithm>
#include <map>

namespace ontomerge {

std::string_view to_string(ExplanationKind kind)
{
    switch (kind) {
    case ExplanationKind::LexicalMatch: return "lexical-match";
    case ExplanationKind::SlotMergeFollowup: return "slot-merge-followup";
    case ExplanationKind::InstanceValueFollowup: return "instance-value-followup";
    case ExplanationKind::FocusMove: return "focus-move";
    case ExplanationKind::PreferredResolution: return "preferred-resolution";
    }
    return "lexical-match";
}

std::string_view to_string(ConflictKind kind)
{
    switch (kind) {
    case ConflictKind::NameCollision: return "name-collision";
    case ConflictKind::DanglingReference: return "dangling-reference";
    case ConflictKind::RedundantSubclass: return "redundant-subclass";
    case ConflictKind::RangeViolation: return "range-violation";
    case ConflictKind::CardinalityViolation: return "cardinality-violation";
    case ConflictKind::DatatypeMismatch: return "datatype-mismatch";
    }
    return "dangling-reference";
}

std::string Conflict::key() const
{
    std::string out(to_string(kind));
    for (const auto& f : frames)
        out += " " + f.str();
    return out;
}

namespace {

std::set<std::string> sources_of(const MergeSession& s, FrameKind kind, const std::string& name)
{
    std::set<std::string> out;
    for (const auto& p : s.preimages(kind, name))
        out.insert(p.source);
    return out;
}

std::string join(const std::set<std::string>& names)
{
    std::string out;
    for (const auto& n : names)
        out += (out.empty() ? "" : ",") + n;
    return out;
}

void name_collisions(const MergeSession& s, std::vector<Conflict>& out)
{
    const auto& m = s.merged();
    auto scan = [&](FrameKind kind, const auto& frames) {
        std::map<std::string, std::vector<std::string>> groups;
        for (const auto& [name, frame] : frames)
            groups[s.base_name(name)].push_back(name);
        for (const auto& [base, members] : groups) {
            if (members.size() < 2)
                continue;
            Conflict c;
            c.kind = ConflictKind::NameCollision;
            for (const auto& n : members)
                c.frames.push_back(m.id(n));
            c.description = std::string(to_string(kind)) + "s " + [&] {
                std::string list;
                for (const auto& n : members)
                    list += (list.empty() ? "'" : ", '") + n + "'";
                return list;
            }() + " share the name '" + base + "'";

            bool holder = std::find(members.begin(), members.end(), base) != members.end();
            for (const auto& n : members) {
                if (n == base)
                    continue;
                auto favors = sources_of(s, kind, n);
                if (holder)
                    c.resolutions.push_back(Resolution{SwapNames{kind, m.id(base), m.id(n)}, favors,
                                                       "give the name '" + base + "' to '" + n + "'"});
                else
                    c.resolutions.push_back(
                        Resolution{RenameFrame{kind, m.id(n), base}, favors, "rename '" + n + "' to '" + base + "'"});
            }
            const auto& a = members[0];
            const auto& b = members[1];
            std::optional<Operation> merge;
            if (kind == FrameKind::Class)
                merge = MergeClasses{m.id(a), m.id(b), std::nullopt};
            else if (kind == FrameKind::Slot && m.find_slot(a)->kind == m.find_slot(b)->kind)
                merge = MergeSlots{m.id(a), m.id(b), std::nullopt};
            else if (kind == FrameKind::Instance)
                merge = MergeInstances{m.id(a), m.id(b), std::nullopt, true};
            if (merge)
                c.resolutions.push_back(Resolution{*merge, {}, "merge '" + a + "' and '" + b + "'"});
            out.push_back(std::move(c));
        }
    };
    scan(FrameKind::Class, m.classes());
    scan(FrameKind::Slot, m.slots());
    scan(FrameKind::Instance, m.instances());
}

void dangling_references(const MergeSession& s, std::vector<Conflict>& out)
{
    const auto& m = s.merged();
    auto report = [&](FrameKind kind, const std::string& frame, const std::string& missing, std::string_view what) {
        Conflict c;
        c.kind = ConflictKind::DanglingReference;
        c.frames = {m.id(frame)};
        c.description = std::string(to_string(kind)) + " '" + frame + "' refers to missing " + std::string(what) +
                        " '" + missing + "'";
        c.resolutions.push_back(
            Resolution{RemoveFrame{kind, m.id(frame)}, {}, "remove " + std::string(to_string(kind)) + " '" + frame + "'"});
        out.push_back(std::move(c));
    };
    for (const auto& [name, cls] : m.classes())
        for (const auto& sup : cls.superclasses)
            if (!m.find_class(sup))
                report(FrameKind::Class, name, sup, "superclass");
    for (const auto& [name, slot] : m.slots()) {
        for (const auto& d : slot.domain)
            if (!m.find_class(d))
                report(FrameKind::Slot, name, d, "domain class");
        if (slot.is_object())
            for (const auto& r : slot.range_classes())
                if (r != kThing && !m.find_class(r))
                    report(FrameKind::Slot, name, r, "range class");
    }
    for (const auto& [name, inst] : m.instances()) {
        for (const auto& t : inst.types)
            if (!m.find_class(t))
                report(FrameKind::Instance, name, t, "type");
        for (const auto& [slot, values] : inst.values) {
            if (!m.find_slot(slot))
                report(FrameKind::Instance, name, slot, "slot");
            for (const auto& v : values)
                if (const auto* r = std::get_if<InstanceRef>(&v); r && !m.find_instance(r->name))
                    report(FrameKind::Instance, name, r->name, "instance");
        }
    }
}

void redundant_subclasses(const MergeSession& s, std::vector<Conflict>& out)
{
    const auto& m = s.merged();
    for (const auto& [name, cls] : m.classes()) {
        for (const auto& direct : cls.superclasses) {
            if (!m.find_class(direct))
                continue;
            auto above = ancestors(m, direct);
            for (const auto& other : cls.superclasses) {
                if (other == direct || std::find(above.begin(), above.end(), other) == above.end())
                    continue;
                Conflict c;
                c.kind = ConflictKind::RedundantSubclass;
                c.frames = {m.id(name), m.id(direct), m.id(other)};
                c.description = "'" + name + "' is a direct subclass of both '" + direct + "' and its ancestor '" +
                                other + "'";
                c.resolutions.push_back(Resolution{RemoveSuperclass{m.id(name), m.id(other)},
                                                   {},
                                                   "remove the edge from '" + name + "' to '" + other + "'"});
                out.push_back(std::move(c));
            }
        }
    }
}

ClassSet reachable_types(const Ontology& m, const InstanceFrame& inst)
{
    ClassSet out;
    for (const auto& t : inst.types) {
        if (!m.find_class(t))
            continue;
        out.insert(t);
        for (auto& a : ancestors(m, t))
            out.insert(std::move(a));
    }
    return out;
}

XsdKind widest_needed(const Ontology& m, const std::string& slot)
{
    std::vector<std::string> lexicals;
    for (const auto& [name, inst] : m.instances())
        if (auto it = inst.values.find(slot); it != inst.values.end())
            for (const auto& v : it->second)
                if (const auto* lit = std::get_if<Literal>(&v))
                    lexicals.push_back(lit->lexical);
    for (auto kind : kInferenceOrder)
        if (std::all_of(lexicals.begin(), lexicals.end(), [kind](const auto& l) { return admits(kind, l); }))
            return kind;
    return XsdKind::String;
}

void value_violations(const MergeSession& s, std::vector<Conflict>& out)
{
    const auto& m = s.merged();
    for (const auto& [name, inst] : m.instances()) {
        for (const auto& [slot_name, values] : inst.values) {
            const auto* slot = m.find_slot(slot_name);
            if (!slot)
                continue;
            std::vector<std::string> bad;
            ClassSet widened;
            if (slot->is_object()) {
                const auto& range = slot->range_classes();
                if (!range.contains(std::string(kThing))) {
                    widened = range;
                    for (const auto& v : values) {
                        const auto* ref = std::get_if<InstanceRef>(&v);
                        if (!ref) {
                            bad.push_back(std::get<Literal>(v).lexical);
                            widened = {std::string(kThing)};
                            continue;
                        }
                        const auto* target = m.find_instance(ref->name);
                        if (!target)
                            continue;
                        auto types = reachable_types(m, *target);
                        if (std::none_of(range.begin(), range.end(), [&](const auto& r) { return types.contains(r); })) {
                            bad.push_back(ref->name);
                            if (target->types.empty())
                                widened = {std::string(kThing)};
                            else if (!widened.contains(std::string(kThing)))
                                widened.insert(*target->types.begin());
                        }
                    }
                }
            } else {
                for (const auto& v : values) {
                    if (const auto* lit = std::get_if<Literal>(&v)) {
                        if (!admits(slot->range_kind(), lit->lexical))
                            bad.push_back(lit->lexical);
                    } else {
                        bad.push_back(std::get<InstanceRef>(v).name);
                    }
                }
            }
            if (!bad.empty()) {
                Conflict c;
                c.kind = ConflictKind::RangeViolation;
                c.frames = {m.id(name), m.id(slot_name)};
                std::string list;
                for (const auto& b : bad)
                    list += (list.empty() ? "'" : ", '") + b + "'";
                c.description = "values " + list + " of instance '" + name + "' lie outside the range of slot '" +
                                slot_name + "'";
                bool has_refs = std::any_of(values.begin(), values.end(),
                                            [](const Value& v) { return std::holds_alternative<InstanceRef>(v); });
                if (slot->is_object()) {
                    c.resolutions.push_back(Resolution{SetSlotRange{m.id(slot_name), widened},
                                                       {},
                                                       "widen the range of '" + slot_name + "' to " + join(widened)});
                } else if (!has_refs) {
                    auto kind = widest_needed(m, slot_name);
                    c.resolutions.push_back(Resolution{SetSlotRange{m.id(slot_name), kind},
                                                       {},
                                                       "widen the range of '" + slot_name + "' to " +
                                                           std::string(to_string(kind))});
                }
                c.resolutions.push_back(Resolution{RemoveFrame{FrameKind::Instance, m.id(name)},
                                                   {},
                                                   "remove instance '" + name + "'"});
                out.push_back(std::move(c));
            }

            auto count = static_cast<unsigned>(values.size());
            if (count < slot->card.min || (slot->card.max && count > *slot->card.max)) {
                Conflict c;
                c.kind = ConflictKind::CardinalityViolation;
                c.frames = {m.id(name), m.id(slot_name)};
                c.description = "instance '" + name + "' has " + std::to_string(count) + " values for slot '" +
                                slot_name + "' with cardinality " + to_string(slot->card);
                Cardinality card{std::min(slot->card.min, count), slot->card.max};
                if (card.max)
                    card.max = std::max(*card.max, count);
                c.resolutions.push_back(Resolution{SetCardinality{m.id(slot_name), card},
                                                   {},
                                                   "widen the cardinality of '" + slot_name + "' to " + to_string(card)});
                out.push_back(std::move(c));
            }
        }
    }
}

void datatype_mismatches(const MergeSession& s, std::vector<Conflict>& out)
{
    const auto& m = s.merged();
    for (const auto& mm : s.mismatches()) {
        if (!m.find_slot(mm.slot))
            continue;
        Conflict c;
        c.kind = ConflictKind::DatatypeMismatch;
        c.frames = {m.id(mm.slot)};
        std::map<XsdKind, std::set<std::string>> by_kind;
        std::string list;
        for (const auto& [source, kind] : mm.candidates) {
            auto& favors = by_kind[kind];
            if (source != m.name())
                favors.insert(source);
            list += (list.empty() ? "" : ", ") + std::string(to_string(kind)) + " from " + source;
        }
        c.description = "merged slot '" + mm.slot + "' has conflicting datatypes: " + list;
        for (const auto& [kind, favors] : by_kind)
            c.resolutions.push_back(Resolution{SetSlotRange{m.id(mm.slot), kind}, favors,
                                               "use " + std::string(to_string(kind)) + " for '" + mm.slot + "'"});
        out.push_back(std::move(c));
    }
}

} // namespace

std::vector<Conflict> detect_conflicts(const MergeSession& session)
{
    std::vector<Conflict> out;
    name_collisions(session, out);
    dangling_references(session, out);
    redundant_subclasses(session, out);
    value_violations(session, out);
    datatype_mismatches(session, out);
    return out;
}

std::vector<Conflict> detect_conflicts(const MergeSession& session, const std::set<FrameId>& frames)
{
    auto all = detect_conflicts(session);
    std::erase_if(all, [&](const Conflict& c) {
        return std::none_of(c.frames.begin(), c.frames.end(), [&](const FrameId& f) { return frames.contains(f); });
    });
    return all;
}

std::vector<Suggestion> refocus(std::vector<Suggestion> suggestions, std::span<const AppliedRecord> history,
                                std::size_t window)
{
    std::set<FrameId> recent;
    auto begin = history.size() > window ? history.end() - static_cast<std::ptrdiff_t>(window) : history.begin();
    for (auto it = begin; it != history.end(); ++it) {
        recent.insert(it->touched.begin(), it->touched.end());
        recent.insert(it->rewritten.begin(), it->rewritten.end());
    }
    std::vector<Suggestion> front, back;
    for (auto& s : suggestions) {
        std::erase_if(s.explanations, [](const Explanation& e) { return e.kind == ExplanationKind::FocusMove; });
        std::vector<FrameId> hits;
        for (const auto& r : s.related)
            if (recent.contains(r))
                hits.push_back(r);
        if (hits.empty()) {
            back.push_back(std::move(s));
            continue;
        }
        std::string list;
        for (std::size_t i = 0; i < hits.size() && i < 3; ++i)
            list += (i ? ", '" : "'") + hits[i].str() + "'";
        s.explanations.push_back(Explanation{ExplanationKind::FocusMove,
                                             "moved up because recent operations changed " + list,
                                             hits,
                                             std::nullopt});
        front.push_back(std::move(s));
    }
    front.insert(front.end(), std::make_move_iterator(back.begin()), std::make_move_iterator(back.end()));
    return front;
}

Advisor::Advisor(MergeSession session, AdvisorConfig config) : session_(std::move(session)), config_(std::move(config))
{
    config_.match.check();
    if (!session_.log().empty())
        throw Error(ErrorCode::InvalidArgument, "an advisor starts from a fresh session");
    seed();
}

void Advisor::seed()
{
    suggestions_.clear();
    const auto& sources = session_.sources();
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j)
            for (auto& s : matcher::initial_matches(sources[i], sources[j], config_.match))
                suggestions_.push_back(std::move(s));
    std::stable_sort(suggestions_.begin(), suggestions_.end(),
                     [](const Suggestion& x, const Suggestion& y) { return x.score > y.score; });
    prune();
}

bool Advisor::is_valid(const Suggestion& s) const
{
    auto key = s.key();
    if (consumed_.contains(key) || dismissed_.contains(key))
        return false;
    auto kind_of = [](const Operation& op) {
        if (std::holds_alternative<MergeSlots>(op) || std::holds_alternative<CopySlot>(op))
            return FrameKind::Slot;
        if (std::holds_alternative<MergeInstances>(op))
            return FrameKind::Instance;
        return FrameKind::Class;
    };
    auto kind = kind_of(s.proposed);
    for (const auto& a : arguments(s.proposed))
        if (!session_.resolves(kind, a))
            return false;

    auto group_sources = [&](const FrameId& ref) {
        std::set<std::string> out;
        auto target = session_.merged_frame(kind, ref);
        if (!target) {
            out.insert(ref.source);
            return out;
        }
        for (const auto& p : session_.preimages(kind, *target))
            out.insert(p.source);
        if (ref.source != session_.merged().name())
            out.insert(ref.source);
        return out;
    };
    auto pair_ok = [&](const FrameId& a, const FrameId& b) {
        auto ia = session_.merged_frame(kind, a);
        auto ib = session_.merged_frame(kind, b);
        if (ia && ib && *ia == *ib)
            return false;
        // a merge combines frames of different ontologies, one per ontology
        auto sa = group_sources(a);
        auto sb = group_sources(b);
        return std::none_of(sa.begin(), sa.end(), [&](const auto& x) { return sb.contains(x); });
    };
    return std::visit(
        [&](const auto& op) -> bool {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, MergeClasses> || std::is_same_v<T, MergeSlots> ||
                          std::is_same_v<T, MergeInstances>)
                return pair_ok(op.a, op.b);
            else if constexpr (std::is_same_v<T, ShallowCopy> || std::is_same_v<T, DeepCopy>)
                return !session_.image(FrameKind::Class, op.cls);
            else if constexpr (std::is_same_v<T, CopySlot>)
                return !session_.image(FrameKind::Slot, op.slot);
            else
                return true;
        },
        s.proposed);
}

void Advisor::prune()
{
    std::erase_if(suggestions_, [this](const Suggestion& s) { return !is_valid(s); });
}

StepResult Advisor::step(const Operation& op)
{
    auto record = session_.apply(op);
    consumed_.insert(to_line(op));
    for (const auto& f : record.followups) {
        Suggestion s;
        s.proposed = f.op;
        auto key = s.key();
        Explanation why{f.kind, f.text, f.evidence, std::nullopt};
        auto existing = std::find_if(suggestions_.begin(), suggestions_.end(),
                                     [&](const Suggestion& x) { return x.key() == key; });
        if (existing != suggestions_.end()) {
            bool known = std::any_of(existing->explanations.begin(), existing->explanations.end(),
                                     [&](const Explanation& e) { return e.kind == f.kind && e.text == f.text; });
            if (!known)
                existing->explanations.push_back(std::move(why));
            existing->score = std::max(existing->score, config_.followup_score);
            existing->related.insert(f.evidence.begin(), f.evidence.end());
            continue;
        }
        s.score = config_.followup_score;
        s.explanations.push_back(std::move(why));
        s.related.insert(f.evidence.begin(), f.evidence.end());
        suggestions_.push_back(std::move(s));
    }
    history_.push_back(record);
    prune();
    suggestions_ = refocus(std::move(suggestions_), history_, config_.focus_window);

    std::set<FrameId> frames;
    const auto& merged_name = session_.merged().name();
    auto add = [&](const FrameId& f) {
        if (f.source == merged_name) {
            frames.insert(f);
            return;
        }
        for (FrameKind k : {FrameKind::Class, FrameKind::Slot, FrameKind::Instance})
            if (auto i = session_.image(k, f))
                frames.insert(session_.merged().id(*i));
    };
    for (const auto& f : record.touched)
        add(f);
    for (const auto& f : record.rewritten)
        add(f);

    StepResult result;
    result.record = std::move(record);
    result.suggestions = suggestions_;
    result.conflicts = detect_conflicts(session_, frames);
    return result;
}

void Advisor::undo()
{
    if (session_.log().empty())
        throw Error(ErrorCode::EmptyLog, "nothing to undo");
    auto ops = session_.log();
    ops.pop_back();
    MergeSession fresh(session_.sources(), session_.config());
    session_ = std::move(fresh);
    history_.clear();
    consumed_.clear();
    seed();
    for (const auto& op : ops)
        step(op);
}

bool Advisor::dismiss(const std::string& key, bool require_standing)
{
    auto it = std::find_if(suggestions_.begin(), suggestions_.end(), [&](const Suggestion& s) { return s.key() == key; });
    bool standing = it != suggestions_.end();
    if (!standing && require_standing)
        return false;
    dismissed_.insert(key);
    if (standing)
        suggestions_.erase(it);
    return standing;
}

std::optional<StepResult> Advisor::resolve_with_preferred(const Conflict& conflict)
{
    const auto& preferred = session_.preferred();
    if (!preferred)
        throw Error(ErrorCode::NoPreferredSet, "no preferred ontology is set");
    const Resolution* chosen = nullptr;
    if (conflict.resolutions.size() == 1 && conflict.resolutions.front().favors.empty())
        chosen = &conflict.resolutions.front();
    if (!chosen && conflict.kind == ConflictKind::NameCollision) {
        // the preferred ontology already holds the contested name
        const auto& m = session_.merged();
        for (const auto& f : conflict.frames) {
            FrameKind kinds[] = {FrameKind::Class, FrameKind::Slot, FrameKind::Instance};
            for (auto k : kinds) {
                if (!m.contains(k, f.name) || session_.base_name(f.name) != f.name)
                    continue;
                auto owners = sources_of(session_, k, f.name);
                if (owners.contains(*preferred) &&
                    std::none_of(conflict.resolutions.begin(), conflict.resolutions.end(),
                                 [&](const Resolution& r) { return r.favors.contains(*preferred); }))
                    return std::nullopt;
            }
        }
    }
    if (!chosen)
        for (const auto& r : conflict.resolutions)
            if (r.favors.contains(*preferred)) {
                chosen = &r;
                break;
            }
    if (!chosen)
        throw Error(ErrorCode::Unresolvable,
                    "no resolution of " + conflict.key() + " favors the preferred ontology " + *preferred);
    auto op = chosen->op;
    auto text = chosen->text;
    auto result = step(op);
    result.explanation = Explanation{ExplanationKind::PreferredResolution,
                                     "resolved " + std::string(to_string(conflict.kind)) + " in favor of " +
                                         *preferred + ": " + text,
                                     conflict.frames,
                                     std::nullopt};
    return result;
}

AutoMergeReport Advisor::auto_merge(bool strict)
{
    if (strict && !session_.preferred())
        throw Error(ErrorCode::NoPreferredSet, "strict automatic merging needs a preferred ontology");
    AutoMergeReport report;
    std::size_t total = 0;
    for (const auto& s : session_.sources())
        total += s.frame_count();
    const std::size_t guard = std::max<std::size_t>(10, 10 * total);
    auto count = [&] {
        if (++report.operations > guard)
            throw Error(ErrorCode::NonterminationGuard,
                        "automatic merge exceeded " + std::to_string(guard) + " operations");
    };

    std::set<std::string> attempted;
    auto settle_conflicts = [&] {
        if (!session_.preferred())
            return;
        for (bool progress = true; progress;) {
            progress = false;
            for (const auto& c : detect_conflicts(session_)) {
                if (!attempted.insert(c.key()).second)
                    continue;
                try {
                    if (resolve_with_preferred(c)) {
                        count();
                        progress = true;
                        break;
                    }
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::NonterminationGuard)
                        throw;
                    report.notes.push_back(c.key() + ": " + e.what());
                }
            }
        }
    };

    for (;;) {
        const Suggestion* best = nullptr;
        for (const auto& s : suggestions_)
            if (s.score >= config_.match.threshold && (!best || s.score > best->score))
                best = &s;
        if (!best)
            break;
        auto op = best->proposed;
        count();
        try {
            step(op);
        } catch (const Error& e) {
            report.notes.push_back(to_line(op) + ": " + e.what());
            consumed_.insert(to_line(op));
            prune();
            continue;
        }
        settle_conflicts();
    }

    for (const auto& source : session_.sources()) {
        for (const auto& [name, cls] : source.classes()) {
            if (session_.image(FrameKind::Class, source.id(name)))
                continue;
            count();
            step(DeepCopy{source.id(name)});
        }
    }
    for (const auto& source : session_.sources()) {
        for (const auto& [name, slot] : source.slots()) {
            if (session_.image(FrameKind::Slot, source.id(name)))
                continue;
            count();
            step(CopySlot{source.id(name)});
        }
    }
    settle_conflicts();
    report.unresolved = detect_conflicts(session_);
    return report;
}

} // namespace ontomerge
