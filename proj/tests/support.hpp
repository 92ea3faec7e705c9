#pragma once
// Shared test helpers: fixture paths, tiny ontology builders and a random
// ontology/operation generator for the property suites.

#include "ontomerge/advisor.hpp"
#include "ontomerge/engine.hpp"
#include "ontomerge/model.hpp"
#include "ontomerge/owl_io.hpp"
#include "ontomerge/script.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using namespace ontomerge;

inline std::filesystem::path fixture(const std::string& relative)
{
    return std::filesystem::path(ONTOMERGE_FIXTURES) / relative;
}

inline Ontology fixture_owl(const std::string& file)
{
    return read_owl_file(fixture("owl/" + file));
}

inline Ontology ruby() { return fixture_owl("ruby_bibliography.owl"); }
inline Ontology niagara() { return fixture_owl("niagara_bib.owl"); }
inline Ontology sigmod() { return fixture_owl("sigmod_record.owl"); }

inline SlotFrame datatype_slot(std::string name, ClassSet domain, XsdKind kind, Cardinality card = {0, std::nullopt})
{
    return SlotFrame{std::move(name), SlotKind::Datatype, std::move(domain), kind, card};
}

inline SlotFrame object_slot(std::string name, ClassSet domain, ClassSet range, Cardinality card = {0, std::nullopt})
{
    return SlotFrame{std::move(name), SlotKind::Object, std::move(domain), std::move(range), card};
}

inline FrameId fid(const std::string& name, const std::string& source) { return FrameId{source, name}; }

/// Random source ontologies drawn from a small shared vocabulary, so that
/// names collide across sources and the matcher has something to find.
class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    template <class C>
    const auto& any(const C& c)
    {
        auto it = c.begin();
        std::advance(it, pick(c.size()));
        return *it;
    }

    Ontology ontology(const std::string& name, std::size_t max_classes = 8, bool with_instances = true)
    {
        static const std::vector<std::string> class_words = {"person", "author", "book", "article", "vendor",
                                                             "issue", "journal", "editor", "shop", "review"};
        static const std::vector<std::string> slot_words = {"title", "name", "id", "year", "price", "email"};
        Ontology o(name);
        std::vector<std::string> classes;
        std::size_t n = 1 + pick(max_classes);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& w = class_words[pick(class_words.size())];
            if (o.find_class(w))
                continue;
            ClassFrame c{w, {}};
            if (!classes.empty() && chance(0.4))
                c.superclasses.insert(classes[pick(classes.size())]);
            o.add_class(c);
            classes.push_back(w);
        }
        for (std::size_t i = 0, m = pick(5); i < m; ++i) {
            ClassSet domain{classes[pick(classes.size())]};
            if (chance(0.3))
                domain.insert(classes[pick(classes.size())]);
            Cardinality card{unsigned(pick(2)), chance(0.5) ? std::optional<unsigned>{} : std::optional<unsigned>{1 + unsigned(pick(3))}};
            if (chance(0.4)) {
                std::string target = classes[pick(classes.size())];
                std::string sname = "has" + target;
                if (!o.find_slot(sname))
                    o.add_slot(object_slot(sname, domain, {target}, card));
            } else {
                const auto& w = slot_words[pick(slot_words.size())];
                if (!o.find_slot(w))
                    o.add_slot(datatype_slot(w, domain, kInferenceOrder[pick(kInferenceOrder.size())], card));
            }
        }
        if (with_instances) {
            for (std::size_t i = 0, m = pick(4); i < m; ++i) {
                InstanceFrame inst{"i" + std::to_string(i), {classes[pick(classes.size())]}, {}};
                auto attached = attached_to(o, *inst.types.begin());
                for (const auto& s : attached) {
                    if (!chance(0.5))
                        continue;
                    const auto& slot = *o.find_slot(s);
                    if (slot.is_object()) {
                        if (!o.instances().empty())
                            inst.values[s].push_back(InstanceRef{o.instances().begin()->first});
                    } else {
                        inst.values[s].push_back(Literal{sample_literal(slot.range_kind()), slot.range_kind()});
                    }
                }
                o.add_instance(std::move(inst));
            }
        }
        return o;
    }

    /// A random operation over the session's source and merged frames.
    Operation operation(const MergeSession& s)
    {
        auto source_frame = [&](FrameKind kind) -> std::optional<FrameId> {
            const auto& o = s.sources()[pick(s.sources().size())];
            auto names = names_of(o, kind);
            if (names.empty())
                return std::nullopt;
            return o.id(names[pick(names.size())]);
        };
        auto merged_frame = [&](FrameKind kind) -> std::optional<FrameId> {
            auto names = names_of(s.merged(), kind);
            if (names.empty())
                return std::nullopt;
            return s.merged().id(names[pick(names.size())]);
        };
        auto frame = [&](FrameKind kind) {
            auto f = chance(0.7) ? source_frame(kind) : merged_frame(kind);
            if (!f)
                f = source_frame(kind);
            return f.value_or(FrameId{s.sources()[0].name(), "missing"});
        };
        auto kind = [&] { return std::array{FrameKind::Class, FrameKind::Slot, FrameKind::Instance}[pick(3)]; };
        switch (pick(15)) {
        case 0:
        case 1: return MergeClasses{frame(FrameKind::Class), frame(FrameKind::Class), std::nullopt};
        case 2: return MergeSlots{frame(FrameKind::Slot), frame(FrameKind::Slot), std::nullopt};
        case 3: return MergeInstances{frame(FrameKind::Instance), frame(FrameKind::Instance), std::nullopt, chance(0.5)};
        case 4:
        case 5: return ShallowCopy{frame(FrameKind::Class)};
        case 6: return DeepCopy{frame(FrameKind::Class)};
        case 7: return CopySlot{frame(FrameKind::Slot)};
        case 8: return CreateClass{"C" + std::to_string(pick(4)), {}};
        case 9: return AddSuperclass{frame(FrameKind::Class), frame(FrameKind::Class)};
        case 10: return RemoveSuperclass{frame(FrameKind::Class), frame(FrameKind::Class)};
        case 11: {
            auto k = kind();
            return RenameFrame{k, frame(k), "r" + std::to_string(pick(6))};
        }
        case 12: {
            auto k = kind();
            return RemoveFrame{k, frame(k)};
        }
        case 13: {
            auto k = kind();
            return SwapNames{k, frame(k), frame(k)};
        }
        default: {
            auto slot = frame(FrameKind::Slot);
            if (chance(0.5))
                return SetCardinality{slot, Cardinality{unsigned(pick(2)), std::nullopt}};
            return SetSlotRange{slot, kInferenceOrder[pick(kInferenceOrder.size())]};
        }
        }
    }

private:
    static std::vector<std::string> attached_to(const Ontology& o, const std::string& cls)
    {
        std::vector<std::string> out = o.attached_slots(cls);
        for (const auto& a : ancestors(o, cls))
            for (const auto& s : o.attached_slots(a))
                out.push_back(s);
        return out;
    }

    static std::vector<std::string> names_of(const Ontology& o, FrameKind kind)
    {
        std::vector<std::string> out;
        auto collect = [&](const auto& map) {
            for (const auto& [n, _] : map)
                out.push_back(n);
        };
        if (kind == FrameKind::Class)
            collect(o.classes());
        else if (kind == FrameKind::Slot)
            collect(o.slots());
        else
            collect(o.instances());
        return out;
    }

    std::string sample_literal(XsdKind kind)
    {
        switch (kind) {
        case XsdKind::Integer: return std::to_string(pick(100));
        case XsdKind::Decimal: return std::to_string(pick(100)) + ".5";
        case XsdKind::NCName: return "n" + std::to_string(pick(10));
        case XsdKind::NMTOKEN: return std::to_string(pick(10)) + "-x";
        case XsdKind::String: return "some text";
        }
        return "x";
    }

    std::mt19937_64 rng_;
};

} // namespace testing_support
