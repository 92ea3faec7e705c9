#include "ontomerge/model.hpp"

#include "ontomerge/error.hpp"

#include <algorithm>
#include <functional>

namespace ontomerge {

std::string_view to_string(FrameKind kind)
{
    switch (kind) {
    case FrameKind::Class: return "class";
    case FrameKind::Slot: return "slot";
    case FrameKind::Instance: return "instance";
    }
    return "class";
}

std::optional<FrameKind> parse_frame_kind(std::string_view text)
{
    if (text == "class")
        return FrameKind::Class;
    if (text == "slot")
        return FrameKind::Slot;
    if (text == "instance")
        return FrameKind::Instance;
    return std::nullopt;
}

std::optional<FrameId> parse_frame_id(std::string_view text)
{
    auto at = text.rfind('@');
    if (at == std::string_view::npos || at == 0 || at + 1 == text.size())
        return std::nullopt;
    return FrameId{std::string(text.substr(at + 1)), std::string(text.substr(0, at))};
}

std::string to_string(const Cardinality& card)
{
    return std::to_string(card.min) + ".." + (card.max ? std::to_string(*card.max) : "*");
}

const ClassFrame* Ontology::find_class(std::string_view name) const
{
    auto it = classes_.find(std::string(name));
    return it == classes_.end() ? nullptr : &it->second;
}

const SlotFrame* Ontology::find_slot(std::string_view name) const
{
    auto it = slots_.find(std::string(name));
    return it == slots_.end() ? nullptr : &it->second;
}

const InstanceFrame* Ontology::find_instance(std::string_view name) const
{
    auto it = instances_.find(std::string(name));
    return it == instances_.end() ? nullptr : &it->second;
}

ClassFrame* Ontology::find_class(std::string_view name)
{
    return const_cast<ClassFrame*>(std::as_const(*this).find_class(name));
}

SlotFrame* Ontology::find_slot(std::string_view name)
{
    return const_cast<SlotFrame*>(std::as_const(*this).find_slot(name));
}

InstanceFrame* Ontology::find_instance(std::string_view name)
{
    return const_cast<InstanceFrame*>(std::as_const(*this).find_instance(name));
}

bool Ontology::contains(FrameKind kind, std::string_view name) const
{
    switch (kind) {
    case FrameKind::Class: return find_class(name) != nullptr;
    case FrameKind::Slot: return find_slot(name) != nullptr;
    case FrameKind::Instance: return find_instance(name) != nullptr;
    }
    return false;
}

namespace {

template <class Frame>
Frame& insert_unique(std::map<std::string, Frame>& frames, Frame frame, std::string_view what,
                     const std::string& ontology)
{
    auto name = frame.name;
    auto [it, inserted] = frames.emplace(name, std::move(frame));
    if (!inserted)
        throw Error(ErrorCode::NameCollision,
                    std::string(what) + " '" + name + "' already exists in " + ontology);
    return it->second;
}

} // namespace

ClassFrame& Ontology::add_class(ClassFrame frame)
{
    return insert_unique(classes_, std::move(frame), "class", name_);
}

SlotFrame& Ontology::add_slot(SlotFrame frame)
{
    return insert_unique(slots_, std::move(frame), "slot", name_);
}

InstanceFrame& Ontology::add_instance(InstanceFrame frame)
{
    return insert_unique(instances_, std::move(frame), "instance", name_);
}

std::vector<std::string> Ontology::attached_slots(std::string_view class_name) const
{
    std::vector<std::string> out;
    for (const auto& [name, slot] : slots_)
        if (slot.domain.contains(std::string(class_name)))
            out.push_back(name);
    return out;
}

std::vector<std::string> Ontology::subclasses(std::string_view class_name) const
{
    std::vector<std::string> out;
    for (const auto& [name, cls] : classes_)
        if (cls.superclasses.contains(std::string(class_name)))
            out.push_back(name);
    return out;
}

std::string_view to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::InvalidName: return "invalid-name";
    case ViolationKind::ReservedName: return "reserved-name";
    case ViolationKind::UnresolvedReference: return "unresolved-reference";
    case ViolationKind::CyclicHierarchy: return "cyclic-hierarchy";
    case ViolationKind::CardinalityOrder: return "cardinality-order";
    case ViolationKind::ZeroMaxCardinality: return "zero-max-cardinality";
    case ViolationKind::RangeKindMismatch: return "range-kind-mismatch";
    case ViolationKind::EmptyObjectRange: return "empty-object-range";
    case ViolationKind::UnattachedSlotValue: return "unattached-slot-value";
    case ViolationKind::InvalidLiteral: return "invalid-literal";
    }
    return "unknown";
}

namespace {

// Strongly connected components of the superclass graph that contain a cycle
// (size > 1, or a self-loop). Tarjan, iterating classes in name order.
std::vector<std::vector<std::string>> hierarchy_cycles(const Ontology& o)
{
    std::map<std::string, int> index, lowlink;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> cycles;
    int counter = 0;

    std::function<void(const std::string&)> connect = [&](const std::string& v) {
        index[v] = lowlink[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : o.classes().at(v).superclasses) {
            if (!o.find_class(w))
                continue;
            if (!index.contains(w)) {
                connect(w);
                lowlink[v] = std::min(lowlink[v], lowlink[w]);
            } else if (on_stack.contains(w)) {
                lowlink[v] = std::min(lowlink[v], index[w]);
            }
        }
        if (lowlink[v] == index[v]) {
            std::vector<std::string> component;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                component.push_back(w);
            } while (w != v);
            bool self_loop = o.classes().at(v).superclasses.contains(v);
            if (component.size() > 1 || self_loop) {
                std::sort(component.begin(), component.end());
                cycles.push_back(std::move(component));
            }
        }
    };

    for (const auto& [name, cls] : o.classes())
        if (!index.contains(name))
            connect(name);
    return cycles;
}

bool class_resolves(const Ontology& o, const std::string& name)
{
    return name == kThing || o.find_class(name);
}

} // namespace

std::vector<Violation> validate(const Ontology& o)
{
    std::vector<Violation> out;
    auto report = [&](FrameKind fk, const std::string& frame, ViolationKind vk, std::string detail) {
        out.push_back(Violation{fk, frame, vk, std::move(detail)});
    };
    auto check_name = [&](FrameKind fk, const std::string& name) {
        if (!is_ncname(name))
            report(fk, name, ViolationKind::InvalidName, "local name is not an NCName");
    };

    for (const auto& [name, cls] : o.classes()) {
        check_name(FrameKind::Class, name);
        if (name == kThing)
            report(FrameKind::Class, name, ViolationKind::ReservedName, "Thing is the implicit top class");
        for (const auto& super : cls.superclasses)
            if (!o.find_class(super))
                report(FrameKind::Class, name, ViolationKind::UnresolvedReference,
                       "superclass '" + super + "' does not resolve");
    }
    for (const auto& cycle : hierarchy_cycles(o)) {
        std::string members;
        for (const auto& c : cycle)
            members += (members.empty() ? "" : ",") + c;
        report(FrameKind::Class, cycle.front(), ViolationKind::CyclicHierarchy, "subclass cycle through " + members);
    }

    for (const auto& [name, slot] : o.slots()) {
        check_name(FrameKind::Slot, name);
        for (const auto& d : slot.domain)
            if (!o.find_class(d))
                report(FrameKind::Slot, name, ViolationKind::UnresolvedReference,
                       "domain class '" + d + "' does not resolve");
        if (slot.card.max && slot.card.min > *slot.card.max)
            report(FrameKind::Slot, name, ViolationKind::CardinalityOrder,
                   "min-card exceeds max-card (" + to_string(slot.card) + ")");
        if (slot.card.max && *slot.card.max == 0)
            report(FrameKind::Slot, name, ViolationKind::ZeroMaxCardinality, "max-card must be positive");
        bool holds_classes = std::holds_alternative<ClassSet>(slot.range);
        if (holds_classes != slot.is_object()) {
            report(FrameKind::Slot, name, ViolationKind::RangeKindMismatch,
                   slot.is_object() ? "object property ranges over a datatype"
                                    : "datatype property ranges over classes");
        } else if (holds_classes) {
            if (slot.range_classes().empty())
                report(FrameKind::Slot, name, ViolationKind::EmptyObjectRange, "object property has no range");
            for (const auto& r : slot.range_classes())
                if (!class_resolves(o, r))
                    report(FrameKind::Slot, name, ViolationKind::UnresolvedReference,
                           "range class '" + r + "' does not resolve");
        }
    }

    for (const auto& [name, inst] : o.instances()) {
        check_name(FrameKind::Instance, name);
        std::set<std::string> reachable;
        for (const auto& t : inst.types) {
            if (!o.find_class(t)) {
                report(FrameKind::Instance, name, ViolationKind::UnresolvedReference,
                       "type '" + t + "' does not resolve");
                continue;
            }
            reachable.insert(t);
        }
        for (const auto& t : std::set<std::string>(reachable))
            for (const auto& a : ancestors(o, t))
                reachable.insert(a);
        for (const auto& [slot_name, values] : inst.values) {
            const SlotFrame* slot = o.find_slot(slot_name);
            if (!slot) {
                report(FrameKind::Instance, name, ViolationKind::UnresolvedReference,
                       "slot '" + slot_name + "' does not resolve");
                continue;
            }
            bool attached = slot->domain.empty();
            for (const auto& d : slot->domain)
                attached = attached || reachable.contains(d);
            if (!attached)
                report(FrameKind::Instance, name, ViolationKind::UnattachedSlotValue,
                       "slot '" + slot_name + "' is not attached to any type of the instance");
            for (const auto& v : values) {
                if (const auto* lit = std::get_if<Literal>(&v)) {
                    if (!admits(lit->kind, lit->lexical))
                        report(FrameKind::Instance, name, ViolationKind::InvalidLiteral,
                               "'" + lit->lexical + "' is not a valid " + std::string(to_string(lit->kind)));
                } else if (!o.find_instance(std::get<InstanceRef>(v).name)) {
                    report(FrameKind::Instance, name, ViolationKind::UnresolvedReference,
                           "value '" + std::get<InstanceRef>(v).name + "' does not resolve");
                }
            }
        }
    }
    return out;
}

std::vector<std::string> ancestors(const Ontology& o, std::string_view class_name)
{
    const ClassFrame* start = o.find_class(class_name);
    if (!start)
        throw Error(ErrorCode::UnknownFrame, "unknown class '" + std::string(class_name) + "'");

    std::vector<std::string> out;
    std::set<std::string> seen{start->name};
    std::set<std::string> frontier;
    for (const auto& s : start->superclasses)
        if (o.find_class(s))
            frontier.insert(s);
    while (!frontier.empty()) {
        std::set<std::string> next;
        for (const auto& c : frontier) {
            if (!seen.insert(c).second)
                continue;
            out.push_back(c);
            for (const auto& s : o.classes().at(c).superclasses)
                if (!seen.contains(s) && o.find_class(s))
                    next.insert(s);
        }
        frontier = std::move(next);
    }
    return out;
}

bool is_subclass_or_self(const Ontology& o, std::string_view class_name, std::string_view other)
{
    if (class_name == other || other == kThing)
        return true;
    std::vector<std::string> stack{std::string(class_name)};
    std::set<std::string> seen;
    while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        if (!seen.insert(c).second)
            continue;
        const ClassFrame* cls = o.find_class(c);
        if (!cls)
            continue;
        for (const auto& s : cls->superclasses) {
            if (s == other)
                return true;
            stack.push_back(s);
        }
    }
    return false;
}

bool would_create_cycle(const Ontology& o, std::string_view sub, std::string_view super)
{
    return is_subclass_or_self(o, super, sub);
}

} // namespace ontomerge
