#pragma once
// Frame-based ontology model.
//
// An Ontology holds three independent frame namespaces: classes, slots and
// instances. Inside an ontology frames refer to each other by local name;
// FrameId qualifies a local name with its ontology for cross-ontology use
// (operations, image maps). The class hierarchy is a DAG hanging from the
// implicit top class `Thing`, which is never stored: a class with an empty
// superclass set is a direct child of it.

#include "ontomerge/xsd.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ontomerge {

inline constexpr std::string_view kThing = "Thing";

enum class FrameKind { Class, Slot, Instance };

std::string_view to_string(FrameKind kind);
std::optional<FrameKind> parse_frame_kind(std::string_view text);

struct FrameId {
    std::string source; // ontology name
    std::string name;   // local name

    auto operator<=>(const FrameId&) const = default;

    /// `name@source`, the spelling used by merge scripts.
    std::string str() const { return name + "@" + source; }
};

/// Parses `name@source`.
std::optional<FrameId> parse_frame_id(std::string_view text);

enum class SlotKind { Object, Datatype };

using ClassSet = std::set<std::string>;

/// Either a datatype or a non-empty set of classes (`Thing` allowed).
using RangeSpec = std::variant<XsdKind, ClassSet>;

struct Cardinality {
    unsigned min = 0;
    std::optional<unsigned> max; // nullopt = unbounded

    auto operator<=>(const Cardinality&) const = default;
};

std::string to_string(const Cardinality& card);

struct Literal {
    std::string lexical;
    XsdKind kind = XsdKind::String;

    auto operator<=>(const Literal&) const = default;
};

struct InstanceRef {
    std::string name;

    auto operator<=>(const InstanceRef&) const = default;
};

using Value = std::variant<Literal, InstanceRef>;

struct ClassFrame {
    std::string name;
    ClassSet superclasses; // empty: direct child of Thing
};

struct SlotFrame {
    std::string name;
    SlotKind kind = SlotKind::Datatype;
    ClassSet domain;
    RangeSpec range = XsdKind::String;
    Cardinality card;

    bool is_object() const { return kind == SlotKind::Object; }
    const ClassSet& range_classes() const { return std::get<ClassSet>(range); }
    XsdKind range_kind() const { return std::get<XsdKind>(range); }
};

struct InstanceFrame {
    std::string name;
    ClassSet types;
    std::map<std::string, std::vector<Value>> values; // slot name -> values
};

class Ontology {
public:
    Ontology() = default;
    explicit Ontology(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const std::map<std::string, ClassFrame>& classes() const { return classes_; }
    const std::map<std::string, SlotFrame>& slots() const { return slots_; }
    const std::map<std::string, InstanceFrame>& instances() const { return instances_; }

    std::map<std::string, ClassFrame>& classes() { return classes_; }
    std::map<std::string, SlotFrame>& slots() { return slots_; }
    std::map<std::string, InstanceFrame>& instances() { return instances_; }

    const ClassFrame* find_class(std::string_view name) const;
    const SlotFrame* find_slot(std::string_view name) const;
    const InstanceFrame* find_instance(std::string_view name) const;
    ClassFrame* find_class(std::string_view name);
    SlotFrame* find_slot(std::string_view name);
    InstanceFrame* find_instance(std::string_view name);

    bool contains(FrameKind kind, std::string_view name) const;

    /// Inserts a frame; throws name-collision if the name is taken in its kind.
    ClassFrame& add_class(ClassFrame frame);
    SlotFrame& add_slot(SlotFrame frame);
    InstanceFrame& add_instance(InstanceFrame frame);

    /// Slots whose domain contains `class_name`, sorted by name.
    std::vector<std::string> attached_slots(std::string_view class_name) const;
    /// Direct subclasses of `class_name`, sorted by name.
    std::vector<std::string> subclasses(std::string_view class_name) const;

    std::size_t frame_count() const { return classes_.size() + slots_.size() + instances_.size(); }

    FrameId id(std::string_view local) const { return FrameId{name_, std::string(local)}; }

private:
    std::string name_;
    std::map<std::string, ClassFrame> classes_;
    std::map<std::string, SlotFrame> slots_;
    std::map<std::string, InstanceFrame> instances_;
};

enum class ViolationKind {
    InvalidName,
    ReservedName,
    UnresolvedReference,
    CyclicHierarchy,
    CardinalityOrder,
    ZeroMaxCardinality,
    RangeKindMismatch,
    EmptyObjectRange,
    UnattachedSlotValue,
    InvalidLiteral,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    FrameKind frame_kind;
    std::string frame;
    ViolationKind kind;
    std::string detail;
};

/// Well-formedness check; an empty result means every model invariant holds.
std::vector<Violation> validate(const Ontology& ontology);

/// Transitive superclasses of `class_name`, breadth-first with each level
/// sorted by name; excludes the class itself and Thing.
/// Throws unknown-frame if the class does not exist.
std::vector<std::string> ancestors(const Ontology& ontology, std::string_view class_name);

/// Whether adding `sub ⊂ super` would close a cycle.
bool would_create_cycle(const Ontology& ontology, std::string_view sub, std::string_view super);

/// True if `class_name` equals `other` or has it as an ancestor.
bool is_subclass_or_self(const Ontology& ontology, std::string_view class_name, std::string_view other);

} // namespace ontomerge
