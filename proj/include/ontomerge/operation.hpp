#pragma once
// Merge operations and their one-line text form.
//
//   merge-classes a=author@Ruby_bibliography b=author@Niagara_bib [name=author]
//   merge-slots a=<slot@onto> b=<slot@onto> [name=N]
//   merge-instances a=<inst@onto> b=<inst@onto> [name=N] [confirm=true]
//   shallow-copy class=<class@source>
//   deep-copy class=<class@source>
//   copy-slot slot=<slot@source>
//   create-class name=N [supers=A,B]
//   add-superclass class=<class@onto> super=<class@onto|Thing>
//   remove-superclass class=<class@onto> super=<class@onto>
//   rename kind=class|slot|instance frame=<x@onto> name=N
//   remove kind=class|slot|instance frame=<x@onto>
//   swap-names kind=class|slot|instance a=<x@onto> b=<y@onto>
//   set-range slot=<slot@onto> datatype=<xsd kind> | classes=A,B
//   set-cardinality slot=<slot@onto> min=N max=N|*
//   set-preferred [source=<ontology>]
//
// Frames are referenced as local-name@ontology-name.

#include "ontomerge/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ontomerge {

struct MergeClasses {
    FrameId a, b;
    std::optional<std::string> name;
    bool operator==(const MergeClasses&) const = default;
};

struct MergeSlots {
    FrameId a, b;
    std::optional<std::string> name;
    bool operator==(const MergeSlots&) const = default;
};

struct MergeInstances {
    FrameId a, b;
    std::optional<std::string> name;
    bool confirm = false; // pre-confirms merging the types' distinct images
    bool operator==(const MergeInstances&) const = default;
};

struct ShallowCopy {
    FrameId cls;
    bool operator==(const ShallowCopy&) const = default;
};

struct DeepCopy {
    FrameId cls;
    bool operator==(const DeepCopy&) const = default;
};

struct CopySlot {
    FrameId slot;
    bool operator==(const CopySlot&) const = default;
};

struct CreateClass {
    std::string name;
    ClassSet superclasses; // local names in the merged ontology; Thing allowed
    bool operator==(const CreateClass&) const = default;
};

struct AddSuperclass {
    FrameId cls, super;
    bool operator==(const AddSuperclass&) const = default;
};

struct RemoveSuperclass {
    FrameId cls, super;
    bool operator==(const RemoveSuperclass&) const = default;
};

struct RenameFrame {
    FrameKind kind = FrameKind::Class;
    FrameId frame;
    std::string name;
    bool operator==(const RenameFrame&) const = default;
};

struct RemoveFrame {
    FrameKind kind = FrameKind::Class;
    FrameId frame;
    bool operator==(const RemoveFrame&) const = default;
};

struct SwapNames {
    FrameKind kind = FrameKind::Class;
    FrameId a, b;
    bool operator==(const SwapNames&) const = default;
};

struct SetSlotRange {
    FrameId slot;
    RangeSpec range;
    bool operator==(const SetSlotRange&) const = default;
};

struct SetCardinality {
    FrameId slot;
    Cardinality card;
    bool operator==(const SetCardinality&) const = default;
};

struct SetPreferred {
    std::optional<std::string> source;
    bool operator==(const SetPreferred&) const = default;
};

using Operation = std::variant<MergeClasses, MergeSlots, MergeInstances, ShallowCopy, DeepCopy, CopySlot,
                               CreateClass, AddSuperclass, RemoveSuperclass, RenameFrame, RemoveFrame, SwapNames,
                               SetSlotRange, SetCardinality, SetPreferred>;

std::string_view op_name(const Operation& op);

/// Frame arguments of the operation, in argument order.
std::vector<FrameId> arguments(const Operation& op);

std::string to_line(const Operation& op);

/// Parses one operation line; throws script-syntax on malformed input.
Operation parse_operation(std::string_view line);

/// Builds an operation from its name and key=value fields (the JSON form).
Operation make_operation(std::string_view name, const std::map<std::string, std::string>& fields);

} // namespace ontomerge
