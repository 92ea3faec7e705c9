#include "ontomerge/operation.hpp"

#include "ontomerge/error.hpp"

#include <charconv>
#include <sstream>

namespace ontomerge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string join(const ClassSet& names)
{
    std::string out;
    for (const auto& n : names)
        out += (out.empty() ? "" : ",") + n;
    return out;
}

ClassSet split_names(std::string_view text)
{
    ClassSet out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        if (!item.empty())
            out.insert(std::string(item));
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

class Fields {
public:
    Fields(std::string_view op, const std::map<std::string, std::string>& fields) : op_(op), fields_(fields) {}

    const std::string& required(const std::string& key) const
    {
        auto it = fields_.find(key);
        if (it == fields_.end() || it->second.empty())
            throw Error(ErrorCode::ScriptSyntax, std::string(op_) + ": missing field '" + key + "'");
        return it->second;
    }

    std::optional<std::string> optional(const std::string& key) const
    {
        auto it = fields_.find(key);
        if (it == fields_.end() || it->second.empty())
            return std::nullopt;
        return it->second;
    }

    FrameId frame(const std::string& key) const
    {
        const auto& text = required(key);
        auto id = parse_frame_id(text);
        if (!id)
            throw Error(ErrorCode::ScriptSyntax,
                        std::string(op_) + ": field '" + key + "' must be name@ontology, got '" + text + "'");
        return *id;
    }

    // A superclass reference: name@ontology, or bare Thing.
    FrameId super(const std::string& key) const
    {
        const auto& text = required(key);
        if (text == kThing)
            return FrameId{"", std::string(kThing)};
        return frame(key);
    }

    FrameKind kind() const
    {
        auto k = parse_frame_kind(required("kind"));
        if (!k)
            throw Error(ErrorCode::ScriptSyntax, std::string(op_) + ": kind must be class, slot or instance");
        return *k;
    }

    unsigned number(const std::string& key) const
    {
        const auto& text = required(key);
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw Error(ErrorCode::ScriptSyntax, std::string(op_) + ": field '" + key + "' is not a number");
        return value;
    }

    bool flag(const std::string& key) const
    {
        auto v = optional(key);
        if (!v)
            return false;
        if (*v == "true")
            return true;
        if (*v == "false")
            return false;
        throw Error(ErrorCode::ScriptSyntax, std::string(op_) + ": field '" + key + "' must be true or false");
    }

private:
    std::string_view op_;
    const std::map<std::string, std::string>& fields_;
};

} // namespace

std::string_view op_name(const Operation& op)
{
    return std::visit(overloaded{
                          [](const MergeClasses&) { return std::string_view("merge-classes"); },
                          [](const MergeSlots&) { return std::string_view("merge-slots"); },
                          [](const MergeInstances&) { return std::string_view("merge-instances"); },
                          [](const ShallowCopy&) { return std::string_view("shallow-copy"); },
                          [](const DeepCopy&) { return std::string_view("deep-copy"); },
                          [](const CopySlot&) { return std::string_view("copy-slot"); },
                          [](const CreateClass&) { return std::string_view("create-class"); },
                          [](const AddSuperclass&) { return std::string_view("add-superclass"); },
                          [](const RemoveSuperclass&) { return std::string_view("remove-superclass"); },
                          [](const RenameFrame&) { return std::string_view("rename"); },
                          [](const RemoveFrame&) { return std::string_view("remove"); },
                          [](const SwapNames&) { return std::string_view("swap-names"); },
                          [](const SetSlotRange&) { return std::string_view("set-range"); },
                          [](const SetCardinality&) { return std::string_view("set-cardinality"); },
                          [](const SetPreferred&) { return std::string_view("set-preferred"); },
                      },
                      op);
}

std::vector<FrameId> arguments(const Operation& op)
{
    return std::visit(overloaded{
                          [](const MergeClasses& o) { return std::vector<FrameId>{o.a, o.b}; },
                          [](const MergeSlots& o) { return std::vector<FrameId>{o.a, o.b}; },
                          [](const MergeInstances& o) { return std::vector<FrameId>{o.a, o.b}; },
                          [](const ShallowCopy& o) { return std::vector<FrameId>{o.cls}; },
                          [](const DeepCopy& o) { return std::vector<FrameId>{o.cls}; },
                          [](const CopySlot& o) { return std::vector<FrameId>{o.slot}; },
                          [](const CreateClass&) { return std::vector<FrameId>{}; },
                          [](const AddSuperclass& o) { return std::vector<FrameId>{o.cls, o.super}; },
                          [](const RemoveSuperclass& o) { return std::vector<FrameId>{o.cls, o.super}; },
                          [](const RenameFrame& o) { return std::vector<FrameId>{o.frame}; },
                          [](const RemoveFrame& o) { return std::vector<FrameId>{o.frame}; },
                          [](const SwapNames& o) { return std::vector<FrameId>{o.a, o.b}; },
                          [](const SetSlotRange& o) { return std::vector<FrameId>{o.slot}; },
                          [](const SetCardinality& o) { return std::vector<FrameId>{o.slot}; },
                          [](const SetPreferred&) { return std::vector<FrameId>{}; },
                      },
                      op);
}

std::string to_line(const Operation& op)
{
    std::ostringstream out;
    out << op_name(op);
    auto super_text = [](const FrameId& id) { return id.name == kThing ? std::string(kThing) : id.str(); };
    std::visit(overloaded{
                   [&](const MergeClasses& o) {
                       out << " a=" << o.a.str() << " b=" << o.b.str();
                       if (o.name)
                           out << " name=" << *o.name;
                   },
                   [&](const MergeSlots& o) {
                       out << " a=" << o.a.str() << " b=" << o.b.str();
                       if (o.name)
                           out << " name=" << *o.name;
                   },
                   [&](const MergeInstances& o) {
                       out << " a=" << o.a.str() << " b=" << o.b.str();
                       if (o.name)
                           out << " name=" << *o.name;
                       if (o.confirm)
                           out << " confirm=true";
                   },
                   [&](const ShallowCopy& o) { out << " class=" << o.cls.str(); },
                   [&](const DeepCopy& o) { out << " class=" << o.cls.str(); },
                   [&](const CopySlot& o) { out << " slot=" << o.slot.str(); },
                   [&](const CreateClass& o) {
                       out << " name=" << o.name;
                       if (!o.superclasses.empty())
                           out << " supers=" << join(o.superclasses);
                   },
                   [&](const AddSuperclass& o) { out << " class=" << o.cls.str() << " super=" << super_text(o.super); },
                   [&](const RemoveSuperclass& o) {
                       out << " class=" << o.cls.str() << " super=" << super_text(o.super);
                   },
                   [&](const RenameFrame& o) {
                       out << " kind=" << to_string(o.kind) << " frame=" << o.frame.str() << " name=" << o.name;
                   },
                   [&](const RemoveFrame& o) { out << " kind=" << to_string(o.kind) << " frame=" << o.frame.str(); },
                   [&](const SwapNames& o) {
                       out << " kind=" << to_string(o.kind) << " a=" << o.a.str() << " b=" << o.b.str();
                   },
                   [&](const SetSlotRange& o) {
                       out << " slot=" << o.slot.str();
                       if (const auto* k = std::get_if<XsdKind>(&o.range))
                           out << " datatype=" << to_string(*k);
                       else
                           out << " classes=" << join(std::get<ClassSet>(o.range));
                   },
                   [&](const SetCardinality& o) {
                       out << " slot=" << o.slot.str() << " min=" << o.card.min
                           << " max=" << (o.card.max ? std::to_string(*o.card.max) : "*");
                   },
                   [&](const SetPreferred& o) {
                       if (o.source)
                           out << " source=" << *o.source;
                   },
               },
               op);
    return out.str();
}

Operation make_operation(std::string_view name, const std::map<std::string, std::string>& fields)
{
    Fields f(name, fields);
    if (name == "merge-classes")
        return MergeClasses{f.frame("a"), f.frame("b"), f.optional("name")};
    if (name == "merge-slots")
        return MergeSlots{f.frame("a"), f.frame("b"), f.optional("name")};
    if (name == "merge-instances")
        return MergeInstances{f.frame("a"), f.frame("b"), f.optional("name"), f.flag("confirm")};
    if (name == "shallow-copy")
        return ShallowCopy{f.frame("class")};
    if (name == "deep-copy")
        return DeepCopy{f.frame("class")};
    if (name == "copy-slot")
        return CopySlot{f.frame("slot")};
    if (name == "create-class") {
        CreateClass op{f.required("name"), {}};
        if (auto supers = f.optional("supers"))
            op.superclasses = split_names(*supers);
        return op;
    }
    if (name == "add-superclass")
        return AddSuperclass{f.frame("class"), f.super("super")};
    if (name == "remove-superclass")
        return RemoveSuperclass{f.frame("class"), f.super("super")};
    if (name == "rename")
        return RenameFrame{f.kind(), f.frame("frame"), f.required("name")};
    if (name == "remove")
        return RemoveFrame{f.kind(), f.frame("frame")};
    if (name == "swap-names")
        return SwapNames{f.kind(), f.frame("a"), f.frame("b")};
    if (name == "set-range") {
        if (auto dt = f.optional("datatype")) {
            auto kind = parse_xsd_kind(*dt);
            if (!kind)
                throw Error(ErrorCode::ScriptSyntax, "set-range: unknown datatype '" + *dt + "'");
            return SetSlotRange{f.frame("slot"), *kind};
        }
        return SetSlotRange{f.frame("slot"), split_names(f.required("classes"))};
    }
    if (name == "set-cardinality") {
        Cardinality card{f.number("min"), std::nullopt};
        if (f.required("max") != "*")
            card.max = f.number("max");
        return SetCardinality{f.frame("slot"), card};
    }
    if (name == "set-preferred")
        return SetPreferred{f.optional("source")};
    throw Error(ErrorCode::ScriptSyntax, "unknown operation '" + std::string(name) + "'");
}

Operation parse_operation(std::string_view line)
{
    std::istringstream in{std::string(line)};
    std::string name;
    if (!(in >> name))
        throw Error(ErrorCode::ScriptSyntax, "empty operation line");
    std::map<std::string, std::string> fields;
    std::string token;
    while (in >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorCode::ScriptSyntax, "expected key=value, got '" + token + "'");
        auto [it, inserted] = fields.emplace(token.substr(0, eq), token.substr(eq + 1));
        if (!inserted)
            throw Error(ErrorCode::ScriptSyntax, "duplicate field '" + it->first + "'");
    }
    return make_operation(name, fields);
}

} // namespace ontomerge
