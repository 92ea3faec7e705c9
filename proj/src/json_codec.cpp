#include "ontomerge/json_codec.hpp"

#include "ontomerge/error.hpp"

#include <sstream>

namespace ontomerge::codec {

namespace {

json ids(const auto& frames)
{
    json out = json::array();
    for (const auto& f : frames)
        out.push_back(to_json(f));
    return out;
}

json names(const std::set<std::string>& set)
{
    return json(std::vector<std::string>(set.begin(), set.end()));
}

} // namespace

json to_json(const FrameId& id) { return id.str(); }

json to_json(const Ontology& o)
{
    json classes = json::array();
    for (const auto& [name, cls] : o.classes())
        classes.push_back({{"name", name},
                           {"superclasses", names(cls.superclasses)},
                           {"subclasses", o.subclasses(name)},
                           {"slots", o.attached_slots(name)}});
    json slots = json::array();
    for (const auto& [name, slot] : o.slots()) {
        json s = {{"name", name},
                  {"kind", slot.is_object() ? "object" : "datatype"},
                  {"domain", names(slot.domain)},
                  {"min", slot.card.min},
                  {"max", slot.card.max ? json(*slot.card.max) : json(nullptr)}};
        if (slot.is_object())
            s["range"] = names(slot.range_classes());
        else
            s["range"] = std::string(to_string(slot.range_kind()));
        slots.push_back(std::move(s));
    }
    json instances = json::array();
    for (const auto& [name, inst] : o.instances()) {
        json values = json::object();
        for (const auto& [slot, vs] : inst.values) {
            json list = json::array();
            for (const auto& v : vs) {
                if (const auto* r = std::get_if<InstanceRef>(&v))
                    list.push_back({{"ref", r->name}});
                else
                    list.push_back({{"literal", std::get<Literal>(v).lexical},
                                    {"datatype", std::string(to_string(std::get<Literal>(v).kind))}});
            }
            values[slot] = std::move(list);
        }
        instances.push_back({{"name", name}, {"types", names(inst.types)}, {"values", std::move(values)}});
    }
    json roots = json::array();
    for (const auto& [name, cls] : o.classes())
        if (cls.superclasses.empty())
            roots.push_back(name);
    return {{"name", o.name()},
            {"roots", std::move(roots)},
            {"classes", std::move(classes)},
            {"slots", std::move(slots)},
            {"instances", std::move(instances)}};
}

json to_json(const Operation& op)
{
    json out = {{"op", std::string(op_name(op))}};
    std::istringstream words(to_line(op));
    std::string token;
    words >> token;
    while (words >> token) {
        auto eq = token.find('=');
        out[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return out;
}

json to_json(const Explanation& e)
{
    json out = {{"kind", std::string(to_string(e.kind))}, {"text", e.text}, {"evidence", ids(e.evidence)}};
    out["score"] = e.score ? json(*e.score) : json(nullptr);
    return out;
}

json to_json(const Suggestion& s)
{
    json explanations = json::array();
    for (const auto& e : s.explanations)
        explanations.push_back(to_json(e));
    return {{"key", s.key()},
            {"operation", to_json(s.proposed)},
            {"score", s.score},
            {"explanations", std::move(explanations)},
            {"related", ids(s.related)}};
}

json to_json(const Conflict& c)
{
    json resolutions = json::array();
    for (const auto& r : c.resolutions)
        resolutions.push_back({{"key", to_line(r.op)},
                               {"operation", to_json(r.op)},
                               {"favors", names(r.favors)},
                               {"text", r.text}});
    return {{"key", c.key()},
            {"kind", std::string(to_string(c.kind))},
            {"frames", ids(c.frames)},
            {"description", c.description},
            {"resolutions", std::move(resolutions)}};
}

json to_json(const AppliedRecord& r)
{
    json followups = json::array();
    for (const auto& f : r.followups)
        followups.push_back({{"operation", to_json(f.op)},
                             {"kind", std::string(to_string(f.kind))},
                             {"text", f.text},
                             {"evidence", ids(f.evidence)}});
    return {{"operation", to_json(r.op)},
            {"result", r.result ? to_json(*r.result) : json(nullptr)},
            {"created", ids(r.created)},
            {"deleted", ids(r.deleted)},
            {"rewritten", ids(r.rewritten)},
            {"touched", ids(r.touched)},
            {"followups", std::move(followups)},
            {"notes", r.notes}};
}

Operation operation_from_json(const json& value)
{
    if (value.is_string())
        return parse_operation(value.get<std::string>());
    if (!value.is_object())
        throw Error(ErrorCode::ScriptSyntax, "an operation is a string or an object");
    auto name = value.find("op");
    if (name == value.end() || !name->is_string())
        throw Error(ErrorCode::ScriptSyntax, "operation object needs a string 'op'");
    std::map<std::string, std::string> fields;
    for (const auto& [key, v] : value.items()) {
        if (key == "op")
            continue;
        if (v.is_string())
            fields[key] = v.get<std::string>();
        else if (v.is_boolean())
            fields[key] = v.get<bool>() ? "true" : "false";
        else if (v.is_number_unsigned() || v.is_number_integer())
            fields[key] = std::to_string(v.get<long long>());
        else if (v.is_array()) {
            std::string joined;
            for (const auto& item : v) {
                if (!item.is_string())
                    throw Error(ErrorCode::ScriptSyntax, "field '" + key + "' must list strings");
                joined += (joined.empty() ? "" : ",") + item.get<std::string>();
            }
            fields[key] = joined;
        } else if (!v.is_null()) {
            throw Error(ErrorCode::ScriptSyntax, "field '" + key + "' has an unsupported type");
        }
    }
    return make_operation(name->get<std::string>(), fields);
}

json error_json(ErrorCode code, std::string_view message)
{
    return {{"error", std::string(to_string(code))}, {"message", std::string(message)}};
}

} // namespace ontomerge::codec
