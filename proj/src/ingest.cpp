#include "ontomerge/ingest.hpp"

#include "ontomerge/error.hpp"

#include <algorithm>
#include <set>

namespace ontomerge::ingest {

namespace {

constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";
constexpr std::string_view kXsiNs = "http://www.w3.org/2001/XMLSchema-instance";
constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema";

std::string trim(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return std::string(s);
}

bool is_data_attribute(const xml::Attribute& a)
{
    return a.ns != kXmlNs && a.ns != kXsiNs;
}

bool has_data_attributes(const xml::Element& e)
{
    return std::any_of(e.attributes.begin(), e.attributes.end(), is_data_attribute);
}

struct Shape {
    bool has_children = false;
    bool has_attributes = false;
    bool has_text = false;
};

void collect_shapes(const xml::Element& e, std::map<std::string, Shape>& shapes)
{
    auto& shape = shapes[e.local];
    shape.has_children = shape.has_children || !e.children.empty();
    shape.has_attributes = shape.has_attributes || has_data_attributes(e);
    shape.has_text = shape.has_text || !trim(e.text).empty();
    for (const auto& c : e.children)
        collect_shapes(c, shapes);
}

bool is_complex(const Shape& s)
{
    return s.has_children || s.has_attributes || !s.has_text;
}

// Per (parent element, member name) statistics gathered across all parent occurrences.
struct MemberStats {
    std::size_t present_in = 0; // parent occurrences containing the member
    std::size_t max_count = 0;  // largest count within one parent occurrence
    std::vector<std::string> values;
};

struct ParentStats {
    std::size_t occurrences = 0;
    std::vector<std::string> order;
    std::map<std::string, MemberStats> members;

    MemberStats& member(const std::string& name)
    {
        auto [it, inserted] = members.try_emplace(name);
        if (inserted)
            order.push_back(name);
        return it->second;
    }
};

} // namespace

const LeafField* ElementSchema::field(std::string_view n) const
{
    auto it = std::find_if(fields.begin(), fields.end(), [&](const LeafField& f) { return f.name == n; });
    return it == fields.end() ? nullptr : &*it;
}

const ChildRef* ElementSchema::child(std::string_view n) const
{
    auto it = std::find_if(children.begin(), children.end(), [&](const ChildRef& c) { return c.name == n; });
    return it == children.end() ? nullptr : &*it;
}

const ElementSchema* Schema::find(std::string_view name) const
{
    auto it = elements.find(std::string(name));
    return it == elements.end() ? nullptr : &it->second;
}

XsdKind infer_datatype(std::span<const std::string> values)
{
    if (values.empty())
        throw Error(ErrorCode::EmptyInput, "cannot infer a datatype from no values");
    for (XsdKind kind : kInferenceOrder)
        if (std::all_of(values.begin(), values.end(), [&](const std::string& v) { return admits(kind, v); }))
            return kind;
    return XsdKind::String;
}

Schema infer_schema(std::span<const xml::Element> documents)
{
    if (documents.empty())
        throw Error(ErrorCode::MalformedXml, "no XML documents to infer a schema from");
    const std::string& root = documents.front().local;
    for (const auto& doc : documents)
        if (doc.local != root)
            throw Error(ErrorCode::MixedRoots, "documents have different root elements: '" + root + "' and '" +
                                                   doc.local + "'");

    std::map<std::string, Shape> shapes;
    for (const auto& doc : documents)
        collect_shapes(doc, shapes);
    shapes[root].has_children = true; // the root is always a class

    std::map<std::string, ParentStats> stats;
    std::vector<std::string> element_order;
    std::set<std::string> repeatable;

    auto visit = [&](auto&& self, const xml::Element& e) -> void {
        if (!is_complex(shapes.at(e.local)))
            return;
        auto [it, inserted] = stats.try_emplace(e.local);
        if (inserted)
            element_order.push_back(e.local);
        ParentStats& ps = it->second;
        ++ps.occurrences;

        std::map<std::string, std::size_t> counts;
        for (const auto& a : e.attributes) {
            if (!is_data_attribute(a))
                continue;
            ++counts[a.local];
            ps.member(a.local).values.push_back(trim(a.value));
        }
        for (const auto& c : e.children) {
            ++counts[c.local];
            auto& m = ps.member(c.local);
            if (!is_complex(shapes.at(c.local)))
                m.values.push_back(trim(c.text));
        }
        for (const auto& [name, n] : counts) {
            auto& m = ps.members.at(name);
            ++m.present_in;
            m.max_count = std::max(m.max_count, n);
            if (n > 1)
                repeatable.insert(name);
        }
        for (const auto& c : e.children)
            self(self, c);
    };
    for (const auto& doc : documents)
        visit(visit, doc);

    Schema schema;
    schema.root = root;
    for (const auto& name : element_order) {
        const ParentStats& ps = stats.at(name);
        ElementSchema decl;
        decl.name = name;
        decl.repeatable = repeatable.contains(name);
        for (const auto& member : ps.order) {
            const MemberStats& m = ps.members.at(member);
            unsigned occurs_min = m.present_in == ps.occurrences ? 1u : 0u;
            bool child_is_class = shapes.contains(member) && is_complex(shapes.at(member)) &&
                                  stats.contains(member);
            if (child_is_class) {
                decl.children.push_back(ChildRef{member, occurs_min});
            } else {
                LeafField f;
                f.name = member;
                f.occurs_min = occurs_min;
                f.occurs_max = m.max_count > 1 ? std::nullopt : std::optional<unsigned>(1);
                f.kind = infer_datatype(m.values);
                decl.fields.push_back(std::move(f));
            }
        }
        schema.elements.emplace(name, std::move(decl));
    }
    return schema;
}

namespace {

std::string strip_prefix(std::string_view qname)
{
    auto colon = qname.find(':');
    return std::string(colon == std::string_view::npos ? qname : qname.substr(colon + 1));
}

XsdKind map_builtin(std::string_view type, std::vector<std::string>& warnings)
{
    auto local = strip_prefix(type);
    if (auto kind = parse_xsd_kind(local))
        return *kind;
    warnings.push_back("unsupported XSD type '" + std::string(type) + "' mapped to string");
    return XsdKind::String;
}

struct XsdReader {
    const xml::Element& root;
    Schema schema;
    std::map<std::string, const xml::Element*> named_types;
    std::map<std::string, const xml::Element*> top_elements;

    std::optional<unsigned> max_occurs(const xml::Element& e)
    {
        const auto* a = e.attribute("maxOccurs");
        if (!a)
            return 1;
        if (a->value == "unbounded")
            return std::nullopt;
        return static_cast<unsigned>(std::stoul(a->value));
    }

    unsigned min_occurs(const xml::Element& e)
    {
        const auto* a = e.attribute("minOccurs");
        return a ? static_cast<unsigned>(std::stoul(a->value)) : 1u;
    }

    const xml::Element* complex_type_of(const xml::Element& element)
    {
        for (const auto& c : element.children)
            if (c.is(kXsdNs, "complexType"))
                return &c;
        if (const auto* t = element.attribute("type")) {
            auto it = named_types.find(strip_prefix(t->value));
            if (it != named_types.end())
                return it->second;
        }
        return nullptr;
    }

    void declare(const std::string& name, const xml::Element& complex_type)
    {
        if (schema.elements.contains(name))
            return;
        schema.elements.emplace(name, ElementSchema{name, {}, {}, false});
        ElementSchema decl{name, {}, {}, false};

        auto walk = [&](auto&& self, const xml::Element& group) -> void {
            for (const auto& item : group.children) {
                if (item.is(kXsdNs, "sequence") || item.is(kXsdNs, "all") || item.is(kXsdNs, "choice")) {
                    if (item.is(kXsdNs, "choice"))
                        schema.warnings.push_back("xs:choice in '" + name + "' treated as a sequence");
                    self(self, item);
                } else if (item.is(kXsdNs, "element")) {
                    member(decl, item);
                } else if (item.is(kXsdNs, "attribute")) {
                    const auto* n = item.attribute("name");
                    if (!n)
                        continue;
                    const auto* type = item.attribute("type");
                    const auto* use = item.attribute("use");
                    LeafField f;
                    f.name = n->value;
                    f.kind = type ? map_builtin(type->value, schema.warnings) : XsdKind::String;
                    f.occurs_min = use && use->value == "required" ? 1u : 0u;
                    decl.fields.push_back(std::move(f));
                } else if (item.is(kXsdNs, "simpleContent") || item.is(kXsdNs, "complexContent")) {
                    for (const auto& ext : item.children)
                        self(self, ext);
                } else if (item.is(kXsdNs, "extension") || item.is(kXsdNs, "restriction")) {
                    self(self, item);
                } else if (!item.is(kXsdNs, "annotation")) {
                    schema.warnings.push_back("unsupported XSD construct '" + item.local + "' in '" + name +
                                              "' ignored");
                }
            }
        };
        walk(walk, complex_type);
        decl.repeatable = schema.elements.at(name).repeatable;
        schema.elements[name] = std::move(decl);
    }

    void member(ElementSchema& decl, const xml::Element& item)
    {
        const xml::Element* target = &item;
        std::string name;
        if (const auto* ref = item.attribute("ref")) {
            name = strip_prefix(ref->value);
            auto it = top_elements.find(name);
            if (it == top_elements.end())
                throw Error(ErrorCode::UnresolvableReference, "xs:element ref '" + name + "' is not declared");
            target = it->second;
        } else if (const auto* n = item.attribute("name")) {
            name = n->value;
        } else {
            return;
        }
        auto max = max_occurs(item);
        unsigned min = min_occurs(item);
        if (const auto* ct = complex_type_of(*target)) {
            decl.children.push_back(ChildRef{name, min});
            declare(name, *ct);
            if (!max || *max > 1)
                schema.elements.at(name).repeatable = true;
        } else {
            const auto* type = target->attribute("type");
            LeafField f;
            f.name = name;
            f.kind = type ? map_builtin(type->value, schema.warnings) : XsdKind::String;
            f.occurs_min = min;
            f.occurs_max = max && *max <= 1 ? std::optional<unsigned>(1) : std::nullopt;
            decl.fields.push_back(std::move(f));
        }
    }

    Schema run()
    {
        if (!root.is(kXsdNs, "schema"))
            throw Error(ErrorCode::MalformedXml, "XSD root element must be xs:schema");
        schema.from_xsd = true;
        std::set<std::string> referenced;
        for (const auto& c : root.children) {
            if (c.is(kXsdNs, "complexType")) {
                if (const auto* n = c.attribute("name"))
                    named_types[n->value] = &c;
            } else if (c.is(kXsdNs, "element")) {
                if (const auto* n = c.attribute("name"))
                    top_elements[n->value] = &c;
            }
        }
        auto find_refs = [&](auto&& self, const xml::Element& e) -> void {
            if (e.is(kXsdNs, "element"))
                if (const auto* r = e.attribute("ref"))
                    referenced.insert(strip_prefix(r->value));
            for (const auto& c : e.children)
                self(self, c);
        };
        find_refs(find_refs, root);

        const xml::Element* root_element = nullptr;
        for (const auto& c : root.children) {
            if (!c.is(kXsdNs, "element") || !c.attribute("name"))
                continue;
            if (!root_element)
                root_element = &c;
            if (!referenced.contains(c.attribute("name")->value)) {
                root_element = &c;
                break;
            }
        }
        if (!root_element)
            throw Error(ErrorCode::MalformedXml, "XSD declares no top-level element");
        schema.root = root_element->attribute("name")->value;
        const xml::Element* ct = complex_type_of(*root_element);
        if (!ct)
            throw Error(ErrorCode::MalformedXml, "XSD root element '" + schema.root + "' has no complex type");
        declare(schema.root, *ct);
        return std::move(schema);
    }
};

XsdKind join_kinds(XsdKind a, XsdKind b)
{
    if (a == b)
        return a;
    auto either = [&](XsdKind x, XsdKind y) { return (a == x && b == y) || (a == y && b == x); };
    if (either(XsdKind::Integer, XsdKind::Decimal))
        return XsdKind::Decimal;
    if (either(XsdKind::NCName, XsdKind::NMTOKEN) || either(XsdKind::Integer, XsdKind::NMTOKEN))
        return XsdKind::NMTOKEN;
    return XsdKind::String;
}

struct SlotDraft {
    SlotFrame frame;
    bool first = true;
    std::vector<std::string> values;
    std::optional<XsdKind> declared;
};

void widen(SlotDraft& d, unsigned occurs_min, std::optional<unsigned> occurs_max)
{
    if (d.first) {
        d.frame.card = Cardinality{occurs_min, occurs_max};
        d.first = false;
        return;
    }
    d.frame.card.min = std::min(d.frame.card.min, occurs_min);
    if (!occurs_max || !d.frame.card.max)
        d.frame.card.max = std::nullopt;
}

} // namespace

Schema read_xsd(const xml::Element& schema_root)
{
    return XsdReader{schema_root, {}, {}, {}}.run();
}

Ontology lift(const Schema& schema, std::span<const xml::Element> documents, const LiftConfig& config)
{
    Ontology onto(config.ontology_name);
    auto is_class = [&](const std::string& element) {
        return schema.elements.contains(element) && (config.root_as_class || element != schema.root);
    };

    std::map<std::string, SlotDraft> object_slots;
    std::map<std::string, SlotDraft> data_slots;

    for (const auto& [name, decl] : schema.elements) {
        if (!is_class(name))
            continue;
        onto.add_class(ClassFrame{name, {}});
        for (const auto& child : decl.children) {
            if (!is_class(child.name))
                continue;
            auto& d = object_slots[config.object_property_prefix + child.name];
            d.frame.name = config.object_property_prefix + child.name;
            d.frame.kind = SlotKind::Object;
            d.frame.domain.insert(name);
            d.frame.range = ClassSet{child.name};
            bool repeat = schema.elements.at(child.name).repeatable;
            widen(d, child.occurs_min, repeat ? std::nullopt : std::optional<unsigned>(1));
        }
        for (const auto& field : decl.fields) {
            auto& d = data_slots[field.name];
            d.frame.name = field.name;
            d.frame.kind = SlotKind::Datatype;
            d.frame.domain.insert(name);
            d.declared = d.declared ? join_kinds(*d.declared, field.kind) : field.kind;
            widen(d, field.occurs_min, field.occurs_max);
        }
    }

    if (!schema.from_xsd) {
        auto collect = [&](auto&& self, const xml::Element& e) -> void {
            if (is_class(e.local)) {
                for (const auto& a : e.attributes)
                    if (is_data_attribute(a))
                        if (auto it = data_slots.find(a.local); it != data_slots.end())
                            it->second.values.push_back(trim(a.value));
                for (const auto& c : e.children)
                    if (!schema.elements.contains(c.local))
                        if (auto it = data_slots.find(c.local); it != data_slots.end())
                            it->second.values.push_back(trim(c.text));
            }
            for (const auto& c : e.children)
                self(self, c);
        };
        for (const auto& doc : documents)
            collect(collect, doc);
    }

    for (auto& [name, d] : object_slots)
        onto.add_slot(std::move(d.frame));
    for (auto& [name, d] : data_slots) {
        if (!d.values.empty())
            d.frame.range = infer_datatype(d.values);
        else
            d.frame.range = d.declared.value_or(XsdKind::String);
        if (onto.find_slot(name))
            throw Error(ErrorCode::NameCollision, "leaf field '" + name + "' collides with an object property");
        onto.add_slot(std::move(d.frame));
    }

    if (config.with_instances) {
        std::map<std::string, std::size_t> counters;
        auto make = [&](auto&& self, const xml::Element& e) -> std::optional<std::string> {
            if (!is_class(e.local)) {
                for (const auto& c : e.children)
                    self(self, c);
                return std::nullopt;
            }
            InstanceFrame inst;
            inst.name = e.local + "_" + std::to_string(++counters[e.local]);
            inst.types.insert(e.local);
            auto add_literal = [&](const std::string& slot_name, std::string lexical) {
                const SlotFrame* slot = onto.find_slot(slot_name);
                if (!slot || slot->is_object())
                    return;
                XsdKind kind = admits(slot->range_kind(), lexical) ? slot->range_kind() : XsdKind::String;
                inst.values[slot_name].push_back(Literal{std::move(lexical), kind});
            };
            for (const auto& a : e.attributes)
                if (is_data_attribute(a))
                    add_literal(a.local, trim(a.value));
            std::string self_name = inst.name;
            for (const auto& c : e.children) {
                if (is_class(c.local)) {
                    auto child = self(self, c);
                    inst.values[config.object_property_prefix + c.local].push_back(InstanceRef{*child});
                } else if (!schema.elements.contains(c.local)) {
                    add_literal(c.local, trim(c.text));
                }
            }
            onto.add_instance(std::move(inst));
            return self_name;
        };
        for (const auto& doc : documents)
            make(make, doc);
    }
    return onto;
}

Ontology lift_files(std::span<const std::filesystem::path> files, const LiftConfig& config,
                    const std::optional<std::filesystem::path>& xsd, std::vector<std::string>* warnings)
{
    std::vector<xml::Element> docs;
    docs.reserve(files.size());
    for (const auto& f : files)
        docs.push_back(xml::parse_file(f));
    Schema schema = xsd ? read_xsd(xml::parse_file(*xsd)) : infer_schema(docs);
    if (warnings)
        warnings->insert(warnings->end(), schema.warnings.begin(), schema.warnings.end());
    return lift(schema, docs, config);
}

} // namespace ontomerge::ingest
